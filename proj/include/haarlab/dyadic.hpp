#pragma once

// Exact dyadic geometry: points a/2^b in [0,1), the intervals
// [(j-1)/2^k, j/2^k), nodes of the dyadic tree and the Haar functions on it.
// Everything here is integer arithmetic; no tolerances.

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "haarlab/config.hpp"

namespace haarlab {

inline constexpr std::int64_t pow2(int e) { return std::int64_t{1} << e; }

/// The point numerator / 2^level. Kept unreduced; equality and ordering
/// compare values, so (a, b) == (2a, b + 1).
class DyadicRational {
public:
  DyadicRational() = default;

  DyadicRational(std::int64_t numerator, int level) : num_(numerator), level_(level) {
    require_level(level, "DyadicRational");
    if (numerator < 0 || numerator >= pow2(level)) {
      throw DomainError("DyadicRational " + std::to_string(numerator) + "/2^" +
                        std::to_string(level) + " is outside [0,1)");
    }
  }

  std::int64_t numerator() const { return num_; }
  int level() const { return level_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(pow2(level_)); }

  /// floor(value * 2^k), the 0-based index of the level-k cell containing
  /// the point.
  std::int64_t cell(int k) const {
    return k >= level_ ? num_ << (k - level_) : num_ >> (level_ - k);
  }

  /// Numerator when written over 2^k; requires k >= level().
  std::int64_t numerator_at(int k) const { return num_ << (k - level_); }

  friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
    const int top = a.level_ > b.level_ ? a.level_ : b.level_;
    return a.numerator_at(top) == b.numerator_at(top);
  }
  friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
    const int top = a.level_ > b.level_ ? a.level_ : b.level_;
    return a.numerator_at(top) <=> b.numerator_at(top);
  }

  std::string str() const { return std::to_string(num_) + "/" + std::to_string(pow2(level_)); }

private:
  std::int64_t num_ = 0;
  int level_ = 0;
};

/// t + delta / 2^k, checked to stay inside [0,1).
inline DyadicRational shifted(const DyadicRational& t, std::int64_t delta, int k) {
  const int top = t.level() > k ? t.level() : k;
  const std::int64_t num = t.numerator_at(top) + (delta << (top - k));
  if (num < 0 || num >= pow2(top)) {
    throw DomainError("shifted point leaves [0,1): " + t.str() + " + " + std::to_string(delta) +
                      "/2^" + std::to_string(k));
  }
  return DyadicRational(num, top);
}

/// All points c / 2^level, c = 0 .. 2^level - 1.
inline std::vector<DyadicRational> dyadic_grid(int level) {
  require_level(level, "dyadic_grid");
  std::vector<DyadicRational> grid;
  grid.reserve(static_cast<std::size_t>(pow2(level)));
  for (std::int64_t c = 0; c < pow2(level); ++c) grid.emplace_back(c, level);
  return grid;
}

/// [(pos-1)/2^level, pos/2^level), 1 <= pos <= 2^level.
struct DyadicInterval {
  int level = 0;
  std::int64_t pos = 1;

  static DyadicInterval make(int level, std::int64_t pos) {
    require_level(level, "DyadicInterval");
    if (pos < 1 || pos > pow2(level)) {
      throw DomainError("DyadicInterval position " + std::to_string(pos) + " out of range at level " +
                        std::to_string(level));
    }
    return {level, pos};
  }

  DyadicRational left() const { return DyadicRational(pos - 1, level); }

  bool contains(const DyadicRational& t) const { return t.cell(level) + 1 == pos; }

  /// Containment of dyadic intervals reduces to ancestry in the binary tree.
  bool contains(const DyadicInterval& other) const {
    return other.level >= level && ((other.pos - 1) >> (other.level - level)) + 1 == pos;
  }

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

/// Node (level, pos) of the dyadic tree: level >= 1, 1 <= pos <= 2^(level-1).
struct HaarIndex {
  int level = 1;
  std::int64_t pos = 1;

  friend auto operator<=>(const HaarIndex&, const HaarIndex&) = default;

  std::string str() const { return "(" + std::to_string(level) + "," + std::to_string(pos) + ")"; }
};

inline bool is_valid(const HaarIndex& idx) {
  return idx.level >= 1 && idx.level <= max_level() && idx.pos >= 1 && idx.pos <= pow2(idx.level - 1);
}

inline const HaarIndex& require_valid(const HaarIndex& idx) {
  if (!is_valid(idx)) throw DomainError("invalid Haar index " + idx.str());
  return idx;
}

inline HaarIndex left_child(const HaarIndex& idx) { return {idx.level + 1, 2 * idx.pos - 1}; }
inline HaarIndex right_child(const HaarIndex& idx) { return {idx.level + 1, 2 * idx.pos}; }
inline HaarIndex parent(const HaarIndex& idx) { return {idx.level - 1, (idx.pos + 1) / 2}; }

/// Finite set of tree indices, iterated lexicographically by (level, pos).
class IndexSet {
public:
  using const_iterator = std::set<HaarIndex>::const_iterator;

  IndexSet() = default;
  IndexSet(std::initializer_list<HaarIndex> members) {
    for (const auto& m : members) insert(m);
  }

  bool insert(const HaarIndex& idx) { return members_.insert(require_valid(idx)).second; }
  bool erase(const HaarIndex& idx) { return members_.erase(idx) > 0; }
  bool contains(const HaarIndex& idx) const { return members_.count(idx) > 0; }

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const_iterator begin() const { return members_.begin(); }
  const_iterator end() const { return members_.end(); }

  int max_level() const { return members_.empty() ? 0 : members_.rbegin()->level; }
  int min_level() const { return members_.empty() ? 0 : members_.begin()->level; }

  bool subset_of(const IndexSet& other) const {
    for (const auto& m : members_)
      if (!other.contains(m)) return false;
    return true;
  }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

  std::string str() const {
    std::string out = "{";
    for (const auto& m : members_) {
      if (out.size() > 1) out += ",";
      out += m.str();
    }
    return out + "}";
  }

private:
  std::set<HaarIndex> members_;
};

/// D_first^last: all indices on levels first..last.
inline IndexSet tree_band(int first, int last) {
  if (first < 1 || last < first) {
    throw DomainError("tree_band needs 1 <= first <= last, got " + std::to_string(first) + ".." +
                      std::to_string(last));
  }
  require_level(last, "tree_band");
  IndexSet band;
  for (int k = first; k <= last; ++k)
    for (std::int64_t j = 1; j <= pow2(k - 1); ++j) band.insert({k, j});
  return band;
}

inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out = a;
  for (const auto& m : b) out.insert(m);
  return out;
}

inline IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  for (const auto& m : a)
    if (!b.contains(m)) out.insert(m);
  return out;
}

/// sign * 2^(half_exponent / 2), stored exactly.
struct HaarValue {
  int sign = 0;
  int half_exponent = 0;

  double to_double() const;
  friend bool operator==(const HaarValue&, const HaarValue&) = default;
};

inline double HaarValue::to_double() const {
  if (sign == 0) return 0.0;
  const double base = static_cast<double>(pow2(half_exponent / 2));
  return sign * (half_exponent % 2 == 0 ? base : base * 1.4142135623730950488);
}

/// Support of the Haar function at idx: the interval of level (level - 1).
inline DyadicInterval haar_support(const HaarIndex& idx) {
  require_valid(idx);
  return {idx.level - 1, idx.pos};
}

/// Value of the Haar function at idx in t: +2^((k-1)/2) on the left half of
/// its support, -2^((k-1)/2) on the right half, 0 elsewhere.
inline HaarValue haar_eval(const HaarIndex& idx, const DyadicRational& t) {
  require_valid(idx);
  const std::int64_t half = t.cell(idx.level) + 1;
  if (half == 2 * idx.pos - 1) return {+1, idx.level - 1};
  if (half == 2 * idx.pos) return {-1, idx.level - 1};
  return {0, 0};
}

/// Branch of t truncated to levels 1..depth: the unique index per level
/// whose support contains t.
inline IndexSet branch(const DyadicRational& t, int depth) {
  if (depth < 1) throw DomainError("branch depth must be >= 1");
  require_level(depth, "branch");
  IndexSet out;
  for (int k = 1; k <= depth; ++k) out.insert({k, t.cell(k - 1) + 1});
  return out;
}

/// chi_k^(j)(t - 2^(1-k)) == chi_k^(j+1)(t), evaluated exactly.
inline bool translation_identity_check(const HaarIndex& idx, const DyadicRational& t) {
  require_valid(idx);
  const HaarIndex next{idx.level, idx.pos + 1};
  require_valid(next);
  const DyadicRational back = shifted(t, -1, idx.level - 1);
  return haar_eval(idx, back) == haar_eval(next, t);
}

/// chi_{k+1}^(j)(t) == sqrt(2) chi_k^(j)(2t), evaluated exactly.
inline bool scaling_identity_check(const HaarIndex& idx, const DyadicRational& t) {
  require_valid(idx);
  const HaarIndex finer{idx.level + 1, idx.pos};
  require_valid(finer);
  if (t.cell(1) != 0) throw DomainError("scaling identity needs t < 1/2, got " + t.str());
  // 2t: same numerator, one level coarser (or doubled numerator at level 0).
  const DyadicRational doubled =
      t.level() >= 1 ? DyadicRational(t.numerator(), t.level() - 1) : DyadicRational(0, 0);
  const HaarValue lhs = haar_eval(finer, t);
  HaarValue rhs = haar_eval(idx, doubled);
  if (rhs.sign != 0) ++rhs.half_exponent;
  return lhs == rhs;
}

}  // namespace haarlab

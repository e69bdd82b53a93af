#pragma once

// Local height of index sets, the filling lemma (as a recursive algorithm)
// and the level-set / greedy partitions of a coefficient family.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "haarlab/combination.hpp"
#include "haarlab/normed_space.hpp"

namespace haarlab {

struct BranchExtremes {
  double min = 0.0;
  double max = 0.0;
};

/// Minimum and maximum over all branches (truncated at `depth`) of the sum
/// of `weight` along the branch. Only the ancestors of weighted nodes are
/// visited, so sparse sets deep in the tree stay cheap.
inline BranchExtremes branch_sum_extremes(const std::map<HaarIndex, double>& weight, int depth) {
  if (weight.empty()) return {};
  std::map<HaarIndex, BranchExtremes> closure;
  for (const auto& [idx, w] : weight) {
    if (idx.level > depth) throw DomainError("branch_sum_extremes: index " + idx.str() + " below depth");
    for (HaarIndex a = idx;; a = parent(a)) {
      if (!closure.emplace(a, BranchExtremes{}).second || a.level == 1) break;
    }
  }
  // Children have larger levels and are visited first in reverse order.
  for (auto it = closure.rbegin(); it != closure.rend(); ++it) {
    const HaarIndex& node = it->first;
    const auto found = weight.find(node);
    const double own = found == weight.end() ? 0.0 : found->second;
    BranchExtremes below{0.0, 0.0};
    if (node.level < depth) {
      const auto l = closure.find(left_child(node));
      const auto r = closure.find(right_child(node));
      const BranchExtremes lv = l == closure.end() ? BranchExtremes{} : l->second;
      const BranchExtremes rv = r == closure.end() ? BranchExtremes{} : r->second;
      below = {std::min(lv.min, rv.min), std::max(lv.max, rv.max)};
    }
    it->second = {own + below.min, own + below.max};
  }
  return closure.at({1, 1});
}

inline std::map<HaarIndex, double> unit_weights(const IndexSet& set) {
  std::map<HaarIndex, double> w;
  for (const auto& idx : set) w.emplace(idx, 1.0);
  return w;
}

/// Maximal number of members of `set` on a single branch.
inline int local_height(const IndexSet& set) {
  return static_cast<int>(branch_sum_extremes(unit_weights(set), set.max_level()).max);
}

/// Every branch meets `set` in exactly `height` members.
inline bool exact_local_height(const IndexSet& set, int height) {
  const BranchExtremes e = branch_sum_extremes(unit_weights(set), set.max_level());
  return static_cast<int>(e.min) == height && static_cast<int>(e.max) == height;
}

// ---------------------------------------------------------------------------
// Subtree identification: the two halves of D_2^n viewed as copies of D_1^(n-1).

enum class SubtreeSide { Left, Right };

inline std::optional<SubtreeSide> subtree_side(const HaarIndex& idx) {
  if (idx.level < 2) return std::nullopt;
  return idx.pos <= pow2(idx.level - 2) ? SubtreeSide::Left : SubtreeSide::Right;
}

/// (k, j) in the given half of D_2^n  ->  (k - 1, j') in D_1^(n-1).
inline HaarIndex to_subtree_frame(const HaarIndex& idx, SubtreeSide side) {
  return {idx.level - 1, side == SubtreeSide::Left ? idx.pos : idx.pos - pow2(idx.level - 2)};
}

inline HaarIndex from_subtree_frame(const HaarIndex& idx, SubtreeSide side) {
  return {idx.level + 1, side == SubtreeSide::Left ? idx.pos : idx.pos + pow2(idx.level - 1)};
}

inline IndexSet subtree_part(const IndexSet& set, SubtreeSide side) {
  IndexSet out;
  for (const auto& idx : set)
    if (subtree_side(idx) == side) out.insert(to_subtree_frame(idx, side));
  return out;
}

namespace detail {

inline HaarIndex first_free(const IndexSet& set, int depth) {
  for (int k = 1; k <= depth; ++k)
    for (std::int64_t j = 1; j <= pow2(k - 1); ++j)
      if (!set.contains({k, j})) return {k, j};
  throw PreconditionError("fill_one: the tree D_1^" + std::to_string(depth) + " is already full");
}

inline HaarIndex fill_one_unchecked(const IndexSet& set, int height, int depth) {
  if (height == 1 || depth == height) return first_free(set, depth);
  if (!set.contains({1, 1})) {
    return from_subtree_frame(fill_one_unchecked(subtree_part(set, SubtreeSide::Left), height, depth - 1),
                              SubtreeSide::Left);
  }
  const IndexSet left = subtree_part(set, SubtreeSide::Left);
  const IndexSet right = subtree_part(set, SubtreeSide::Right);
  const SubtreeSide side = right.size() < left.size() ? SubtreeSide::Right : SubtreeSide::Left;
  const IndexSet& smaller = side == SubtreeSide::Left ? left : right;
  return from_subtree_frame(fill_one_unchecked(smaller, height - 1, depth - 1), side);
}

inline void require_fill_preconditions(const IndexSet& set, int height, int depth, const char* op) {
  const std::string name(op);
  if (depth < 1 || height < 1 || height > depth) {
    throw DomainError(name + ": need 1 <= l <= n, got l=" + std::to_string(height) + ", n=" + std::to_string(depth));
  }
  require_level(depth, op);
  if (set.max_level() > depth) throw DomainError(name + ": set is not contained in D_1^" + std::to_string(depth));
  if (local_height(set) > height) {
    throw DomainError(name + ": local height " + std::to_string(local_height(set)) + " exceeds l=" +
                      std::to_string(height));
  }
  if (height < 62 && static_cast<std::int64_t>(set.size()) >= pow2(height) - 1) {
    throw DomainError(name + ": |F| = " + std::to_string(set.size()) + " is not below 2^l - 1");
  }
}

}  // namespace detail

/// An index of D_1^depth outside `set` whose addition keeps the local height
/// at most `height`. Recurses into the left half when the root is free, else
/// into the half holding fewer members with height - 1 (ties go left); the
/// base case returns the lexicographically first free index.
inline HaarIndex fill_one(const IndexSet& set, int height, int depth) {
  detail::require_fill_preconditions(set, height, depth, "fill_one");
  return detail::fill_one_unchecked(set, height, depth);
}

/// 2^height - 1 - |set| new indices of D_1^depth such that the union with
/// `set` has local height at most `height`.
inline IndexSet fill_to_height(const IndexSet& set, int height, int depth) {
  detail::require_fill_preconditions(set, height, depth, "fill_to_height");
  IndexSet grown = set;
  IndexSet added;
  while (static_cast<std::int64_t>(grown.size()) < pow2(height) - 1) {
    const HaarIndex next = detail::fill_one_unchecked(grown, height, depth);
    grown.insert(next);
    added.insert(next);
  }
  return added;
}

// ---------------------------------------------------------------------------
// Level-set partitions.

/// 2^((level - 1) / 2), the sup-norm of a Haar function on that level.
inline double haar_amplitude(int level) {
  const double base = std::ldexp(1.0, (level - 1) / 2);
  return (level - 1) % 2 == 0 ? base : base * 1.4142135623730950488;
}

/// 2^((k-1)/2) |x_k^(j)| for every index of the combination.
inline std::map<HaarIndex, double> weighted_magnitudes(const HaarCombination& f, const NormedSpaceSpec& space) {
  std::map<HaarIndex, double> w;
  for (const auto& [idx, x] : f) w.emplace(idx, haar_amplitude(idx.level) * space.norm_of(x));
  return w;
}

/// max over t of (sum over levels of |level-k part of f at t|^r)^(1/r).
/// Clamped below by the largest single weight, which the exact value
/// always dominates.
inline double threshold_base(const HaarCombination& f, int depth, double r,
                             const NormedSpaceSpec& space = NormedSpaceSpec{}) {
  if (r < 1.0 || r > 2.0) throw DomainError("threshold_base: exponent r must lie in [1,2]");
  if (f.max_level() > depth) throw DomainError("threshold_base: support not contained in D_1^" + std::to_string(depth));
  if (f.support().empty()) return 0.0;
  std::map<HaarIndex, double> powered;
  double largest = 0.0;
  for (const auto& [idx, w] : weighted_magnitudes(f, space)) {
    powered.emplace(idx, std::pow(w, r));
    largest = std::max(largest, w);
  }
  const double s = std::pow(branch_sum_extremes(powered, depth).max, 1.0 / r);
  return std::max(s, largest);
}

/// Pieces F_1, F_2, ... (pieces[l - 1] == F_l) of the nonzero coefficients by
/// the size of their weight relative to the threshold base.
struct PartitionFamily {
  std::vector<IndexSet> pieces;
  double threshold_base = 0.0;
  double exponent = 1.0;

  /// S / 2^(l / r); band l is (threshold(l), threshold(l - 1)].
  double threshold(int l) const { return threshold_base / std::pow(2.0, l / exponent); }
};

inline PartitionFamily level_set_partition(const HaarCombination& f, int depth, double r,
                                           const NormedSpaceSpec& space = NormedSpaceSpec{}) {
  PartitionFamily family;
  family.exponent = r;
  family.threshold_base = threshold_base(f, depth, r, space);
  if (family.threshold_base == 0.0) return family;

  for (const auto& [idx, w] : weighted_magnitudes(f, space)) {
    if (w == 0.0) continue;
    int l = std::max(1, static_cast<int>(std::floor(r * std::log2(family.threshold_base / w))));
    while (l > 1 && !(w <= family.threshold(l - 1))) --l;
    while (!(family.threshold(l) < w)) ++l;
    if (family.pieces.size() < static_cast<std::size_t>(l)) family.pieces.resize(static_cast<std::size_t>(l));
    family.pieces[static_cast<std::size_t>(l - 1)].insert(idx);
  }
  return family;
}

/// Pieces F'_1 .. F'_{m+1} with 2^m <= depth < 2^(m+1), partitioning D_1^depth.
struct GreedyFamily {
  std::vector<IndexSet> pieces;
  int m = 0;
  std::vector<bool> padded;  // per l <= m: fill_to_height was used
  double threshold_base = 0.0;
  double exponent = 1.0;
};

inline int floor_log2(int n) {
  int m = 0;
  while ((std::int64_t{2} << m) <= n) ++m;
  return m;
}

inline GreedyFamily greedy_family(const HaarCombination& f, int depth, double p,
                                  const NormedSpaceSpec& space = NormedSpaceSpec{}) {
  if (p < 1.0 || p >= 2.0) throw DomainError("greedy_family: exponent p must lie in [1,2)");
  if (depth < 1) throw DomainError("greedy_family: depth must be >= 1");
  const PartitionFamily base = level_set_partition(f, depth, p, space);

  GreedyFamily out;
  out.m = floor_log2(depth);
  out.threshold_base = base.threshold_base;
  out.exponent = p;
  IndexSet used;
  for (int l = 1; l <= out.m; ++l) {
    const IndexSet level_set =
        static_cast<std::size_t>(l) <= base.pieces.size() ? base.pieces[static_cast<std::size_t>(l - 1)] : IndexSet{};
    const std::int64_t target = pow2(static_cast<int>(pow2(l))) - 1;
    IndexSet piece;
    bool padded = false;
    if (base.threshold_base == 0.0 || static_cast<std::int64_t>(used.size() + level_set.size()) >= target) {
      piece = set_difference(level_set, used);
    } else {
      piece = set_difference(set_union(level_set, fill_to_height(level_set, static_cast<int>(pow2(l)), depth)), used);
      padded = true;
    }
    used = set_union(used, piece);
    out.pieces.push_back(std::move(piece));
    out.padded.push_back(padded);
  }
  out.pieces.push_back(set_difference(tree_band(1, depth), used));
  return out;
}

}  // namespace haarlab

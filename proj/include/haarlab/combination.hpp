#pragma once

#include <map>
#include <string>
#include <vector>

#include "haarlab/dyadic.hpp"

namespace haarlab {

using Vector = std::vector<double>;

/// Formal sum of Haar functions with vector coefficients in R^dim.
///
/// Keys that were inserted explicitly stay keys even when their coefficient
/// is the zero vector: indices() is the index frame of the sum (the set the
/// sum ranges over), support() only the keys with a nonzero coefficient.
class HaarCombination {
public:
  using Map = std::map<HaarIndex, Vector>;

  explicit HaarCombination(int dim = 1) : dim_(dim) {
    if (dim < 1) throw DomainError("HaarCombination dimension must be >= 1");
  }

  /// All indices of frame with zero coefficients.
  static HaarCombination zeros(const IndexSet& frame, int dim) {
    HaarCombination f(dim);
    for (const auto& idx : frame) f.set(idx, Vector(static_cast<std::size_t>(dim), 0.0));
    return f;
  }

  int dim() const { return dim_; }
  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }

  void set(const HaarIndex& idx, Vector x) {
    require_valid(idx);
    if (x.size() != static_cast<std::size_t>(dim_)) {
      throw DomainError("coefficient at " + idx.str() + " has dimension " + std::to_string(x.size()) +
                        ", expected " + std::to_string(dim_));
    }
    coeffs_[idx] = std::move(x);
  }

  const Vector* find(const HaarIndex& idx) const {
    const auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? nullptr : &it->second;
  }

  Vector& at(const HaarIndex& idx) { return coeffs_.at(idx); }
  const Vector& at(const HaarIndex& idx) const { return coeffs_.at(idx); }

  Map::const_iterator begin() const { return coeffs_.begin(); }
  Map::const_iterator end() const { return coeffs_.end(); }
  Map::iterator begin() { return coeffs_.begin(); }
  Map::iterator end() { return coeffs_.end(); }

  IndexSet indices() const {
    IndexSet out;
    for (const auto& [idx, x] : coeffs_) out.insert(idx);
    return out;
  }

  IndexSet support() const {
    IndexSet out;
    for (const auto& [idx, x] : coeffs_)
      for (double v : x)
        if (v != 0.0) {
          out.insert(idx);
          break;
        }
    return out;
  }

  int max_level() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first.level; }

  /// Restriction to the indices of part (absent indices are skipped).
  HaarCombination restricted_to(const IndexSet& part) const {
    HaarCombination out(dim_);
    for (const auto& [idx, x] : coeffs_)
      if (part.contains(idx)) out.set(idx, x);
    return out;
  }

  HaarCombination scaled(double c) const {
    HaarCombination out = *this;
    for (auto& [idx, x] : out.coeffs_)
      for (double& v : x) v *= c;
    return out;
  }

  friend bool operator==(const HaarCombination&, const HaarCombination&) = default;

private:
  int dim_;
  Map coeffs_;
};

}  // namespace haarlab

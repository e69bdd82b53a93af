#pragma once

#include <cmath>
#include <vector>

#include "haarlab/combinatorics.hpp"
#include "haarlab/normed_space.hpp"

namespace haarlab {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      carry_ += (sum_ - t) + v;
    else
      carry_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Values of the combination on the 2^depth cells of level `depth`
/// (constant there when depth >= max level).
inline std::vector<Vector> cell_values(const HaarCombination& f, int depth) {
  require_level(depth, "cell_values");
  if (f.max_level() > depth) throw DomainError("cell_values: depth below the combination's max level");
  const auto cells = static_cast<std::size_t>(pow2(depth));
  std::vector<Vector> values(cells, Vector(static_cast<std::size_t>(f.dim()), 0.0));
  for (const auto& [idx, x] : f) {
    const double amp = haar_amplitude(idx.level);
    const std::int64_t half = pow2(depth - idx.level);
    const std::int64_t first = (idx.pos - 1) * 2 * half;
    for (std::int64_t c = first; c < first + 2 * half; ++c) {
      const double s = c < first + half ? amp : -amp;
      Vector& v = values[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < x.size(); ++i) v[i] += s * x[i];
    }
  }
  return values;
}

/// || sum x chi | L_p(space) || by exact cellwise quadrature.
inline double lp_norm_of_combination(const HaarCombination& f, const NormedSpaceSpec& space, double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw DomainError("lp_norm_of_combination: need 1 <= p < infinity");
  if (f.empty()) return 0.0;
  const int depth = f.max_level();
  const double weight = std::ldexp(1.0, -depth);
  CompensatedSum acc;
  for (const auto& v : cell_values(f, depth)) acc.add(weight * std::pow(space.norm_of(v), p));
  return std::pow(acc.value(), 1.0 / p);
}

/// (sum_k || sum_j x_k^(j) chi_k^(j) | L_p ||^p)^(1/p), using that the
/// Haar functions of one level have disjoint supports:
/// || level k part ||_p^p = sum_j |x_k^(j)|^p 2^((k-1)(p/2-1)).
inline double levelwise_rhs_p(const HaarCombination& f, const NormedSpaceSpec& space, double p) {
  if (p < 1.0 || p > 2.0) throw DomainError("levelwise_rhs_p: need 1 <= p <= 2");
  CompensatedSum acc;
  for (const auto& [idx, x] : f)
    acc.add(std::pow(space.norm_of(x), p) * std::pow(2.0, (idx.level - 1) * (p / 2.0 - 1.0)));
  return std::pow(acc.value(), 1.0 / p);
}

}  // namespace haarlab

#pragma once

// The diagonal operator (xi_k) -> (k^(-1/p') xi_k) on l1 and the closed
// forms of its Haar type ideal norms.

#include <cmath>

#include "haarlab/normed_space.hpp"
#include "haarlab/quadrature.hpp"

namespace haarlab {

inline double conjugate_exponent(double p) { return p / (p - 1.0); }

inline void require_open_exponent(double p, const char* op) {
  if (!(p > 1.0 && p < 2.0)) throw DomainError(std::string(op) + ": exponent p must lie in (1,2)");
}

/// Diagonal operator on l1^dim with entries k^(-1/p'), k = 1..dim.
inline OperatorSpec diagonal_operator(int dim, double p) {
  require_open_exponent(p, "diagonal_operator");
  const double pc = conjugate_exponent(p);
  Vector entries(static_cast<std::size_t>(dim));
  for (int k = 1; k <= dim; ++k) entries[static_cast<std::size_t>(k - 1)] = std::pow(static_cast<double>(k), -1.0 / pc);
  return OperatorSpec::diagonal(NormedSpaceSpec::make(dim, NormKind::L1), std::move(entries));
}

/// (sum_{k<=n} k^(-2/p'))^(1/2)
inline double diagonal_formula_tau(long long n, double p) {
  require_open_exponent(p, "diagonal_formula_tau");
  if (n < 1) throw DomainError("diagonal_formula_tau: n must be >= 1");
  const double e = -2.0 / conjugate_exponent(p);
  CompensatedSum acc;
  for (long long k = 1; k <= n; ++k) acc.add(std::pow(static_cast<double>(k), e));
  return std::sqrt(acc.value());
}

/// (sum_{k<=n} 1/k)^(1/p')
inline double diagonal_formula_tau_p(long long n, double p) {
  require_open_exponent(p, "diagonal_formula_tau_p");
  if (n < 1) throw DomainError("diagonal_formula_tau_p: n must be >= 1");
  CompensatedSum acc;
  for (long long k = 1; k <= n; ++k) acc.add(1.0 / static_cast<double>(k));
  return std::pow(acc.value(), 1.0 / conjugate_exponent(p));
}

/// n^(1/p - 1/2), the weak-type growth rate.
inline double weak_type_rate(long long n, double p) { return std::pow(static_cast<double>(n), 1.0 / p - 0.5); }

/// 1/2 (1 + ln n)^(1/p')
inline double log_lower_bound(long long n, double p) {
  return 0.5 * std::pow(1.0 + std::log(static_cast<double>(n)), 1.0 / conjugate_exponent(p));
}

/// (p'/(p'-2))^(1/2): sum_{k<=n} k^(-a) <= n^(1-a)/(1-a) for 0 < a < 1 turns
/// into diagonal_formula_tau(n, p) <= this * n^(1/p - 1/2).
inline double weak_type_constant(double p) {
  require_open_exponent(p, "weak_type_constant");
  const double pc = conjugate_exponent(p);
  return std::sqrt(pc / (pc - 2.0));
}

}  // namespace haarlab

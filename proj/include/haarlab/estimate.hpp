#pragma once

// Lower-bound estimation of the Haar type ideal norms
//
//   tau(T | H(F))      = sup || sum_F T x chi |L_2|| / (sum_F |x|^2)^(1/2)
//   tau_p(T | H(D_1^n)) = sup || sum T x chi |L_p|| / levelwise_rhs_p(x)
//
// For non-Hilbert norms this is a nonconvex maximization of a ratio of
// norms, so every result is the ratio attained by an explicit witness, i.e.
// a certified lower bound. Strategies:
//   PowerIteration      l2 -> l2: the ratio equals the operator norm
//                       (Parseval); power iteration on T^T T.
//   CoordinateAligned   each coefficient restricted to a multiple of one
//                       basis vector; the no-cancellation quadratic form of a
//                       coordinate pattern gives a Perron start, then ascent.
//   RandomRestartAscent normalized subgradient ascent on log R with
//                       backtracking, from level-balanced Gaussian starts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "haarlab/combinatorics.hpp"
#include "haarlab/normed_space.hpp"
#include "haarlab/quadrature.hpp"

namespace haarlab {

struct EstimateBudget {
  int restarts = 8;
  int iterations = 400;
  std::uint64_t seed = 1;
  int workers = 1;
  int pattern_cap = 64;
};

enum class EstimateMethod { PowerIteration, CoordinateAligned, RandomRestartAscent };

inline std::string to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::PowerIteration: return "power_iteration";
    case EstimateMethod::CoordinateAligned: return "coordinate_aligned";
    case EstimateMethod::RandomRestartAscent: return "random_restart_ascent";
  }
  return "?";
}

struct TauEstimate {
  double lower_bound = 0.0;
  HaarCombination witness;
  EstimateMethod method = EstimateMethod::RandomRestartAscent;
  int restarts = 0;
  int iterations = 0;
};

/// ||T f | L_2|| / (sum |x|_X^2)^(1/2); 0 for the zero family.
inline double tau_ratio(const OperatorSpec& op, const HaarCombination& f) {
  const double den = std::sqrt(coefficient_energy(f, op.domain()));
  if (den == 0.0) return 0.0;
  return lp_norm_of_combination(apply(op, f), op.codomain(), 2.0) / den;
}

/// ||T f | L_p|| / levelwise_rhs_p(f); 0 for the zero family.
inline double tau_p_ratio(const OperatorSpec& op, const HaarCombination& f, double p) {
  const double den = levelwise_rhs_p(f, op.domain(), p);
  if (den == 0.0) return 0.0;
  return lp_norm_of_combination(apply(op, f), op.codomain(), p) / den;
}

/// Runs fn(0..count-1) on up to `workers` threads; results in index order.
template <class Result>
std::vector<Result> parallel_indexed(int count, int workers, const std::function<Result(int)>& fn) {
  std::vector<Result> out(static_cast<std::size_t>(count));
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) out[static_cast<std::size_t>(i)] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

namespace detail {

enum class Denominator { EnergyL2, LevelwiseP };

/// The ratio objective over a fixed frame, flattened to R^(|F| * dim).
class RatioObjective {
public:
  RatioObjective(const OperatorSpec& op, const IndexSet& frame, double q, Denominator den)
      : op_(op), frame_(frame.begin(), frame.end()), q_(q), den_(den) {
    depth_ = frame.max_level();
    cells_ = pow2(depth_);
    weight_ = std::ldexp(1.0, -depth_);
    for (const auto& idx : frame_) {
      amp_.push_back(haar_amplitude(idx.level));
      level_factor_.push_back(std::pow(2.0, (idx.level - 1) * (q_ / 2.0 - 1.0)));
    }
  }

  std::size_t terms() const { return frame_.size(); }
  int dim() const { return op_.domain().dim; }
  std::size_t size() const { return terms() * static_cast<std::size_t>(dim()); }
  const std::vector<HaarIndex>& frame() const { return frame_; }
  double amplitude(std::size_t i) const { return amp_[i]; }
  std::int64_t cells() const { return cells_; }
  double cell_weight() const { return weight_; }

  std::pair<std::int64_t, std::int64_t> cell_range(std::size_t i) const {
    const std::int64_t half = pow2(depth_ - frame_[i].level);
    const std::int64_t first = (frame_[i].pos - 1) * 2 * half;
    return {first, half};
  }

  Vector coefficient(const Vector& x, std::size_t i) const {
    const auto d = static_cast<std::size_t>(dim());
    return Vector(x.begin() + static_cast<std::ptrdiff_t>(i * d), x.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
  }

  std::vector<Vector> image_cells(const Vector& x) const {
    const auto e = static_cast<std::size_t>(op_.codomain().dim);
    std::vector<Vector> g(static_cast<std::size_t>(cells_), Vector(e, 0.0));
    for (std::size_t i = 0; i < terms(); ++i) {
      const Vector tx = op_.apply(coefficient(x, i));
      const auto [first, half] = cell_range(i);
      for (std::int64_t c = first; c < first + 2 * half; ++c) {
        const double s = c < first + half ? amp_[i] : -amp_[i];
        Vector& v = g[static_cast<std::size_t>(c)];
        for (std::size_t r = 0; r < e; ++r) v[r] += s * tx[r];
      }
    }
    return g;
  }

  double numerator(const Vector& x) const {
    CompensatedSum acc;
    for (const auto& v : image_cells(x)) acc.add(weight_ * std::pow(op_.codomain().norm_of(v), q_));
    return std::pow(acc.value(), 1.0 / q_);
  }

  double denominator(const Vector& x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < terms(); ++i) {
      const double n = op_.domain().norm_of(coefficient(x, i));
      acc += den_ == Denominator::EnergyL2 ? n * n : level_factor_[i] * std::pow(n, q_);
    }
    return den_ == Denominator::EnergyL2 ? std::sqrt(acc) : std::pow(acc, 1.0 / q_);
  }

  double ratio(const Vector& x) const {
    const double d = denominator(x);
    return d == 0.0 ? 0.0 : numerator(x) / d;
  }

  void normalize(Vector& x) const {
    const double d = denominator(x);
    if (d > 0)
      for (double& v : x) v /= d;
  }

  /// A subgradient of log R at x (x must have nonzero numerator).
  Vector log_ratio_gradient(const Vector& x) const {
    const auto d = static_cast<std::size_t>(dim());
    const std::vector<Vector> g = image_cells(x);
    std::vector<double> norms(g.size());
    CompensatedSum acc;
    for (std::size_t c = 0; c < g.size(); ++c) {
      norms[c] = op_.codomain().norm_of(g[c]);
      acc.add(weight_ * std::pow(norms[c], q_));
    }
    const double num_q = acc.value();
    Vector grad(size(), 0.0);
    if (num_q <= 0.0) return grad;
    // d log N = (1/N^q) sum_c w |g_c|^(q-1) <s_c, dg_c>
    std::vector<Vector> dual(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
      dual[c] = op_.codomain().subgradient(g[c]);
      const double scale = weight_ * std::pow(norms[c], q_ - 1.0) / num_q;
      for (double& v : dual[c]) v *= scale;
    }
    double den_acc = 0.0;
    std::vector<double> coeff_norm(terms());
    for (std::size_t i = 0; i < terms(); ++i) {
      coeff_norm[i] = op_.domain().norm_of(coefficient(x, i));
      den_acc += den_ == Denominator::EnergyL2 ? coeff_norm[i] * coeff_norm[i]
                                               : level_factor_[i] * std::pow(coeff_norm[i], q_);
    }
    for (std::size_t i = 0; i < terms(); ++i) {
      const auto [first, half] = cell_range(i);
      Vector pulled(static_cast<std::size_t>(op_.codomain().dim), 0.0);
      for (std::int64_t c = first; c < first + 2 * half; ++c) {
        const double s = c < first + half ? amp_[i] : -amp_[i];
        const Vector& u = dual[static_cast<std::size_t>(c)];
        for (std::size_t r = 0; r < pulled.size(); ++r) pulled[r] += s * u[r];
      }
      const Vector back = op_.apply_transpose(pulled);
      const Vector sx = op_.domain().subgradient(coefficient(x, i));
      // d log D = (1/D^q) * factor * |x_i|^(q-1) s_x  (q = 2 for the energy form)
      const double den_scale = den_acc > 0.0
                                   ? (den_ == Denominator::EnergyL2
                                          ? coeff_norm[i] / den_acc
                                          : level_factor_[i] * std::pow(coeff_norm[i], q_ - 1.0) / den_acc)
                                   : 0.0;
      for (std::size_t r = 0; r < d; ++r) grad[i * d + r] = back[r] - den_scale * sx[r];
    }
    return grad;
  }

  HaarCombination to_combination(const Vector& x) const {
    HaarCombination f(dim());
    for (std::size_t i = 0; i < terms(); ++i) f.set(frame_[i], coefficient(x, i));
    return f;
  }

private:
  const OperatorSpec& op_;
  std::vector<HaarIndex> frame_;
  double q_;
  Denominator den_;
  int depth_ = 0;
  std::int64_t cells_ = 1;
  double weight_ = 1.0;
  std::vector<double> amp_;
  std::vector<double> level_factor_;
};

struct AscentResult {
  Vector x;
  double ratio = 0.0;
  int iterations = 0;
};

/// Monotone normalized ascent: steps along the log-ratio subgradient are kept
/// only when the ratio increases; the step grows on success, halves on
/// failure, and the run stops when it underflows.
inline AscentResult ascend(const RatioObjective& obj, Vector x, int iterations) {
  obj.normalize(x);
  double best = obj.ratio(x);
  double step = 0.25;
  int used = 0;
  for (; used < iterations && step > 1e-12; ++used) {
    const Vector g = obj.log_ratio_gradient(x);
    double gn = 0.0, xn = 0.0;
    for (double v : g) gn += v * v;
    for (double v : x) xn += v * v;
    gn = std::sqrt(gn);
    xn = std::sqrt(xn);
    if (gn == 0.0 || xn == 0.0) break;
    Vector trial = x;
    for (std::size_t i = 0; i < x.size(); ++i) trial[i] += step * xn * g[i] / gn;
    obj.normalize(trial);
    const double r = obj.ratio(trial);
    if (r > best) {
      best = r;
      x = std::move(trial);
      step = std::min(1.0, step * 1.5);
    } else {
      step *= 0.5;
    }
  }
  return {std::move(x), best, used};
}

/// Perron vector of the no-cancellation quadratic form of a coordinate
/// pattern, as a flattened coefficient vector.
inline Vector perron_start(const RatioObjective& obj, const OperatorSpec& op, const std::vector<int>& pattern) {
  const std::size_t n = obj.terms();
  const auto d = static_cast<std::size_t>(obj.dim());
  std::vector<double> col(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector e(d, 0.0);
    e[static_cast<std::size_t>(pattern[i])] = 1.0;
    col[i] = op.codomain().norm_of(op.apply(e)) * obj.amplitude(i);
  }
  std::vector<double> v(n, 1.0), u(static_cast<std::size_t>(obj.cells()));
  for (int it = 0; it < 300; ++it) {
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto [first, half] = obj.cell_range(i);
      for (std::int64_t c = first; c < first + 2 * half; ++c) u[static_cast<std::size_t>(c)] += col[i] * v[i];
    }
    std::vector<double> next(n, 0.0);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [first, half] = obj.cell_range(i);
      for (std::int64_t c = first; c < first + 2 * half; ++c) next[i] += col[i] * u[static_cast<std::size_t>(c)];
      norm += next[i] * next[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    for (double& a : next) a /= norm;
    v = std::move(next);
  }
  Vector x(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) x[i * d + static_cast<std::size_t>(pattern[i])] = v[i];
  return x;
}

/// Deterministic patterns first (by level, by depth inside the frame, one
/// coordinate throughout), then random ones, up to the cap.
inline std::vector<std::vector<int>> coordinate_patterns(const std::vector<HaarIndex>& frame, int dim, int cap,
                                                         std::mt19937_64& rng) {
  std::vector<std::vector<int>> out;
  const std::size_t n = frame.size();
  double total = 1.0;
  for (std::size_t i = 0; i < n && total < 1e9; ++i) total *= std::min(4, dim);
  const auto limit = static_cast<std::size_t>(std::min<double>(cap, total));
  auto push = [&](std::vector<int> p) {
    if (out.size() < limit && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  };

  std::vector<int> by_level(n), by_depth(n);
  IndexSet members;
  for (const auto& idx : frame) members.insert(idx);
  for (std::size_t i = 0; i < n; ++i) {
    by_level[i] = std::min(frame[i].level, dim) - 1;
    int depth = 0;
    for (HaarIndex a = frame[i];; a = parent(a)) {
      if (members.contains(a)) ++depth;
      if (a.level == 1) break;
    }
    by_depth[i] = std::min(depth, dim) - 1;
  }
  push(by_depth);
  push(by_level);
  for (int c = 0; c < dim; ++c) push(std::vector<int>(n, c));
  std::uniform_int_distribution<int> pick(0, dim - 1);
  for (std::size_t attempt = 0; out.size() < limit && attempt < 8 * limit; ++attempt) {
    std::vector<int> p(n);
    for (auto& c : p) c = pick(rng);
    push(std::move(p));
  }
  return out;
}

inline Vector balanced_gaussian_start(const RatioObjective& obj, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<std::size_t>(obj.dim());
  Vector x(obj.size());
  for (std::size_t i = 0; i < obj.terms(); ++i)
    for (std::size_t r = 0; r < d; ++r) x[i * d + r] = normal(rng) / obj.amplitude(i);
  return x;
}

/// Largest eigenvalue of T^T T and its eigenvector by power iteration.
inline std::pair<double, Vector> top_singular_pair(const OperatorSpec& op, int iterations) {
  const auto d = static_cast<std::size_t>(op.domain().dim);
  Vector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i) / static_cast<double>(d);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    double vn = 0.0;
    for (double a : v) vn += a * a;
    vn = std::sqrt(vn);
    for (double& a : v) a /= vn;
    const Vector w = op.apply_transpose(op.apply(v));
    double rq = 0.0, wn = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      rq += v[i] * w[i];
      wn += w[i] * w[i];
    }
    if (wn == 0.0) return {0.0, v};
    const bool settled = it > 10 && std::abs(rq - lambda) <= 1e-15 * std::abs(rq);
    lambda = rq;
    v = w;
    if (settled) break;
  }
  double vn = 0.0;
  for (double a : v) vn += a * a;
  vn = std::sqrt(vn);
  for (double& a : v) a /= vn;
  return {lambda, v};
}

struct Candidate {
  Vector x;
  double ratio = -1.0;
  EstimateMethod method = EstimateMethod::RandomRestartAscent;
  int iterations = 0;
};

inline TauEstimate estimate_ratio(const OperatorSpec& op, const IndexSet& frame, double q, Denominator den,
                                  const EstimateBudget& budget) {
  if (frame.empty()) throw DomainError("tau estimate: empty index set");
  if (budget.restarts < 1 || budget.iterations < 1) {
    throw DomainError("tau estimate: restarts and iterations must both be positive");
  }
  const RatioObjective obj(op, frame, q, den);
  const bool parseval = op.hilbert_to_hilbert() && q == 2.0;

  TauEstimate best;
  best.restarts = budget.restarts;
  if (parseval) {
    const auto [lambda, v] = top_singular_pair(op, std::max(budget.iterations, 20000));
    HaarCombination w = HaarCombination::zeros(frame, op.domain().dim);
    w.at(*frame.begin()) = v;
    if (den == Denominator::LevelwiseP) w = w.scaled(1.0 / levelwise_rhs_p(w, op.domain(), q));
    best.witness = std::move(w);
    best.method = EstimateMethod::PowerIteration;
    best.iterations = budget.iterations;
  } else {
    std::mt19937_64 pattern_rng(budget.seed ^ 0x9e3779b97f4a7c15ULL);
    const auto patterns = coordinate_patterns(obj.frame(), obj.dim(), budget.pattern_cap, pattern_rng);
    const int jobs = static_cast<int>(patterns.size()) + budget.restarts;
    const std::function<Candidate(int)> run = [&](int job) {
      Candidate c;
      if (job < static_cast<int>(patterns.size())) {
        const AscentResult r = ascend(obj, perron_start(obj, op, patterns[static_cast<std::size_t>(job)]), budget.iterations);
        c = {r.x, r.ratio, EstimateMethod::CoordinateAligned, r.iterations};
      } else {
        std::mt19937_64 rng(budget.seed + 0x100000001b3ULL * static_cast<std::uint64_t>(job));
        const AscentResult r = ascend(obj, balanced_gaussian_start(obj, rng), budget.iterations);
        c = {r.x, r.ratio, EstimateMethod::RandomRestartAscent, r.iterations};
      }
      return c;
    };
    const auto results = parallel_indexed<Candidate>(jobs, budget.workers, run);
    const Candidate* top = &results.front();
    int total = 0;
    for (const auto& c : results) {
      total += c.iterations;
      if (c.ratio > top->ratio) top = &c;
    }
    best.witness = obj.to_combination(top->x);
    best.method = top->method;
    best.iterations = total;
  }
  best.lower_bound = den == Denominator::EnergyL2 ? tau_ratio(op, best.witness) : tau_p_ratio(op, best.witness, q);
  return best;
}

}  // namespace detail

inline TauEstimate tau_estimate(const OperatorSpec& op, const IndexSet& frame, const EstimateBudget& budget) {
  return detail::estimate_ratio(op, frame, 2.0, detail::Denominator::EnergyL2, budget);
}

inline TauEstimate tau_p_estimate(const OperatorSpec& op, int depth, double p, const EstimateBudget& budget) {
  if (p < 1.0 || p > 2.0) throw DomainError("tau_p_estimate: need 1 <= p <= 2");
  if (depth < 1) throw DomainError("tau_p_estimate: need n >= 1");
  return detail::estimate_ratio(op, tree_band(1, depth), p, detail::Denominator::LevelwiseP, budget);
}

}  // namespace haarlab

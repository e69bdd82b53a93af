#pragma once

// Desk-scale checks of the comparison results: estimates on different index
// sets side by side, plus the constructive mechanisms behind them (pushing a
// witness through a compression trace, halving a band witness, the level-set
// triangle chain).

#include <cmath>
#include <vector>

#include "haarlab/combinatorics.hpp"
#include "haarlab/estimate.hpp"
#include "haarlab/quadrature.hpp"
#include "haarlab/transforms.hpp"

namespace haarlab {

inline constexpr double kDefaultOptimizerTolerance = 2e-2;
inline constexpr double kQuadratureTolerance = 1e-9;

/// Given a combination on levels >= 2 (a band D_{m+1}^{n+1}), returns the
/// half (left or right subtree, identified with D_m^n) with the larger
/// tau ratio; its ratio is at least the ratio of the input. Ties go left.
inline HaarCombination descend_band(const OperatorSpec& op, const HaarCombination& f) {
  HaarCombination halves[2] = {HaarCombination(f.dim()), HaarCombination(f.dim())};
  for (const auto& [idx, x] : f) {
    const auto side = subtree_side(idx);
    if (!side) throw DomainError("descend_band: index " + idx.str() + " is on level 1");
    halves[*side == SubtreeSide::Left ? 0 : 1].set(to_subtree_frame(idx, *side), x);
  }
  return tau_ratio(op, halves[1]) > tau_ratio(op, halves[0]) ? halves[1] : halves[0];
}

struct ComparisonReport {
  int height = 0;
  bool exact_height = false;
  TauEstimate on_set;
  TauEstimate on_tree;
  CompressionTrace trace;
  double l2_residual = 0.0;      // max relative drift of ||T f|L_2|| along the trace
  double energy_residual = 0.0;  // max relative drift of sum |x|^2 along the trace
  double transferred_ratio = 0.0;  // witness after compression and band halving, on D_1^n
  double tolerance = kDefaultOptimizerTolerance;

  bool inequality_holds() const { return on_set.lower_bound <= on_tree.lower_bound * (1.0 + tolerance); }
  bool residuals_small() const { return l2_residual < kQuadratureTolerance && energy_residual < kQuadratureTolerance; }
  bool transfer_holds() const { return transferred_ratio >= on_set.lower_bound * (1.0 - kQuadratureTolerance); }
  bool agreement_holds() const {
    return !exact_height || std::abs(on_set.lower_bound - on_tree.lower_bound) <= tolerance * on_tree.lower_bound;
  }
  bool passed() const { return inequality_holds() && residuals_small() && transfer_holds() && agreement_holds(); }
};

inline double relative_drift(double value, double reference) {
  if (reference == 0.0) return std::abs(value);
  return std::abs(value - reference) / std::abs(reference);
}

/// Pushes `witness` (whose frame must be trace.initial) through the trace.
/// Returns the final combination and writes the two invariance residuals.
inline HaarCombination push_through_trace(const OperatorSpec& op, HaarCombination witness,
                                          const CompressionTrace& trace, double& l2_residual,
                                          double& energy_residual) {
  const double l2_ref = lp_norm_of_combination(apply(op, witness), op.codomain(), 2.0);
  const double energy_ref = coefficient_energy(witness, op.domain());
  l2_residual = energy_residual = 0.0;
  for (const auto& step : trace.steps) {
    witness = rewrite_combination(witness, step);
    l2_residual = std::max(l2_residual, relative_drift(lp_norm_of_combination(apply(op, witness), op.codomain(), 2.0), l2_ref));
    energy_residual = std::max(energy_residual, relative_drift(coefficient_energy(witness, op.domain()), energy_ref));
  }
  return witness;
}

inline ComparisonReport comparison_check(const OperatorSpec& op, const IndexSet& set, const EstimateBudget& budget,
                                         double tolerance = kDefaultOptimizerTolerance) {
  if (set.empty()) throw DomainError("comparison_check: empty index set");
  ComparisonReport rep;
  rep.tolerance = tolerance;
  rep.height = local_height(set);
  rep.exact_height = exact_local_height(set, rep.height);
  rep.on_set = tau_estimate(op, set, budget);
  rep.on_tree = tau_estimate(op, tree_band(1, rep.height), budget);
  rep.trace = compress(set);

  HaarCombination pushed = push_through_trace(op, rep.on_set.witness, rep.trace, rep.l2_residual, rep.energy_residual);
  for (int i = 0; i < rep.trace.m; ++i) pushed = descend_band(op, pushed);
  rep.transferred_ratio = tau_ratio(op, pushed);
  return rep;
}

struct MonotonicityReport {
  int m = 1;
  int n = 1;
  double shifted_band = 0.0;   // D_{m+1}^{n+1}
  double band = 0.0;           // D_m^n
  double aligned_band = 0.0;   // D_{m+1}^{m+n}
  double tree = 0.0;           // D_1^n
  double halved_ratio = 0.0;   // witness of D_{m+1}^{n+1} halved onto D_m^n
  double tolerance = kDefaultOptimizerTolerance;

  bool shift_inequality_holds() const { return shifted_band <= band * (1.0 + tolerance); }
  bool aligned_upper_holds() const { return aligned_band <= tree * (1.0 + tolerance); }
  bool aligned_lower_holds() const { return aligned_band >= tree * (1.0 - tolerance); }
  bool halving_holds() const { return halved_ratio >= shifted_band * (1.0 - kQuadratureTolerance); }
  bool passed() const {
    return shift_inequality_holds() && aligned_upper_holds() && aligned_lower_holds() && halving_holds();
  }
};

inline MonotonicityReport monotonicity_check(const OperatorSpec& op, int m, int n, const EstimateBudget& budget,
                                             double tolerance = kDefaultOptimizerTolerance) {
  if (m < 1 || n < m) throw DomainError("monotonicity_check: need n >= m >= 1");
  MonotonicityReport rep;
  rep.m = m;
  rep.n = n;
  rep.tolerance = tolerance;
  const TauEstimate shifted = tau_estimate(op, tree_band(m + 1, n + 1), budget);
  rep.shifted_band = shifted.lower_bound;
  rep.band = tau_estimate(op, tree_band(m, n), budget).lower_bound;
  rep.aligned_band = tau_estimate(op, tree_band(m + 1, m + n), budget).lower_bound;
  rep.tree = tau_estimate(op, tree_band(1, n), budget).lower_bound;
  rep.halved_ratio = tau_ratio(op, descend_band(op, shifted.witness));
  return rep;
}

struct TrianglePiece {
  int l = 0;
  std::size_t size = 0;
  double l2_norm = 0.0;       // ||T f restricted to F_l | L_2||
  double energy = 0.0;        // sum over F_l of |x|^2
  double energy_bound = 0.0;  // 2^(2/r) 2^(l(1-2/r)) S_r^2
  int max_branch_count = 0;   // max_t |F_l cap B(t)|
};

struct TriangleReport {
  double exponent = 1.0;
  double threshold_base = 0.0;
  bool decomposition_exact = false;
  double total_l2 = 0.0;
  double piece_sum = 0.0;
  std::vector<TrianglePiece> pieces;

  bool triangle_holds() const { return total_l2 <= piece_sum + kQuadratureTolerance; }
  bool energy_bounds_hold() const {
    for (const auto& p : pieces)
      if (p.energy > p.energy_bound * (1.0 + kQuadratureTolerance)) return false;
    return true;
  }
  bool branch_counts_hold() const {
    for (const auto& p : pieces)
      if (p.l < 62 && p.max_branch_count >= pow2(p.l)) return false;
    return true;
  }
  bool passed() const { return decomposition_exact && triangle_holds() && energy_bounds_hold() && branch_counts_hold(); }
};

/// Exact check that the pieces reproduce f pointwise: on every cell of the
/// finest level, the indices of f with nonzero coefficient on the branch
/// are exactly the indices of the pieces on that branch, each counted once.
inline bool partition_reproduces(const HaarCombination& f, const std::vector<IndexSet>& pieces) {
  const int depth = std::max(1, f.max_level());
  const IndexSet supp = f.support();
  for (const auto& t : dyadic_grid(depth)) {
    const IndexSet br = branch(t, depth);
    std::vector<HaarIndex> from_pieces;
    for (const auto& piece : pieces)
      for (const auto& idx : piece)
        if (br.contains(idx)) from_pieces.push_back(idx);
    std::vector<HaarIndex> from_f;
    for (const auto& idx : supp)
      if (br.contains(idx)) from_f.push_back(idx);
    std::sort(from_pieces.begin(), from_pieces.end());
    if (from_pieces != from_f) return false;
  }
  return true;
}

inline TriangleReport triangle_chain_check(const OperatorSpec& op, const HaarCombination& f, double r) {
  TriangleReport rep;
  rep.exponent = r;
  const int depth = std::max(1, f.max_level());
  const PartitionFamily family = level_set_partition(f, depth, r, op.domain());
  rep.threshold_base = family.threshold_base;
  rep.decomposition_exact = partition_reproduces(f, family.pieces);
  rep.total_l2 = lp_norm_of_combination(apply(op, f), op.codomain(), 2.0);
  CompensatedSum sum;
  for (std::size_t i = 0; i < family.pieces.size(); ++i) {
    TrianglePiece piece;
    piece.l = static_cast<int>(i) + 1;
    const HaarCombination part = f.restricted_to(family.pieces[i]);
    piece.size = family.pieces[i].size();
    piece.l2_norm = lp_norm_of_combination(apply(op, part), op.codomain(), 2.0);
    piece.energy = coefficient_energy(part, op.domain());
    piece.energy_bound = std::pow(2.0, 2.0 / r) * std::pow(2.0, piece.l * (1.0 - 2.0 / r)) *
                         family.threshold_base * family.threshold_base;
    piece.max_branch_count = local_height(family.pieces[i]);
    sum.add(piece.l2_norm);
    rep.pieces.push_back(piece);
  }
  rep.piece_sum = sum.value();
  return rep;
}

}  // namespace haarlab

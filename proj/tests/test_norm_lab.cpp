#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "oracles.hpp"

using namespace haarlab;

namespace {

HaarCombination family(int dim, std::initializer_list<std::pair<HaarIndex, Vector>> entries) {
  HaarCombination f(dim);
  for (const auto& [idx, x] : entries) f.set(idx, x);
  return f;
}

double largest_singular_value(const OperatorSpec& op) {
  const auto rows = op.matrix();
  Eigen::MatrixXd m(rows.size(), op.domain().dim);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

OperatorSpec random_dense(int rows, int cols, std::mt19937_64& rng, NormKind in = NormKind::L2,
                          NormKind out = NormKind::L2) {
  std::normal_distribution<double> normal;
  std::vector<Vector> m(static_cast<std::size_t>(rows), Vector(static_cast<std::size_t>(cols)));
  for (auto& r : m)
    for (double& v : r) v = normal(rng);
  return OperatorSpec::dense(NormedSpaceSpec::make(cols, in), NormedSpaceSpec::make(rows, out), m);
}

EstimateBudget budget() { return {}; }

}  // namespace

TEST(NormedSpace, NormsAndAxioms) {
  const Vector x{3.0, -4.0};
  EXPECT_DOUBLE_EQ(NormedSpaceSpec::make(2, NormKind::L1).norm_of(x), 7.0);
  EXPECT_DOUBLE_EQ(NormedSpaceSpec::make(2, NormKind::L2).norm_of(x), 5.0);
  EXPECT_DOUBLE_EQ(NormedSpaceSpec::make(2, NormKind::Linf).norm_of(x), 4.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  for (NormKind kind : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
    const NormedSpaceSpec space = NormedSpaceSpec::make(4, kind);
    for (int trial = 0; trial < 100; ++trial) {
      Vector a(4), b(4), sum(4);
      for (std::size_t i = 0; i < 4; ++i) {
        a[i] = normal(rng);
        b[i] = normal(rng);
        sum[i] = a[i] + b[i];
      }
      EXPECT_LE(space.norm_of(sum), space.norm_of(a) + space.norm_of(b) + 1e-12);
      Vector scaled = a;
      for (double& v : scaled) v *= -2.5;
      EXPECT_NEAR(space.norm_of(scaled), 2.5 * space.norm_of(a), 1e-12);
      const Vector s = space.subgradient(a);
      double pairing = 0;
      for (std::size_t i = 0; i < 4; ++i) pairing += s[i] * a[i];
      EXPECT_NEAR(pairing, space.norm_of(a), 1e-12);
    }
  }
  EXPECT_THROW(NormedSpaceSpec::make(0, NormKind::L2), DomainError);
}

TEST(OperatorSpec, ShapeErrors) {
  const NormedSpaceSpec two = NormedSpaceSpec::make(2, NormKind::L2);
  EXPECT_THROW(OperatorSpec::diagonal(two, {1.0}), DomainError);
  EXPECT_THROW(OperatorSpec::dense(two, two, {{1.0, 2.0}}), DomainError);
  EXPECT_THROW(OperatorSpec::dense(two, two, {{1.0}, {2.0}}), DomainError);
  const OperatorSpec op = OperatorSpec::identity(two);
  EXPECT_THROW(apply(op, family(3, {{{1, 1}, {1.0, 0.0, 0.0}}})), DomainError);
}

TEST(Quadrature, LpNormExamples) {
  const NormedSpaceSpec scalar;
  EXPECT_DOUBLE_EQ(lp_norm_of_combination(family(1, {{{1, 1}, {1.0}}}), scalar, 2.0), 1.0);
  EXPECT_NEAR(lp_norm_of_combination(family(1, {{{1, 1}, {1.0}}, {{2, 1}, {1.0}}}), scalar, 2.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(lp_norm_of_combination(family(1, {{{2, 1}, {1.0}}}), scalar, 1.0), std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_EQ(lp_norm_of_combination(HaarCombination(1), scalar, 1.5), 0.0);
  EXPECT_THROW(lp_norm_of_combination(family(1, {{{1, 1}, {1.0}}}), scalar, 0.5), DomainError);
}

TEST(Quadrature, LevelwiseRhsExamples) {
  const NormedSpaceSpec scalar;
  const HaarCombination f = family(1, {{{1, 1}, {1.0}}, {{2, 1}, {1.0}}});
  EXPECT_NEAR(levelwise_rhs_p(f, scalar, 2.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(levelwise_rhs_p(f, scalar, 1.0), 1.0 + std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_THROW(levelwise_rhs_p(f, scalar, 2.5), DomainError);
}

TEST(Quadrature, AgreesWithLongDoubleOracleAndParseval) {
  std::mt19937_64 rng(8);
  for (NormKind kind : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
    const NormedSpaceSpec space = NormedSpaceSpec::make(3, kind);
    for (int trial = 0; trial < 50; ++trial) {
      const HaarCombination f = random_family(random_index_set(6, rng), 3, rng);
      for (double p : {1.0, 4.0 / 3.0, 2.0}) {
        const double expected = oracle::lp_norm(f, kind, p, f.max_level());
        EXPECT_NEAR(lp_norm_of_combination(f, space, p), expected, 1e-12 * expected);
      }
      if (kind == NormKind::L2) {
        const double energy = oracle::energy(f, kind);
        EXPECT_NEAR(std::pow(lp_norm_of_combination(f, space, 2.0), 2), energy, 1e-12 * energy);
        EXPECT_NEAR(std::pow(levelwise_rhs_p(f, space, 2.0), 2), energy, 1e-12 * energy);
      }
    }
  }
}

TEST(TauEstimate, HilbertOperatorsMatchLargestSingularValue) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    const int cols = 1 + static_cast<int>(rng() % 4);
    const OperatorSpec op = random_dense(rows, cols, rng);
    const TauEstimate est = tau_estimate(op, random_index_set(4, rng), budget());
    EXPECT_EQ(est.method, EstimateMethod::PowerIteration);
    EXPECT_NEAR(est.lower_bound, largest_singular_value(op), 1e-8);
    EXPECT_NEAR(tau_ratio(op, est.witness), est.lower_bound, 1e-12);
  }
}

TEST(TauEstimate, SpecExamples) {
  const OperatorSpec id = OperatorSpec::identity(NormedSpaceSpec::make(3, NormKind::L2));
  EXPECT_NEAR(tau_estimate(id, tree_band(1, 4), budget()).lower_bound, 1.0, 1e-12);
  const OperatorSpec d = OperatorSpec::dense(NormedSpaceSpec::make(2, NormKind::L2), NormedSpaceSpec::make(2, NormKind::L2),
                                             {{2.0, 0.0}, {0.0, 1.0}});
  EXPECT_NEAR(tau_estimate(d, tree_band(1, 3), budget()).lower_bound, 2.0, 1e-10);
}

TEST(TauEstimate, LowerBoundIsAttainedByWitness) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 6; ++trial) {
    const OperatorSpec op = random_dense(2, 3, rng, NormKind::L1, NormKind::L2);
    const IndexSet frame = random_index_set(3, rng);
    const TauEstimate est = tau_estimate(op, frame, budget());
    EXPECT_TRUE(est.witness.indices().subset_of(frame));
    EXPECT_NEAR(tau_ratio(op, est.witness), est.lower_bound, 1e-12 * est.lower_bound);
    // Scale invariance of the ratio.
    EXPECT_NEAR(tau_ratio(op, est.witness.scaled(-3.5)), est.lower_bound, 1e-12 * est.lower_bound);
  }
}

TEST(TauEstimate, ReproducibleForFixedSeed) {
  const OperatorSpec op = diagonal_operator(3, 4.0 / 3.0);
  EstimateBudget b;
  b.seed = 99;
  const TauEstimate a = tau_estimate(op, tree_band(1, 3), b);
  b.workers = 3;
  const TauEstimate c = tau_estimate(op, tree_band(1, 3), b);
  EXPECT_EQ(a.lower_bound, c.lower_bound);
  EXPECT_EQ(a.witness, c.witness);
}

TEST(DiagonalOperator, FrozenFormulaValues) {
  EXPECT_NEAR(diagonal_formula_tau(4, 4.0 / 3.0), 1.6686692453497707, 1e-14);
  EXPECT_NEAR(diagonal_formula_tau_p(4, 4.0 / 3.0), 1.2014057070673771, 1e-14);
  EXPECT_NEAR(diagonal_formula_tau(2, 4.0 / 3.0), 1.3065629648763766, 1e-14);
  EXPECT_NEAR(weak_type_rate(2, 4.0 / 3.0), 1.189207115002721, 1e-14);
  EXPECT_DOUBLE_EQ(diagonal_formula_tau(1, 1.5), 1.0);
  EXPECT_DOUBLE_EQ(diagonal_formula_tau_p(1, 1.5), 1.0);
  EXPECT_NEAR(weak_type_constant(4.0 / 3.0), std::sqrt(2.0), 1e-15);
}

TEST(DiagonalOperator, EntriesAndExponentRange) {
  const OperatorSpec op = diagonal_operator(4, 4.0 / 3.0);
  EXPECT_EQ(op.domain().norm, NormKind::L1);
  const auto& entries = std::get<DiagonalKind>(op.kind()).entries;
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(entries[static_cast<std::size_t>(k - 1)], std::pow(k, -0.25), 1e-15);
  EXPECT_THROW(diagonal_operator(4, 1.0), DomainError);
  EXPECT_THROW(diagonal_operator(4, 2.0), DomainError);
  EXPECT_THROW(diagonal_formula_tau(4, 2.5), DomainError);
}

TEST(DiagonalOperator, EstimatorsReachClosedFormsForSmallN) {
  for (int n = 1; n <= 3; ++n) {
    const OperatorSpec op = diagonal_operator(n, 4.0 / 3.0);
    const double tau = tau_estimate(op, tree_band(1, n), budget()).lower_bound;
    EXPECT_LE(tau, diagonal_formula_tau(n, 4.0 / 3.0) * (1 + 1e-9));
    EXPECT_GE(tau, diagonal_formula_tau(n, 4.0 / 3.0) * (1 - 2e-2));
    const double tau_p = tau_p_estimate(op, n, 4.0 / 3.0, budget()).lower_bound;
    EXPECT_GE(tau_p, diagonal_formula_tau_p(n, 4.0 / 3.0) * (1 - 5e-2));
  }
}

TEST(DescendBand, HalfKeepsTheRatio) {
  std::mt19937_64 rng(6);
  const OperatorSpec op = random_dense(2, 2, rng, NormKind::L1, NormKind::L2);
  for (int trial = 0; trial < 50; ++trial) {
    const HaarCombination f = random_family(tree_band(2, 5), 2, rng);
    const HaarCombination half = descend_band(op, f);
    EXPECT_LE(half.max_level(), 4);
    EXPECT_GE(tau_ratio(op, half), tau_ratio(op, f) * (1 - 1e-12));
  }
  EXPECT_THROW(descend_band(op, random_family(tree_band(1, 2), 2, rng)), DomainError);
}

TEST(ComparisonCheck, SpecExamples) {
  const OperatorSpec op = diagonal_operator(3, 1.5);
  IndexSet set;
  set.insert({1, 1});
  set.insert({3, 2});
  set.insert({3, 3});
  const ComparisonReport rep = comparison_check(op, set, budget());
  EXPECT_EQ(rep.height, 2);
  EXPECT_TRUE(rep.passed());

  const ComparisonReport tree = comparison_check(op, tree_band(1, 3), budget());
  EXPECT_TRUE(tree.exact_height);
  EXPECT_TRUE(tree.passed());
  EXPECT_THROW(comparison_check(op, IndexSet{}, budget()), DomainError);
}

TEST(MonotonicityCheck, SmallBands) {
  const OperatorSpec op = diagonal_operator(2, 4.0 / 3.0);
  for (auto [m, n] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 3}}) {
    const MonotonicityReport rep = monotonicity_check(op, m, n, budget());
    EXPECT_TRUE(rep.passed()) << m << " " << n;
  }
  EXPECT_THROW(monotonicity_check(op, 2, 1, budget()), DomainError);
}

TEST(TriangleCheck, RandomFamilies) {
  std::mt19937_64 rng(12);
  const OperatorSpec op = diagonal_operator(3, 1.5);
  for (int trial = 0; trial < 30; ++trial) {
    const HaarCombination f = random_family(random_index_set(6, rng), 3, rng);
    for (double r : {1.0, 1.5, 2.0}) {
      const TriangleReport rep = triangle_chain_check(op, f, r);
      EXPECT_TRUE(rep.passed());
      EXPECT_LE(rep.total_l2, rep.piece_sum + 1e-9);
    }
  }
}

TEST(TriangleCheck, PartitionReproductionDetectsMissingIndex) {
  const HaarCombination f = family(1, {{{1, 1}, {1.0}}, {{2, 2}, {2.0}}});
  IndexSet a, b;
  a.insert({1, 1});
  b.insert({2, 2});
  EXPECT_TRUE(partition_reproduces(f, {a, b}));
  EXPECT_FALSE(partition_reproduces(f, {a}));
  EXPECT_FALSE(partition_reproduces(f, {a, b, a}));
}

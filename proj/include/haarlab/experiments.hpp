#pragma once

// Reproducible experiments over the library: invariant suites, formula
// sweeps, comparison runs and the greedy-family certificate chain. Every
// experiment yields an ExperimentReport with CSV rows and asserted checks.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "haarlab/checks.hpp"
#include "haarlab/diagonal.hpp"
#include "haarlab/json_io.hpp"

namespace haarlab {

inline constexpr int kReportSchemaVersion = 1;

struct Tolerances {
  double exact = 1e-12;
  double quadrature = 1e-9;
  double optimizer = 2e-2;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int max_level = kDefaultMaxLevel;
  Tolerances tolerances;
  EstimateBudget budget;
  int workers = 1;
  bool corrupt_fork_table = false;  // fault injection for verify

  void validate() const {
    if (max_level < 1 || max_level > haarlab::max_level())
      throw DomainError("max_level must lie in [1, " + std::to_string(haarlab::max_level()) + "]");
    if (!(tolerances.exact > 0 && tolerances.quadrature > 0 && tolerances.optimizer > 0))
      throw DomainError("tolerances must be positive");
    if (budget.restarts < 0 || budget.iterations < 1) throw DomainError("estimation budget must be positive");
    if (workers < 1) throw DomainError("workers must be >= 1");
  }

  EstimateBudget effective_budget() const {
    EstimateBudget b = budget;
    b.seed = seed;
    b.workers = workers;
    return b;
  }
};

struct CheckResult {
  std::string name;
  bool asserted = true;
  std::string detail;
};

struct ExperimentReport {
  std::string name;
  Json parameters = Json::object();
  std::vector<std::string> columns;
  std::vector<Json> rows;  // each an array matching columns
  std::vector<CheckResult> checks;
  double wall_time = 0.0;
  int schema_version = kReportSchemaVersion;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.asserted) return false;
    return true;
  }

  void check(std::string check_name, bool ok, std::string detail = {}) {
    checks.push_back({std::move(check_name), ok, std::move(detail)});
  }

  Json to_json() const {
    Json checks_j = Json::array();
    for (const auto& c : checks) checks_j.push_back({{"name", c.name}, {"asserted", c.asserted}, {"detail", c.detail}});
    return {{"schema_version", schema_version},
            {"name", name},
            {"parameters", parameters},
            {"columns", columns},
            {"rows", rows},
            {"checks", checks_j},
            {"passed", passed()},
            {"wall_time", wall_time}};
  }

  std::string to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += csv_cell(row[i]);
      }
      out += '\n';
    }
    return out;
  }

  static std::string csv_cell(const Json& v) {
    if (v.is_number_float()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }
};

/// Times `body` and stores the elapsed seconds in report.wall_time.
inline void timed(ExperimentReport& report, const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Random inputs.

/// Standard normal entries rescaled by 2^(-(k-1)/2), one vector per frame index.
inline HaarCombination random_family(const IndexSet& frame, int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  HaarCombination f(dim);
  for (const auto& idx : frame) {
    Vector x(static_cast<std::size_t>(dim));
    for (double& v : x) v = normal(rng) / haar_amplitude(idx.level);
    f.set(idx, std::move(x));
  }
  return f;
}

/// Uniformly random non-empty subset of D_1^depth.
inline IndexSet random_index_set(int depth, std::mt19937_64& rng) {
  const IndexSet tree = tree_band(1, depth);
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    IndexSet out;
    for (const auto& idx : tree)
      if (coin(rng)) out.insert(idx);
    if (!out.empty()) return out;
  }
}

/// Seed for work item `item` of an experiment, independent of scheduling.
inline std::uint64_t item_seed(std::uint64_t seed, std::uint64_t item) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(item), static_cast<std::uint32_t>(item >> 32)};
  std::uint64_t out = 0;
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out;
}

// ---------------------------------------------------------------------------
// Invariant suites.

struct SuiteOutcome {
  std::int64_t cases = 0;
  std::int64_t failures = 0;
  std::string first_failure;

  void expect(bool ok, const std::function<std::string()>& what) {
    ++cases;
    if (!ok) {
      if (failures == 0) first_failure = what();
      ++failures;
    }
  }
};

struct VerifySuite {
  std::string name;
  std::function<SuiteOutcome(const ExperimentConfig&)> run;
};

namespace suites {

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline SuiteOutcome haar_support(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int grid = std::min(12, cfg.max_level);
  const int top = std::min(8, grid);
  const auto points = dyadic_grid(grid);
  for (const auto& idx : tree_band(1, top))
    for (const auto& t : points)
      out.expect((haar_eval(idx, t).sign == 0) == !haar_support(idx).contains(t),
                 [&] { return idx.str() + " at " + t.str(); });
  return out;
}

/// Exact Gram matrix: integral of chi_a chi_b over [0,1) in Z[sqrt2][1/2].
inline SuiteOutcome orthonormality(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int top = std::min(8, cfg.max_level);
  const IndexSet tree = tree_band(1, top);
  const std::vector<HaarIndex> idx(tree.begin(), tree.end());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a; b < idx.size(); ++b) {
      // Integrate over the support of the finer function (or nothing if the
      // supports are disjoint), on cells of its own half-length.
      const HaarIndex& fine = idx[b];
      RootTwoDyadic integral{};
      const DyadicInterval sa = haar_support(idx[a]);
      const DyadicInterval sb = haar_support(fine);
      if (sa.contains(sb)) {
        const std::int64_t first = (fine.pos - 1) * 2;
        for (std::int64_t c = first; c < first + 2; ++c) {
          const DyadicRational t(c, fine.level);
          const RootTwoDyadic cell_measure(1, 0, fine.level);
          integral += RootTwoDyadic::from(haar_eval(idx[a], t)) * RootTwoDyadic::from(haar_eval(fine, t)) * cell_measure;
        }
      }
      const RootTwoDyadic expected = a == b ? RootTwoDyadic::one() : RootTwoDyadic{};
      out.expect(integral == expected, [&] { return idx[a].str() + " x " + fine.str() + " = " + integral.str(); });
    }
  }
  return out;
}

inline SuiteOutcome translation_scaling(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int grid = std::min(10, cfg.max_level);
  const int top = std::min(8, grid);
  const auto points = dyadic_grid(grid);
  for (const auto& idx : tree_band(1, top)) {
    const bool has_next = idx.pos < pow2(idx.level - 1);
    for (const auto& t : points) {
      if (has_next && t.to_double() >= std::ldexp(1.0, 1 - idx.level))
        out.expect(translation_identity_check(idx, t), [&] { return "translation " + idx.str() + " at " + t.str(); });
      if (t.cell(1) == 0 && idx.level + 1 <= grid)
        out.expect(scaling_identity_check(idx, t), [&] { return "scaling " + idx.str() + " at " + t.str(); });
    }
  }
  return out;
}

inline SuiteOutcome branches(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int n = std::min(10, cfg.max_level);
  for (const auto& t : dyadic_grid(n)) {
    const IndexSet b = branch(t, n);
    bool nested = b.size() == static_cast<std::size_t>(n);
    for (const auto& idx : b)
      if (idx.level > 1) nested = nested && b.contains(parent(idx)) && haar_support(idx).contains(t);
    out.expect(nested, [&] { return "branch at " + t.str(); });
  }
  return out;
}

inline SuiteOutcome fork_relations(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int top = std::min(6, cfg.max_level - 1);
  for (int h = 1; h <= top; ++h) {
    for (std::int64_t i = 1; i <= pow2(h - 1); ++i) {
      const ForkTransform fork = ForkTransform::at(h, i);
      ForkRelationTable table = fork_identity_table(fork);
      if (cfg.corrupt_fork_table) table[1][1] = -table[1][1];
      out.expect(fork_relations_hold(fork, table), [&] { return "fork " + fork.root.str(); });
    }
  }
  return out;
}

inline SuiteOutcome swap_geometry(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int top = std::min(8, cfg.max_level - 2);
  for (int h = 1; h <= top; ++h) {
    const auto points = dyadic_grid(h + 2);
    for (std::int64_t i = 1; i <= pow2(h - 1); ++i) {
      const ForkTransform fork = ForkTransform::at(h, i);
      std::vector<bool> hit(points.size(), false);
      bool ok = true;
      for (const auto& t : points) {
        const DyadicRational s = phi_apply(fork, t);
        ok = ok && phi_apply(fork, s) == t;
        const auto c = static_cast<std::size_t>(s.cell(h + 2));
        ok = ok && !hit[c];
        hit[c] = true;
      }
      out.expect(ok, [&] { return "involution/bijection for fork " + fork.root.str(); });
    }
  }
  return out;
}

inline SuiteOutcome composition_contract(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int grid = std::min(10, cfg.max_level);
  const int top_idx = std::min(8, grid);
  const int top_fork = std::min(6, grid - 1);
  const auto points = dyadic_grid(grid);
  for (int h = 1; h <= top_fork; ++h) {
    for (std::int64_t i = 1; i <= pow2(h - 1); ++i) {
      const ForkTransform fork = ForkTransform::at(h, i);
      for (const auto& idx : tree_band(1, top_idx)) {
        if (is_fork_member(classify_index(fork, idx))) continue;
        const HaarIndex image = phi_index_image(fork, idx);
        bool ok = true;
        for (const auto& t : points) ok = ok && haar_eval(image, t) == haar_eval(idx, phi_apply(fork, t));
        out.expect(ok, [&] { return "fork " + fork.root.str() + " index " + idx.str(); });
      }
    }
  }
  return out;
}

/// Calls fn on every subset of `items` with at most max_size elements.
inline void for_each_small_subset(const std::vector<HaarIndex>& items, std::size_t max_size,
                                  const std::function<void(const IndexSet&)>& fn) {
  std::vector<std::size_t> pick;
  std::function<void(std::size_t, IndexSet&)> rec = [&](std::size_t from, IndexSet& cur) {
    fn(cur);
    if (cur.size() == max_size) return;
    for (std::size_t i = from; i < items.size(); ++i) {
      cur.insert(items[i]);
      rec(i + 1, cur);
      cur.erase(items[i]);
    }
  };
  IndexSet cur;
  rec(0, cur);
}

inline SuiteOutcome phi_contract(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int depth = std::min(5, cfg.max_level - 1);
  const IndexSet tree = tree_band(1, depth);
  for_each_small_subset({tree.begin(), tree.end()}, 6, [&](const IndexSet& set) {
    if (set.empty()) return;
    const int height = local_height(set);
    for (const auto& idx : set) {
      if (!is_admissible(set, idx)) continue;
      const IndexSet image = phi_transform_set(set, ForkTransform{idx});
      out.expect(image.size() == set.size() + 1 && local_height(image) == height,
                 [&] { return "Phi at " + idx.str() + " on " + set.str(); });
    }
  });
  return out;
}

inline SuiteOutcome compression(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int depth = std::min(4, cfg.max_level / 2);
  const IndexSet tree = tree_band(1, depth);
  const std::vector<HaarIndex> items(tree.begin(), tree.end());
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << items.size()); ++mask) {
    IndexSet set;
    for (std::size_t b = 0; b < items.size(); ++b)
      if (mask >> b & 1) set.insert(items[b]);
    const CompressionTrace trace = compress(set);
    const int height = local_height(set);
    bool ok = true;
    IndexSet cur = set;
    for (const auto& step : trace.steps) {
      const IndexSet next = phi_transform_set(cur, step);
      ok = ok && next.size() == cur.size() + 1 && local_height(next) == height;
      cur = next;
    }
    ok = ok && cur == trace.final_set && trace.final_set.subset_of(tree_band(trace.m + 1, trace.m + height));
    ok = ok && static_cast<std::int64_t>(trace.steps.size()) <= pow2(trace.m + height) - 1 - static_cast<std::int64_t>(set.size());
    out.expect(ok, [&] { return "compress " + set.str(); });
  }
  return out;
}

inline SuiteOutcome rewrite_invariance(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int depth = std::min(6, cfg.max_level / 2);
  const NormedSpaceSpec space = NormedSpaceSpec::make(3, NormKind::L2);
  const OperatorSpec id = OperatorSpec::identity(space);
  for (int trial = 0; trial < 200; ++trial) {
    std::mt19937_64 rng(item_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    const IndexSet set = random_index_set(depth, rng);
    const HaarCombination f = random_family(set, space.dim, rng);
    const CompressionTrace trace = compress(set);
    double l2 = 0.0, energy = 0.0;
    push_through_trace(id, f, trace, l2, energy);
    out.expect(l2 < cfg.tolerances.quadrature && energy < cfg.tolerances.quadrature,
               [&] { return "trace residuals on " + set.str(); });
  }
  return out;
}

inline SuiteOutcome local_heights(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int depth = std::min(4, cfg.max_level);
  const IndexSet tree = tree_band(1, depth);
  const std::vector<HaarIndex> items(tree.begin(), tree.end());
  const auto points = dyadic_grid(depth);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << items.size()); ++mask) {
    IndexSet set;
    for (std::size_t b = 0; b < items.size(); ++b)
      if (mask >> b & 1) set.insert(items[b]);
    int brute = 0;
    for (const auto& t : points) {
      int hits = 0;
      for (const auto& idx : branch(t, depth)) hits += set.contains(idx);
      brute = std::max(brute, hits);
    }
    out.expect(local_height(set) == brute, [&] { return "local height of " + set.str(); });
  }
  return out;
}

inline SuiteOutcome filling(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  for (int n = 1; n <= std::min(4, cfg.max_level); ++n) {
    const IndexSet tree = tree_band(1, n);
    const std::vector<HaarIndex> items(tree.begin(), tree.end());
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << items.size()); ++mask) {
      IndexSet set;
      for (std::size_t b = 0; b < items.size(); ++b)
        if (mask >> b & 1) set.insert(items[b]);
      const int height = local_height(set);
      for (int l = std::max(1, height); l <= n; ++l) {
        if (static_cast<std::int64_t>(set.size()) >= pow2(l) - 1) continue;
        const HaarIndex one = fill_one(set, l, n);
        IndexSet grown = set;
        grown.insert(one);
        out.expect(!set.contains(one) && one.level <= n && local_height(grown) <= l,
                   [&] { return "fill_one l=" + std::to_string(l) + " on " + set.str(); });
        const IndexSet extra = fill_to_height(set, l, n);
        const IndexSet all = set_union(set, extra);
        out.expect(static_cast<std::int64_t>(extra.size()) == pow2(l) - 1 - static_cast<std::int64_t>(set.size()) &&
                       all.size() == set.size() + extra.size() && all.subset_of(tree) && local_height(all) <= l,
                   [&] { return "fill_to_height l=" + std::to_string(l) + " on " + set.str(); });
      }
    }
  }
  return out;
}

inline SuiteOutcome partitions(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int depth = std::min(6, cfg.max_level);
  const NormedSpaceSpec space = NormedSpaceSpec::make(2, NormKind::L2);
  const OperatorSpec id = OperatorSpec::identity(space);
  for (int trial = 0; trial < 1000; ++trial) {
    std::mt19937_64 rng(item_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    const HaarCombination f = random_family(tree_band(1, depth), space.dim, rng);
    for (double r : {1.0, 1.5, 2.0}) {
      const TriangleReport rep = triangle_chain_check(id, f, r);
      out.expect(rep.passed(), [&] { return "partition trial " + std::to_string(trial) + " r=" + std::to_string(r); });
    }
  }
  return out;
}

/// Contracts of a greedy family; returns an empty string when all hold.
inline std::string greedy_violation(const HaarCombination& f, const GreedyFamily& g, int depth,
                                    const NormedSpaceSpec& space) {
  IndexSet all;
  std::size_t total = 0;
  for (const auto& piece : g.pieces) {
    all = set_union(all, piece);
    total += piece.size();
  }
  if (!(all == tree_band(1, depth)) || total != all.size()) return "pieces do not partition D_1^n";
  const auto weights = weighted_magnitudes(f, space);
  std::size_t cumulative = 0;
  for (std::size_t i = 0; i < g.pieces.size(); ++i) {
    const int l = static_cast<int>(i) + 1;
    const int bound = l <= g.m ? static_cast<int>(pow2(l)) : depth;
    if (local_height(g.pieces[i]) > bound) return "height bound fails for piece " + std::to_string(l);
    const double limit = g.threshold_base / std::pow(2.0, (l - 1) / g.exponent);
    for (const auto& idx : g.pieces[i]) {
      const auto w = weights.find(idx);
      if (w != weights.end() && w->second > limit) return "weight band fails at " + idx.str();
    }
    cumulative += g.pieces[i].size();
    if (l <= g.m && g.padded[i] && static_cast<std::int64_t>(cumulative) < pow2(static_cast<int>(pow2(l))) - 1)
      return "cumulative cardinality fails at piece " + std::to_string(l);
  }
  return {};
}

inline SuiteOutcome greedy(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int depth = std::min(5, cfg.max_level);
  const NormedSpaceSpec space = NormedSpaceSpec::make(2, NormKind::L1);
  for (int trial = 0; trial < 200; ++trial) {
    std::mt19937_64 rng(item_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    const HaarCombination f = random_family(tree_band(1, depth), space.dim, rng);
    for (double p : {1.2, 4.0 / 3.0, 1.5}) {
      const std::string bad = greedy_violation(f, greedy_family(f, depth, p, space), depth, space);
      out.expect(bad.empty(), [&] { return "greedy trial " + std::to_string(trial) + ": " + bad; });
    }
  }
  return out;
}

inline SuiteOutcome quadrature(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const int depth = std::min(6, cfg.max_level);
  for (int trial = 0; trial < 500; ++trial) {
    std::mt19937_64 rng(item_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    const NormKind kind = static_cast<NormKind>(trial % 3);
    const NormedSpaceSpec space = NormedSpaceSpec::make(3, kind);
    const HaarCombination f = random_family(random_index_set(depth, rng), space.dim, rng);
    const double p = 1.0 + (trial % 5) * 0.25;
    CompensatedSum per_level;
    for (int k = 1; k <= depth; ++k) {
      const HaarCombination level = f.restricted_to(tree_band(k, k));
      if (!level.empty()) per_level.add(std::pow(lp_norm_of_combination(level, space, p), p));
    }
    out.expect(close_rel(std::pow(per_level.value(), 1.0 / p), levelwise_rhs_p(f, space, p), cfg.tolerances.exact * 10),
               [&] { return "levelwise identity trial " + std::to_string(trial); });
    if (kind == NormKind::L2)
      out.expect(close_rel(lp_norm_of_combination(f, space, 2.0), std::sqrt(coefficient_energy(f, space)),
                           cfg.tolerances.exact * 10),
                 [&] { return "Parseval trial " + std::to_string(trial); });
  }
  return out;
}

inline SuiteOutcome estimates(const ExperimentConfig& cfg) {
  SuiteOutcome out;
  const EstimateBudget budget = cfg.effective_budget();
  const NormedSpaceSpec l2 = NormedSpaceSpec::make(2, NormKind::L2);
  const IndexSet set = tree_band(1, std::min(3, cfg.max_level));
  const TauEstimate id = tau_estimate(OperatorSpec::identity(l2), set, budget);
  out.expect(close_rel(id.lower_bound, 1.0, 1e-8), [&] { return "identity tau = " + std::to_string(id.lower_bound); });
  const TauEstimate dense = tau_estimate(OperatorSpec::dense(l2, l2, {{2, 0}, {0, 1}}), set, budget);
  out.expect(close_rel(dense.lower_bound, 2.0, 1e-8), [&] { return "dense tau = " + std::to_string(dense.lower_bound); });
  const int n = std::min(4, cfg.max_level);
  const OperatorSpec diag = diagonal_operator(n, 4.0 / 3.0);
  const TauEstimate t = tau_estimate(diag, tree_band(1, n), budget);
  out.expect(close_rel(tau_ratio(diag, t.witness), t.lower_bound, cfg.tolerances.quadrature),
             [&] { return std::string("witness does not reproduce the bound"); });
  out.expect(close_rel(tau_ratio(diag, t.witness.scaled(-3.5)), t.lower_bound, cfg.tolerances.quadrature),
             [&] { return std::string("ratio not scale invariant"); });
  out.expect(t.lower_bound <= diagonal_formula_tau(n, 4.0 / 3.0) * (1 + cfg.tolerances.quadrature) &&
                 t.lower_bound >= diagonal_formula_tau(n, 4.0 / 3.0) * (1 - cfg.tolerances.optimizer),
             [&] { return "diagonal tau estimate " + std::to_string(t.lower_bound); });
  return out;
}

}  // namespace suites

inline std::vector<VerifySuite> verify_suites() {
  return {
      {"haar_support", suites::haar_support},
      {"orthonormality", suites::orthonormality},
      {"translation_scaling", suites::translation_scaling},
      {"branches", suites::branches},
      {"fork_relations", suites::fork_relations},
      {"swap_geometry", suites::swap_geometry},
      {"composition_contract", suites::composition_contract},
      {"phi_contract", suites::phi_contract},
      {"compression", suites::compression},
      {"rewrite_invariance", suites::rewrite_invariance},
      {"local_height", suites::local_heights},
      {"filling", suites::filling},
      {"partition", suites::partitions},
      {"greedy_family", suites::greedy},
      {"quadrature", suites::quadrature},
      {"estimates", suites::estimates},
  };
}

inline ExperimentReport run_verify(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.name = "verify";
  report.parameters = {{"seed", cfg.seed}, {"max_level", cfg.max_level}, {"corrupt_fork_table", cfg.corrupt_fork_table}};
  report.columns = {"suite", "cases", "failures"};
  timed(report, [&] {
    const auto all = verify_suites();
    const auto outcomes = parallel_indexed<SuiteOutcome>(static_cast<int>(all.size()), cfg.workers,
                                                         [&](int i) { return all[static_cast<std::size_t>(i)].run(cfg); });
    for (std::size_t i = 0; i < all.size(); ++i) {
      report.rows.push_back(Json::array({all[i].name, outcomes[i].cases, outcomes[i].failures}));
      report.check(all[i].name, outcomes[i].failures == 0, outcomes[i].first_failure);
    }
  });
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps and experiments.

/// Rows (n, tau, n^(1/p-1/2), ratio, tau_p, 1/2 (1+ln n)^(1/p')) for
/// n = 1..n_max (every `every`-th row, plus the first and last); the checks
/// cover every n.
inline ExperimentReport run_weak_type_sweep(double p, long long n_max, long long every = 1) {
  require_open_exponent(p, "run_weak_type_sweep");
  if (n_max < 1) throw DomainError("run_weak_type_sweep: n_max must be >= 1");
  if (every < 1) throw DomainError("run_weak_type_sweep: every must be >= 1");
  ExperimentReport report;
  report.name = "sweep-weak-type";
  report.parameters = {{"p", p}, {"n_max", n_max}, {"every", every}};
  report.columns = {"n", "tau", "weak_type_rate", "ratio", "tau_p", "log_lower_bound"};
  timed(report, [&] {
    const double pc = conjugate_exponent(p);
    const double constant = weak_type_constant(p);
    CompensatedSum tau_sq, harmonic;
    long long ratio_fail = 0, constant_fail = 0, log_fail = 0;
    long long first_ratio_fail = 0;
    double worst_ratio = 0.0;
    for (long long n = 1; n <= n_max; ++n) {
      tau_sq.add(std::pow(static_cast<double>(n), -2.0 / pc));
      harmonic.add(1.0 / static_cast<double>(n));
      const double tau = std::sqrt(tau_sq.value());
      const double rate = weak_type_rate(n, p);
      const double ratio = tau / rate;
      const double tau_p = std::pow(harmonic.value(), 1.0 / pc);
      const double log_bound = log_lower_bound(n, p);
      worst_ratio = std::max(worst_ratio, ratio);
      if (ratio > 1.0) {
        if (ratio_fail == 0) first_ratio_fail = n;
        ++ratio_fail;
      }
      if (ratio > constant) ++constant_fail;
      if (tau_p < log_bound) ++log_fail;
      if (n == 1 || n == n_max || n % every == 0)
        report.rows.push_back(Json::array({n, tau, rate, ratio, tau_p, log_bound}));
    }
    report.check("ratio_le_1", ratio_fail == 0,
                 ratio_fail == 0 ? "" : std::to_string(ratio_fail) + " rows exceed 1, first at n=" +
                                            std::to_string(first_ratio_fail) + ", max ratio " + std::to_string(worst_ratio));
    report.check("ratio_le_weak_type_constant", constant_fail == 0,
                 "constant (p'/(p'-2))^(1/2) = " + std::to_string(constant));
    report.check("tau_p_ge_log_bound", log_fail == 0, log_fail == 0 ? "" : std::to_string(log_fail) + " rows fail");
  });
  return report;
}

inline ExperimentReport comparison_report(const OperatorSpec& op, const IndexSet& set, const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.name = "comparison";
  report.parameters = {{"operator", to_json(op)}, {"set", to_json(set)}, {"seed", cfg.seed},
                       {"restarts", cfg.budget.restarts}, {"iterations", cfg.budget.iterations},
                       {"tol_opt", cfg.tolerances.optimizer}};
  report.columns = {"set_size", "local_height", "exact_height", "tau_set", "tau_tree", "method_set", "method_tree",
                    "trace_m", "trace_steps", "l2_residual", "energy_residual", "transferred_ratio"};
  timed(report, [&] {
    const ComparisonReport rep = comparison_check(op, set, cfg.effective_budget(), cfg.tolerances.optimizer);
    report.rows.push_back(Json::array({set.size(), rep.height, rep.exact_height, rep.on_set.lower_bound,
                                       rep.on_tree.lower_bound, to_string(rep.on_set.method),
                                       to_string(rep.on_tree.method), rep.trace.m, rep.trace.steps.size(),
                                       rep.l2_residual, rep.energy_residual, rep.transferred_ratio}));
    report.check("tau_set_le_tau_tree", rep.inequality_holds());
    report.check("trace_residuals", rep.residuals_small());
    report.check("transferred_witness", rep.transfer_holds());
    if (rep.exact_height) report.check("exact_height_agreement", rep.agreement_holds());
  });
  return report;
}

inline ExperimentReport run_comparison_experiment(const std::string& op_file, const std::string& set_file,
                                                  const ExperimentConfig& cfg) {
  const OperatorSpec op = operator_from_json(read_json_file(op_file), op_file);
  const IndexSet set = index_set_from_json(read_json_file(set_file), set_file);
  return comparison_report(op, set, cfg);
}

inline ExperimentReport run_monotonicity_experiment(const OperatorSpec& op, int m, int n, const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.name = "monotonicity";
  report.parameters = {{"operator", to_json(op)}, {"m", m}, {"n", n}, {"seed", cfg.seed},
                       {"tol_opt", cfg.tolerances.optimizer}};
  report.columns = {"m", "n", "tau_shifted_band", "tau_band", "tau_aligned_band", "tau_tree", "halved_ratio"};
  timed(report, [&] {
    const MonotonicityReport rep = monotonicity_check(op, m, n, cfg.effective_budget(), cfg.tolerances.optimizer);
    report.rows.push_back(Json::array({m, n, rep.shifted_band, rep.band, rep.aligned_band, rep.tree, rep.halved_ratio}));
    report.check("shifted_band_le_band", rep.shift_inequality_holds());
    report.check("aligned_band_le_tree", rep.aligned_upper_holds());
    report.check("aligned_band_ge_tree", rep.aligned_lower_holds());
    report.check("halved_witness", rep.halving_holds());
  });
  return report;
}

inline ExperimentReport run_triangle_experiment(const OperatorSpec& op, const HaarCombination& f, double r) {
  ExperimentReport report;
  report.name = "triangle";
  report.parameters = {{"operator", to_json(op)}, {"r", r}, {"coefficients", to_json(f)}};
  report.columns = {"l", "size", "l2_norm", "energy", "energy_bound", "max_branch_count"};
  timed(report, [&] {
    const TriangleReport rep = triangle_chain_check(op, f, r);
    for (const auto& p : rep.pieces)
      report.rows.push_back(Json::array({p.l, p.size, p.l2_norm, p.energy, p.energy_bound, p.max_branch_count}));
    report.parameters["threshold_base"] = rep.threshold_base;
    report.parameters["total_l2"] = rep.total_l2;
    report.parameters["piece_sum"] = rep.piece_sum;
    report.check("decomposition_exact", rep.decomposition_exact);
    report.check("triangle", rep.triangle_holds());
    report.check("energy_bounds", rep.energy_bounds_hold());
    report.check("branch_counts", rep.branch_counts_hold());
  });
  return report;
}

/// Certificate chain of the logarithmic estimate on random families:
///   ||sum T x chi|L_2|| <= sum_l ||piece l||
///                       <= 2^(1/p) sum_l tau(D_1^min(2^l,n)) 2^(l(1/2-1/p)) S_p,
/// with tau replaced by its estimate times (1 + optimizer tolerance).
inline ExperimentReport run_log_variant_experiment(double p, int n, int trials, const ExperimentConfig& cfg,
                                                   const OperatorSpec* op_override = nullptr) {
  cfg.validate();
  if (p < 1.0 || p >= 2.0) throw DomainError("run_log_variant_experiment: p must lie in [1,2)");
  if (n < 1 || n > cfg.max_level) throw DomainError("run_log_variant_experiment: n must lie in [1, max_level]");
  if (trials < 0) throw DomainError("run_log_variant_experiment: trials must be >= 0");
  if (!op_override && !(p > 1.0)) throw DomainError("run_log_variant_experiment: p = 1 needs an explicit operator");
  const OperatorSpec op = op_override ? *op_override : diagonal_operator(n, p);
  ExperimentReport report;
  report.name = "log-variant";
  report.parameters = {{"p", p}, {"n", n}, {"trials", trials}, {"seed", cfg.seed}, {"operator", to_json(op)},
                       {"tol_opt", cfg.tolerances.optimizer}};
  report.columns = {"trial", "threshold_base", "direct_l2", "piece_sum", "certificate", "direct_over_certificate"};
  timed(report, [&] {
    const int m = floor_log2(n);
    // tau estimates on D_1^min(2^l, n), l = 1..m+1
    std::vector<double> tau_tree;
    for (int l = 1; l <= m + 1; ++l) {
      const int height = static_cast<int>(std::min<std::int64_t>(pow2(l), n));
      tau_tree.push_back(tau_estimate(op, tree_band(1, height), cfg.effective_budget()).lower_bound);
    }
    struct Trial {
      double s = 0, direct = 0, pieces = 0, certificate = 0;
      std::string violation;
    };
    const auto results = parallel_indexed<Trial>(trials, cfg.workers, [&](int trial) {
      std::mt19937_64 rng(item_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
      const HaarCombination f = random_family(tree_band(1, n), op.domain().dim, rng);
      const GreedyFamily g = greedy_family(f, n, p, op.domain());
      Trial t;
      t.violation = suites::greedy_violation(f, g, n, op.domain());
      t.s = g.threshold_base;
      t.direct = lp_norm_of_combination(apply(op, f), op.codomain(), 2.0);
      CompensatedSum pieces, cert;
      for (std::size_t i = 0; i < g.pieces.size(); ++i) {
        const int l = static_cast<int>(i) + 1;
        pieces.add(lp_norm_of_combination(apply(op, f.restricted_to(g.pieces[i])), op.codomain(), 2.0));
        cert.add(tau_tree[i] * (1.0 + cfg.tolerances.optimizer) * std::pow(2.0, l * (0.5 - 1.0 / p)) * t.s);
      }
      t.pieces = pieces.value();
      t.certificate = std::pow(2.0, 1.0 / p) * cert.value();
      return t;
    });
    int contract_fail = 0, triangle_fail = 0, chain_fail = 0;
    std::string first_contract;
    for (int i = 0; i < trials; ++i) {
      const Trial& t = results[static_cast<std::size_t>(i)];
      const double ratio = t.certificate > 0 ? t.direct / t.certificate : 0.0;
      report.rows.push_back(Json::array({i, t.s, t.direct, t.pieces, t.certificate, ratio}));
      if (!t.violation.empty()) {
        if (contract_fail == 0) first_contract = "trial " + std::to_string(i) + ": " + t.violation;
        ++contract_fail;
      }
      if (t.direct > t.pieces + cfg.tolerances.quadrature) ++triangle_fail;
      if (t.direct > t.certificate + cfg.tolerances.quadrature) ++chain_fail;
    }
    report.check("greedy_contracts", contract_fail == 0, first_contract);
    report.check("triangle", triangle_fail == 0, std::to_string(triangle_fail) + " failures");
    report.check("certificate_chain", chain_fail == 0, std::to_string(chain_fail) + " failures");
  });
  return report;
}

}  // namespace haarlab

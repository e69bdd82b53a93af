// haarlab: command-line front end.
// Exit codes: 0 all checks passed, 1 an asserted check failed, 2 input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "haarlab/haarlab.hpp"

using namespace haarlab;

namespace {

struct Output {
  Json json;
  std::string csv;
  bool passed = true;
};

Output from_report(const ExperimentReport& r) { return {r.to_json(), r.to_csv(), r.passed()}; }

std::string set_csv(const IndexSet& set) {
  std::string out = "k,j\n";
  for (const auto& idx : set) out += std::to_string(idx.level) + "," + std::to_string(idx.pos) + "\n";
  return out;
}

struct Options {
  std::uint64_t seed = 1;
  int max_level = kDefaultMaxLevel;
  int restarts = 8;
  int iterations = 400;
  double tol_opt = 2e-2;
  int workers = 1;
  std::string output;
  std::string format = "json";

  ExperimentConfig config() const {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.max_level = max_level;
    cfg.tolerances.optimizer = tol_opt;
    cfg.budget.restarts = restarts;
    cfg.budget.iterations = iterations;
    cfg.workers = workers;
    cfg.validate();
    return cfg;
  }
};

void emit(const Output& out, const Options& opt) {
  const std::string text = opt.format == "csv" ? out.csv : out.json.dump(2) + "\n";
  if (opt.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(opt.output, std::ios::binary);
  if (!file) throw SchemaError(opt.output, "cannot open output file");
  file << text;
}

int error_record(const std::string& kind, const std::string& message, const std::string& field = {}) {
  Json err{{"kind", kind}, {"message", message}};
  if (!field.empty()) err["field"] = field;
  std::cerr << Json{{"error", err}}.dump() << "\n";
  return 2;
}

OperatorSpec load_operator(const std::string& file) { return operator_from_json(read_json_file(file), file); }
IndexSet load_set(const std::string& file) { return index_set_from_json(read_json_file(file), file); }
HaarCombination load_coefficients(const std::string& file) { return combination_from_json(read_json_file(file), file); }

Json estimate_json(const TauEstimate& e) {
  return {{"lower_bound", e.lower_bound}, {"lower_bound_only", true}, {"method", to_string(e.method)},
          {"restarts", e.restarts}, {"iterations", e.iterations}, {"witness", to_json(e.witness)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic Haar tree machinery and Haar type ideal norm experiments"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--seed", opt.seed, "Random seed");
  app.add_option("--max-level", opt.max_level, "Level cap for suites and inputs");
  app.add_option("--restarts", opt.restarts, "Random restarts per estimate");
  app.add_option("--iters", opt.iterations, "Ascent iterations per restart");
  app.add_option("--tol-opt", opt.tol_opt, "Relative tolerance between estimates");
  app.add_option("--workers", opt.workers, "Worker threads");
  app.add_option("--output", opt.output, "Write the result to this file instead of stdout");
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  std::optional<std::function<Output()>> action;

  auto* verify = app.add_subcommand("verify", "Run every invariant suite");
  bool corrupt = false;
  verify->add_flag("--corrupt-fork-table", corrupt, "Fault injection: flip one fork relation coefficient");
  verify->callback([&] {
    action = [&] {
      ExperimentConfig cfg = opt.config();
      cfg.corrupt_fork_table = corrupt;
      return from_report(run_verify(cfg));
    };
  });

  std::string input;
  auto* compress_cmd = app.add_subcommand("compress", "Compress an index set into a band of levels");
  compress_cmd->add_option("--input", input, "Index set JSON")->required();
  compress_cmd->callback([&] {
    action = [&] {
      const CompressionTrace trace = compress(load_set(input));
      std::string csv = "step,h,i\n";
      for (std::size_t s = 0; s < trace.steps.size(); ++s)
        csv += std::to_string(s + 1) + "," + std::to_string(trace.steps[s].level()) + "," +
               std::to_string(trace.steps[s].pos()) + "\n";
      return Output{to_json(trace), csv, true};
    };
  });

  auto* lh_cmd = app.add_subcommand("lh", "Local height of an index set");
  lh_cmd->add_option("--input", input, "Index set JSON")->required();
  lh_cmd->callback([&] {
    action = [&] {
      const IndexSet set = load_set(input);
      const int h = local_height(set);
      const bool exact = !set.empty() && exact_local_height(set, h);
      return Output{{{"local_height", h}, {"exact", exact}, {"size", set.size()}},
                    "local_height,exact,size\n" + std::to_string(h) + "," + (exact ? "true" : "false") + "," +
                        std::to_string(set.size()) + "\n",
                    true};
    };
  });

  int fill_l = 1, fill_n = 1;
  auto* fill_cmd = app.add_subcommand("fill", "Pad an index set to 2^l - 1 members of local height <= l");
  fill_cmd->add_option("--input", input, "Index set JSON")->required();
  fill_cmd->add_option("--l", fill_l, "Target local height")->required();
  fill_cmd->add_option("--n", fill_n, "Tree depth")->required();
  fill_cmd->callback([&] {
    action = [&] {
      const IndexSet set = load_set(input);
      const IndexSet extra = fill_to_height(set, fill_l, fill_n);
      const IndexSet all = set_union(set, extra);
      return Output{{{"added", to_json(extra)}, {"result", to_json(all)}, {"local_height", local_height(all)}},
                    set_csv(extra), true};
    };
  });

  std::string coeffs, norm = "l2";
  double r = 2.0;
  auto* partition_cmd = app.add_subcommand("partition", "Level-set partition of a coefficient family");
  partition_cmd->add_option("--coeffs", coeffs, "Coefficient JSON")->required();
  partition_cmd->add_option("--r", r, "Exponent r in [1,2]")->required();
  partition_cmd->add_option("--norm", norm, "Coefficient norm")->check(CLI::IsMember({"l1", "l2", "linf"}));
  partition_cmd->callback([&] {
    action = [&] {
      const HaarCombination f = load_coefficients(coeffs);
      const NormedSpaceSpec space = NormedSpaceSpec::make(f.dim(), norm_from_string(norm, "--norm"));
      const PartitionFamily family = level_set_partition(f, std::max(1, f.max_level()), r, space);
      Json pieces = Json::array();
      std::string csv = "l,k,j\n";
      for (std::size_t i = 0; i < family.pieces.size(); ++i) {
        pieces.push_back(to_json(family.pieces[i]));
        for (const auto& idx : family.pieces[i])
          csv += std::to_string(i + 1) + "," + std::to_string(idx.level) + "," + std::to_string(idx.pos) + "\n";
      }
      const bool ok = partition_reproduces(f, family.pieces);
      return Output{{{"threshold_base", family.threshold_base}, {"r", r}, {"pieces", pieces}, {"exact", ok}}, csv, ok};
    };
  });

  std::string op_file, set_file;
  auto* tau_cmd = app.add_subcommand("tau", "Lower bound for tau(T | H(F))");
  tau_cmd->add_option("--op", op_file, "Operator JSON")->required();
  tau_cmd->add_option("--set", set_file, "Index set JSON")->required();
  tau_cmd->callback([&] {
    action = [&] {
      const TauEstimate e = tau_estimate(load_operator(op_file), load_set(set_file), opt.config().effective_budget());
      return Output{estimate_json(e), "lower_bound,method\n" + ExperimentReport::csv_cell(e.lower_bound) + "," +
                                          to_string(e.method) + "\n",
                    true};
    };
  });

  int tau_n = 1;
  double p = 4.0 / 3.0;
  auto* tau_p_cmd = app.add_subcommand("tau-p", "Lower bound for tau_p(T | H(D_1^n))");
  tau_p_cmd->add_option("--op", op_file, "Operator JSON")->required();
  tau_p_cmd->add_option("--n", tau_n, "Tree depth")->required();
  tau_p_cmd->add_option("--p", p, "Exponent p in [1,2]")->required();
  tau_p_cmd->callback([&] {
    action = [&] {
      const TauEstimate e = tau_p_estimate(load_operator(op_file), tau_n, p, opt.config().effective_budget());
      return Output{estimate_json(e), "lower_bound,method\n" + ExperimentReport::csv_cell(e.lower_bound) + "," +
                                          to_string(e.method) + "\n",
                    true};
    };
  });

  auto* check_cmd = app.add_subcommand("check", "Comparison, monotonicity and triangle-chain checks");
  check_cmd->require_subcommand(1);
  auto* comparison = check_cmd->add_subcommand("comparison", "tau on F versus tau on D_1^lh(F)");
  comparison->add_option("--op", op_file, "Operator JSON")->required();
  comparison->add_option("--set", set_file, "Index set JSON")->required();
  comparison->callback([&] {
    action = [&] { return from_report(run_comparison_experiment(op_file, set_file, opt.config())); };
  });
  int mono_m = 1, mono_n = 1;
  auto* monotonicity = check_cmd->add_subcommand("monotonicity", "tau on shifted and aligned bands");
  monotonicity->add_option("--op", op_file, "Operator JSON")->required();
  monotonicity->add_option("--m", mono_m, "Lowest level of the band")->required();
  monotonicity->add_option("--n", mono_n, "Highest level of the band")->required();
  monotonicity->callback([&] {
    action = [&] { return from_report(run_monotonicity_experiment(load_operator(op_file), mono_m, mono_n, opt.config())); };
  });
  auto* triangle = check_cmd->add_subcommand("triangle", "Level-set triangle chain");
  triangle->add_option("--op", op_file, "Operator JSON")->required();
  triangle->add_option("--coeffs", coeffs, "Coefficient JSON")->required();
  triangle->add_option("--r", r, "Exponent r in [1,2]")->required();
  triangle->callback([&] {
    action = [&] { return from_report(run_triangle_experiment(load_operator(op_file), load_coefficients(coeffs), r)); };
  });

  long long n_max = 1000000, every = 1;
  auto* sweep = app.add_subcommand("sweep-weak-type", "Closed forms for the diagonal operator, n = 1..n_max");
  sweep->add_option("--p", p, "Exponent p in (1,2)");
  sweep->add_option("--n-max", n_max, "Largest n");
  sweep->add_option("--every", every, "Emit every k-th row (checks still cover every n)");
  sweep->callback([&] { action = [&] { return from_report(run_weak_type_sweep(p, n_max, every)); }; });

  int log_n = 8, trials = 50;
  auto* log_variant = app.add_subcommand("experiment-log-variant", "Greedy family certificate chain on random families");
  log_variant->add_option("--p", p, "Exponent p in [1,2)");
  log_variant->add_option("--n", log_n, "Tree depth");
  log_variant->add_option("--trials", trials, "Number of random families");
  log_variant->add_option("--op", op_file, "Operator JSON (default: the diagonal operator on l1^n)");
  log_variant->callback([&] {
    action = [&] {
      if (op_file.empty()) return from_report(run_log_variant_experiment(p, log_n, trials, opt.config()));
      const OperatorSpec op = load_operator(op_file);
      return from_report(run_log_variant_experiment(p, log_n, trials, opt.config(), &op));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return error_record("usage", e.what());
  }

  try {
    const Output out = (*action)();
    emit(out, opt);
    return out.passed ? 0 : 1;
  } catch (const SchemaError& e) {
    return error_record("schema", e.what(), e.field());
  } catch (const PreconditionError& e) {
    return error_record("precondition", e.what());
  } catch (const DomainError& e) {
    return error_record("domain", e.what());
  } catch (const std::exception& e) {
    return error_record("input", e.what());
  }
}

// delicoco: decentralized optimization with compressed gossip, from a JSON
// experiment config. Subcommands: run, sweep, budget, theory, gen-data,
// f-star. Exit codes: 0 ok, 2 config error, 3 divergence, 4 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delicoco/errors.hpp"
#include "delicoco/experiment.hpp"
#include "delicoco/trace_io.hpp"

namespace {

using namespace delicoco;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  for (const std::string& item : split_list(s)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(flag + ": \"" + item + "\" is not a number");
    }
  }
  if (out.empty()) throw ConfigError(flag + ": empty list");
  return out;
}

std::vector<int> parse_ints(const std::string& s, const std::string& flag) {
  std::vector<int> out;
  for (const std::string& item : split_list(s)) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError(flag + ": \"" + item + "\" is not an integer");
    }
  }
  if (out.empty()) throw ConfigError(flag + ": empty list");
  return out;
}

ExperimentConfig load_with_overrides(const std::string& config_path,
                                     const std::optional<std::string>& out_dir,
                                     const std::optional<std::uint64_t>& seed,
                                     const std::optional<int>& repeats) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (out_dir) cfg.out_dir = *out_dir;
  if (seed) cfg.seed = *seed;
  if (repeats) cfg.repeats = *repeats;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized optimization with compressed gossip"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;

  auto add_common = [&](CLI::App* cmd, bool config_required = true) {
    auto* opt = cmd->add_option("--config", config_path, "experiment config (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--out", out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", seed, "master seed (overrides config)");
  };

  auto* cmd_run = app.add_subcommand("run", "execute one configured experiment");
  add_common(cmd_run);
  cmd_run->add_option("--repeats", repeats, "independent repeats to run and average");

  auto* cmd_sweep = app.add_subcommand("sweep", "re-run the experiment across one axis");
  add_common(cmd_sweep);
  std::string axis, values_arg;
  cmd_sweep->add_option("--axis", axis, "q_steps|gamma|n|topology|compressor")->required();
  cmd_sweep->add_option("--values", values_arg, "comma-separated values")->required();
  cmd_sweep->add_option("--repeats", repeats, "repeats per value");

  auto* cmd_budget = app.add_subcommand("budget", "fixed-budget (Q, compression) pairings");
  add_common(cmd_budget);
  std::string budget_mode = "qsgd_bits";
  int base_q = 1;
  double base_param = 8.0;
  std::string c_list_arg = "1,2,4,8";
  cmd_budget->add_option("--mode", budget_mode, "qsgd_bits|topk_fraction");
  cmd_budget->add_option("--base-q", base_q, "Q of the base pair");
  cmd_budget->add_option("--base-param", base_param, "bit width or fraction of the base pair");
  cmd_budget->add_option("--c-list", c_list_arg, "comma-separated budget multipliers");
  cmd_budget->add_option("--repeats", repeats, "repeats per pair");

  auto* cmd_theory = app.add_subcommand("theory", "tuning table: gamma, rates, Q0, g(c)");
  std::string deltas_arg = "0.2,0.4,0.6,0.8,1.0";
  std::string omegas_arg = "1.0";
  std::string lambdas_arg = "1.0";
  double rho_bar = 0.5;
  int q_base = 1;
  std::string theory_c_list = "1,2,4,8,16";
  std::string theory_out;
  cmd_theory->add_option("--delta", deltas_arg, "spectral gaps, comma-separated");
  cmd_theory->add_option("--omega", omegas_arg, "contraction factors, comma-separated");
  cmd_theory->add_option("--lambda-max", lambdas_arg, "lambda_max(I-W) values, comma-separated");
  cmd_theory->add_option("--rho-bar", rho_bar, "gradient rate used for the Q0 column");
  cmd_theory->add_option("--q-base", q_base, "base Q of the g(c) allocation");
  cmd_theory->add_option("--c-list", theory_c_list, "budget multipliers for the g(c) columns");
  cmd_theory->add_option("--out", theory_out, "write the CSV here instead of stdout");

  auto* cmd_gen = app.add_subcommand("gen-data", "write the configured dataset as CSV");
  add_common(cmd_gen);
  std::string gen_out = "dataset.csv";
  cmd_gen->add_option("--data-out", gen_out, "output CSV path");

  auto* cmd_fstar = app.add_subcommand("f-star", "compute and cache the centralized optimum");
  add_common(cmd_fstar);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(config_path, out_dir, seed, repeats);
      const RunOutput out = run_experiment(cfg);
      for (const std::string& path : out.trace_paths) std::printf("trace %s\n", path.c_str());
      if (!out.mean_trace_path.empty()) std::printf("mean %s\n", out.mean_trace_path.c_str());
      std::printf("final_suboptimality %.17g\n", out.final_suboptimality);
    } else if (cmd_sweep->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(config_path, out_dir, seed, repeats);
      const SweepOutput out = run_sweep(cfg, axis, split_list(values_arg));
      std::printf("summary %s\n", out.summary_path.c_str());
      for (const SweepEntryResult& e : out.entries)
        std::printf("%s=%s %s %s\n", axis.c_str(), e.value.c_str(), e.status.c_str(),
                    e.status == "ok" ? std::to_string(e.final_suboptimality).c_str()
                                     : e.message.c_str());
      if (!out.all_ok) return 3;
    } else if (cmd_budget->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(config_path, out_dir, seed, repeats);
      const BudgetOutput out =
          run_budget(cfg, budget_mode, base_q, base_param, parse_ints(c_list_arg, "--c-list"));
      std::printf("summary %s\n", out.summary_path.c_str());
      for (size_t i = 0; i < out.trace_paths.size(); ++i)
        std::printf("trace %s final_suboptimality %.17g\n", out.trace_paths[i].c_str(),
                    out.final_suboptimality[i]);
    } else if (cmd_theory->parsed()) {
      const std::string csv = theory_table(
          parse_doubles(deltas_arg, "--delta"), parse_doubles(omegas_arg, "--omega"),
          parse_doubles(lambdas_arg, "--lambda-max"), rho_bar, q_base,
          parse_ints(theory_c_list, "--c-list"));
      if (theory_out.empty()) {
        std::fputs(csv.c_str(), stdout);
      } else {
        write_text_file_atomic(theory_out, csv);
        std::printf("table %s\n", theory_out.c_str());
      }
    } else if (cmd_gen->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(config_path, out_dir, seed, repeats);
      const std::string path = generate_dataset(cfg, gen_out);
      std::printf("dataset %s\n", path.c_str());
    } else if (cmd_fstar->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(config_path, out_dir, seed, repeats);
      const PreparedExperiment prep = prepare_experiment(cfg);
      std::printf("f_star %.17g\n", prep.f_star);
      std::printf("tol_met %s\n", prep.fstar_tol_met ? "true" : "false");
      std::printf("cache %s\n", prep.fstar_cache_path.c_str());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "internal contract violation: %s\n", e.what());
    return 2;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

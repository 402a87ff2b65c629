#include "delicoco/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "delicoco/errors.hpp"
#include "delicoco/trace_io.hpp"

namespace delicoco {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double require_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config field \"" + key + "\" must be a number");
  return j.get<double>();
}

int require_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("config field \"" + key + "\" must be an integer");
  return j.get<int>();
}

std::string require_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("config field \"" + key + "\" must be a string");
  return j.get<std::string>();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(origin + ": config must be a JSON object");

  ExperimentConfig cfg;
  std::set<std::string> seen;
  for (const auto& [key, value] : doc.items()) {
    seen.insert(key);
    if (key == "task") cfg.task = require_string(value, key);
    else if (key == "m") cfg.m = require_int(value, key);
    else if (key == "d") cfg.d = require_int(value, key);
    else if (key == "noise_var") cfg.noise_var = require_number(value, key);
    else if (key == "l2") cfg.l2 = require_number(value, key);
    else if (key == "mnist_images") cfg.mnist_images = require_string(value, key);
    else if (key == "mnist_labels") cfg.mnist_labels = require_string(value, key);
    else if (key == "partition") cfg.partition = require_string(value, key);
    else if (key == "topology") cfg.topology = require_string(value, key);
    else if (key == "n") cfg.n = require_int(value, key);
    else if (key == "compressor") cfg.compressor = require_string(value, key);
    else if (key == "eta") cfg.eta = require_number(value, key);
    else if (key == "gamma") {
      if (value.is_string()) {
        if (value.get<std::string>() != "auto")
          throw ConfigError("config field \"gamma\" must be a number or \"auto\"");
        cfg.gamma_auto = true;
      } else {
        cfg.gamma = require_number(value, key);
      }
    } else if (key == "q_steps") cfg.q_steps = require_int(value, key);
    else if (key == "iters") cfg.iters = require_int(value, key);
    else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer())
        throw ConfigError("config field \"seed\" must be a nonnegative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "bit_mode") cfg.bit_mode = require_string(value, key);
    else if (key == "algorithm") cfg.algorithm = require_string(value, key);
    else if (key == "repeats") cfg.repeats = require_int(value, key);
    else if (key == "out_dir") cfg.out_dir = require_string(value, key);
    else if (key == "fstar_step") cfg.fstar_step = require_number(value, key);
    else if (key == "fstar_tol") cfg.fstar_tol = require_number(value, key);
    else if (key == "fstar_max_iters") cfg.fstar_max_iters = require_int(value, key);
    else throw ConfigError(origin + ": unknown config key \"" + key + "\"");
  }

  for (const char* required : {"task", "topology", "n", "compressor", "eta", "q_steps",
                               "iters", "seed"})
    if (!seen.count(required))
      throw ConfigError(origin + ": missing required config key \"" + std::string(required) + "\"");
  if (!seen.count("gamma") && cfg.algorithm != "dgd" && cfg.algorithm != "centralized")
    throw ConfigError(origin + ": missing required config key \"gamma\"");

  if (cfg.task != "syn1" && cfg.task != "syn2" && cfg.task != "mnist")
    throw ConfigError("config field \"task\" must be syn1, syn2 or mnist");
  if (cfg.task != "mnist") {
    for (const char* required : {"m", "d", "noise_var"})
      if (!seen.count(required))
        throw ConfigError(origin + ": synthetic tasks require config key \"" +
                          std::string(required) + "\"");
  } else {
    for (const char* invalid : {"d", "noise_var"})
      if (seen.count(invalid))
        throw ConfigError(origin + ": config key \"" + std::string(invalid) +
                          "\" is only valid for synthetic tasks");
  }
  if (!cfg.partition.empty() && cfg.partition != "even" && cfg.partition != "sorted")
    throw ConfigError("config field \"partition\" must be even or sorted");
  if (cfg.partition.empty()) cfg.partition = cfg.task == "mnist" ? "sorted" : "even";
  if (cfg.algorithm != "deli_coco" && cfg.algorithm != "dgd" && cfg.algorithm != "centralized")
    throw ConfigError("config field \"algorithm\" must be deli_coco, dgd or centralized");
  if (cfg.repeats < 1) throw ConfigError("config field \"repeats\" must be >= 1");
  bit_cost_mode_from_string(cfg.bit_mode);
  parse_compressor(cfg.compressor);
  topology_kind_from_string(cfg.topology);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_experiment_config(ss.str(), path);
}

namespace {

Dataset build_dataset(const ExperimentConfig& cfg, Vector* theta_star_out) {
  if (cfg.task == "mnist") {
    std::string images = cfg.mnist_images;
    std::string labels = cfg.mnist_labels;
    if (images.empty() || labels.empty()) {
      const char* dir = std::getenv("DELICOCO_MNIST_DIR");
      if (dir == nullptr)
        throw ConfigError("mnist task needs mnist_images/mnist_labels in the config or DELICOCO_MNIST_DIR set");
      if (images.empty()) images = std::string(dir) + "/train-images-idx3-ubyte";
      if (labels.empty()) labels = std::string(dir) + "/train-labels-idx1-ubyte";
    }
    Dataset ds = load_mnist_binary(images, labels);
    if (cfg.m > 0 && cfg.m < ds.sample_count()) {
      Dataset cut;
      cut.task = ds.task;
      cut.features = Matrix(cfg.m, ds.dim());
      cut.labels.assign(ds.labels.begin(), ds.labels.begin() + cfg.m);
      std::copy(ds.features.data.begin(),
                ds.features.data.begin() + static_cast<size_t>(cfg.m) * ds.dim(),
                cut.features.data.begin());
      return cut;
    }
    return ds;
  }

  SeededRng rng = SeededRng::substream(cfg.seed, {streams::kData});
  SynData syn = cfg.task == "syn1" ? gen_syn1(rng, cfg.m, cfg.d, cfg.noise_var)
                                   : gen_syn2(rng, cfg.m, cfg.d, cfg.noise_var);
  if (theta_star_out != nullptr) *theta_star_out = syn.theta_star;
  return std::move(syn.dataset);
}

DistributedObjective build_objective(const ExperimentConfig& cfg, Dataset ds) {
  Partition part = cfg.partition == "sorted" ? partition_sorted(ds, cfg.n)
                                             : partition_even(ds.sample_count(), cfg.n);
  return make_objective(std::move(ds), std::move(part), cfg.l2);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Everything f* depends on: the dataset, its partition into nodes, the
// regularizer, and the solve tolerance.
std::string fstar_cache_key(const ExperimentConfig& cfg) {
  std::string key = "task=" + cfg.task;
  if (cfg.task == "mnist") {
    key += ";images=" + cfg.mnist_images + ";labels=" + cfg.mnist_labels;
    if (cfg.m > 0) key += ";m=" + std::to_string(cfg.m);
  } else {
    key += ";m=" + std::to_string(cfg.m) + ";d=" + std::to_string(cfg.d) +
           ";noise_var=" + format_double(cfg.noise_var) + ";seed=" + std::to_string(cfg.seed);
  }
  key += ";l2=" + format_double(cfg.l2) + ";n=" + std::to_string(cfg.n) +
         ";partition=" + cfg.partition + ";tol=" + format_double(cfg.fstar_tol);
  return key;
}

struct FstarResult {
  double f_star;
  Vector x_star;
  bool tol_met;
  std::string cache_path;
};

FstarResult resolve_fstar(const ExperimentConfig& cfg, const DistributedObjective& obj,
                          const Vector* start) {
  const std::string key = fstar_cache_key(cfg);
  char hex[24];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, fnv1a64(key));
  std::filesystem::create_directories(cfg.out_dir);
  FstarResult res;
  res.cache_path = cfg.out_dir + "/fstar_" + hex + ".json";

  if (std::filesystem::exists(res.cache_path)) {
    std::ifstream f(res.cache_path);
    json doc;
    try {
      f >> doc;
    } catch (const json::parse_error& e) {
      throw IoError(res.cache_path + ": invalid cache file: " + e.what());
    }
    if (doc.value("key", "") == key) {
      res.f_star = doc.at("f_star").get<double>();
      res.x_star = doc.at("x_star").get<Vector>();
      res.tol_met = doc.at("tol_met").get<bool>();
      return res;
    }
    // Key mismatch (hash collision or stale file): recompute below.
  }

  double step = cfg.fstar_step;
  if (step <= 0.0) {
    // Safe default: 1 / L with L = sum_i L_i an upper bound on the
    // curvature of f.
    const SmoothnessEstimate est = estimate_constants(obj);
    step = 1.0 / (est.l_avg * obj.n);
  }
  const OptimResult opt = centralized_optimum(obj, step, cfg.fstar_tol, cfg.fstar_max_iters, start);
  res.f_star = opt.f_star;
  res.x_star = opt.x_star;
  res.tol_met = opt.tol_met;

  json doc;
  doc["key"] = key;
  doc["f_star"] = opt.f_star;
  doc["x_star"] = opt.x_star;
  doc["tol_met"] = opt.tol_met;
  doc["iters"] = opt.iters;
  doc["grad_norm"] = opt.grad_norm;
  doc["step"] = step;
  write_text_file_atomic(res.cache_path, doc.dump(2) + "\n");
  return res;
}

}  // namespace

Vector relu_start_point(std::uint64_t master_seed, int d) {
  SeededRng rng = SeededRng::substream(master_seed, {streams::kInit});
  Vector x(static_cast<size_t>(d));
  for (double& v : x) v = 0.1 * rng.next_gaussian();
  return x;
}

Matrix consensual_columns(const Vector& x, int n) {
  Matrix m(static_cast<int>(x.size()), n);
  for (int c = 0; c < n; ++c) set_col(m, c, x);
  return m;
}

PreparedExperiment prepare_experiment(const ExperimentConfig& cfg) {
  PreparedExperiment prep;
  prep.obj = build_objective(cfg, build_dataset(cfg, nullptr));

  const Topology topo = build_topology(topology_kind_from_string(cfg.topology), cfg.n);
  prep.mixing = metropolis_mixing(topo);

  const CompressorSpec comp = parse_compressor(cfg.compressor);
  prep.omega = omega_of(comp, prep.obj.dataset.dim());
  if (cfg.gamma_auto) {
    if (!prep.mixing.connected)
      throw ConfigError("gamma=\"auto\" needs a connected topology (spectral gap is zero)");
    prep.gamma_used = consensus_lr(prep.mixing.delta, prep.omega, prep.mixing.lambda_max_i_minus_w);
  } else {
    prep.gamma_used = cfg.gamma;
  }

  if (prep.obj.dataset.task == TaskKind::relu)
    prep.x_init = relu_start_point(cfg.seed, prep.obj.dataset.dim());

  const FstarResult fstar =
      resolve_fstar(cfg, prep.obj, prep.x_init.empty() ? nullptr : &prep.x_init);
  prep.f_star = fstar.f_star;
  prep.x_star = fstar.x_star;
  prep.fstar_tol_met = fstar.tol_met;
  prep.fstar_cache_path = fstar.cache_path;

  prep.algo.eta = cfg.eta;
  prep.algo.gamma = cfg.algorithm == "deli_coco" ? prep.gamma_used : 1.0;
  prep.algo.q_steps = cfg.q_steps;
  prep.algo.iters = cfg.iters;
  prep.algo.compressor = comp;
  prep.algo.mixing = prep.mixing;
  prep.algo.bit_mode = bit_cost_mode_from_string(cfg.bit_mode);
  prep.algo.seed = cfg.seed;
  return prep;
}

std::uint64_t repeat_seed(std::uint64_t master_seed, int repeat_index) {
  if (repeat_index == 0) return master_seed;
  return SeededRng::fold_seed(SeededRng::fold_seed(master_seed, streams::kRepeat),
                              static_cast<std::uint64_t>(repeat_index));
}

std::uint64_t sweep_seed(std::uint64_t master_seed, int value_index) {
  return SeededRng::fold_seed(SeededRng::fold_seed(master_seed, streams::kSweep),
                              static_cast<std::uint64_t>(value_index));
}

namespace {

RunTrace run_algorithm(const ExperimentConfig& cfg, const PreparedExperiment& prep,
                       std::uint64_t run_seed) {
  AlgoConfig algo = prep.algo;
  algo.seed = run_seed;
  const bool seeded_init = !prep.x_init.empty();
  const Matrix x0 = seeded_init ? consensual_columns(prep.x_init, prep.obj.n) : Matrix();
  RunTrace trace;
  if (cfg.algorithm == "dgd") {
    trace = dgd(algo, prep.obj, prep.f_star, seeded_init ? &x0 : nullptr);
  } else if (cfg.algorithm == "centralized") {
    trace = centralized_gd(algo, prep.obj, prep.f_star, seeded_init ? &prep.x_init : nullptr);
  } else {
    trace = deli_coco(algo, prep.obj, prep.f_star, seeded_init ? &x0 : nullptr);
  }
  trace.metadata["init"] = seeded_init ? "consensual_seeded" : "zero";
  trace.metadata["topology"] = cfg.topology;
  trace.metadata["partition"] = cfg.partition;
  trace.metadata["omega"] = format_double(prep.omega);
  trace.metadata["gamma_mode"] = cfg.gamma_auto ? "auto" : "fixed";
  trace.metadata["delta"] = format_double(prep.mixing.delta);
  trace.metadata["lambda_max_i_minus_w"] = format_double(prep.mixing.lambda_max_i_minus_w);
  trace.metadata["fstar_tol_met"] = prep.fstar_tol_met ? "true" : "false";
  trace.metadata["master_seed"] = std::to_string(cfg.seed);
  return trace;
}

RunTrace mean_trace(const std::vector<RunTrace>& traces) {
  RunTrace mean = traces.front();
  for (TraceRow& row : mean.rows) {
    row.suboptimality = 0.0;
    row.consensus_error = 0.0;
    row.feedback_gap = 0.0;
  }
  for (const RunTrace& t : traces)
    for (size_t i = 0; i < mean.rows.size(); ++i) {
      mean.rows[i].suboptimality += t.rows[i].suboptimality / traces.size();
      mean.rows[i].consensus_error += t.rows[i].consensus_error / traces.size();
      mean.rows[i].feedback_gap += t.rows[i].feedback_gap / traces.size();
    }
  mean.metadata["repeats"] = std::to_string(traces.size());
  return mean;
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg) {
  const PreparedExperiment prep = prepare_experiment(cfg);
  std::filesystem::create_directories(cfg.out_dir);

  RunOutput out;
  std::vector<RunTrace> traces;
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    RunTrace trace = run_algorithm(cfg, prep, repeat_seed(cfg.seed, rep));
    trace.metadata["repeat"] = std::to_string(rep);
    const std::string path = cfg.repeats == 1
                                 ? cfg.out_dir + "/trace.csv"
                                 : cfg.out_dir + "/trace_rep" + std::to_string(rep) + ".csv";
    write_trace_csv(trace, path);
    out.trace_paths.push_back(path);
    out.final_suboptimality += trace.rows.back().suboptimality / cfg.repeats;
    traces.push_back(std::move(trace));
  }
  if (cfg.repeats > 1) {
    out.mean_trace_path = cfg.out_dir + "/trace_mean.csv";
    write_trace_csv(mean_trace(traces), out.mean_trace_path);
  }
  return out;
}

namespace {

ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis,
                            const std::string& value) {
  ExperimentConfig cfg = base;
  if (axis == "q_steps") cfg.q_steps = std::stoi(value);
  else if (axis == "gamma") {
    if (value == "auto") {
      cfg.gamma_auto = true;
    } else {
      cfg.gamma_auto = false;
      cfg.gamma = std::stod(value);
    }
  } else if (axis == "n") cfg.n = std::stoi(value);
  else if (axis == "topology") cfg.topology = value;
  else if (axis == "compressor") cfg.compressor = value;
  else throw ConfigError("unknown sweep axis \"" + axis +
                         "\" (expected q_steps|gamma|n|topology|compressor)");
  return cfg;
}

std::string sanitize_for_filename(std::string s) {
  for (char& c : s)
    if (c == ':' || c == '/' || c == '.') c = '_';
  return s;
}

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

}  // namespace

SweepOutput run_sweep(const ExperimentConfig& cfg, const std::string& axis,
                      const std::vector<std::string>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::filesystem::create_directories(cfg.out_dir);

  SweepOutput out;
  for (size_t vi = 0; vi < values.size(); ++vi) {
    SweepEntryResult entry;
    entry.value = values[vi];
    try {
      const ExperimentConfig vcfg = apply_axis(cfg, axis, values[vi]);
      const PreparedExperiment prep = prepare_experiment(vcfg);
      entry.gamma_used = prep.gamma_used;

      std::vector<RunTrace> traces;
      double final_sub = 0.0, final_cons = 0.0;
      for (int rep = 0; rep < vcfg.repeats; ++rep) {
        const std::uint64_t run_seed =
            repeat_seed(sweep_seed(cfg.seed, static_cast<int>(vi)), rep);
        RunTrace trace = run_algorithm(vcfg, prep, run_seed);
        trace.metadata["sweep_axis"] = axis;
        trace.metadata["sweep_value"] = values[vi];
        final_sub += trace.rows.back().suboptimality / vcfg.repeats;
        final_cons += trace.rows.back().consensus_error / vcfg.repeats;
        traces.push_back(std::move(trace));
      }
      entry.total_bits = traces.front().rows.back().cumulative_bits;
      entry.final_suboptimality = final_sub;
      entry.final_consensus_error = final_cons;
      entry.trace_path = cfg.out_dir + "/sweep_" + axis + "_" +
                         sanitize_for_filename(values[vi]) + ".csv";
      write_trace_csv(traces.size() == 1 ? traces.front() : mean_trace(traces), entry.trace_path);
      entry.status = "ok";
    } catch (const ConfigError& e) {
      entry.status = "config_error";
      entry.message = e.what();
      out.all_ok = false;
    } catch (const DivergenceError& e) {
      entry.status = "divergence";
      entry.message = e.what();
      out.all_ok = false;
    } catch (const IoError& e) {
      entry.status = "io_error";
      entry.message = e.what();
      out.all_ok = false;
    }
    out.entries.push_back(std::move(entry));
  }

  std::string csv = "axis,value,status,gamma,final_suboptimality,final_consensus_error,total_bits,trace,message\n";
  for (const SweepEntryResult& e : out.entries) {
    csv += axis + "," + e.value + "," + e.status + "," + format_double(e.gamma_used) + "," +
           format_double(e.final_suboptimality) + "," + format_double(e.final_consensus_error) +
           "," + std::to_string(e.total_bits) + "," + e.trace_path + "," + csv_safe(e.message) +
           "\n";
  }
  out.summary_path = cfg.out_dir + "/sweep_" + axis + "_summary.csv";
  write_text_file_atomic(out.summary_path, csv);
  return out;
}

std::vector<BudgetPair> derive_budget_pairs(const std::string& mode, int base_q,
                                            double base_param, const std::vector<int>& c_list,
                                            int d) {
  if (mode != "qsgd_bits" && mode != "topk_fraction")
    throw ConfigError("budget mode must be qsgd_bits or topk_fraction");
  if (base_q < 1) throw ConfigError("budget base Q must be >= 1");
  if (c_list.empty()) throw ConfigError("budget needs at least one multiplier");

  std::vector<BudgetPair> pairs;
  for (int c : c_list) {
    if (c < 1) throw ConfigError("budget multiplier must be a positive integer, got " +
                                 std::to_string(c));
    BudgetPair pair;
    pair.q_steps = base_q * c;
    pair.param = base_param / c;
    if (mode == "qsgd_bits") {
      const double rounded = std::round(pair.param);
      if (std::fabs(pair.param - rounded) > 1e-12 || rounded < 1.0)
        throw ConfigError("budget pair (Q=" + std::to_string(pair.q_steps) + ", b=" +
                          format_double(pair.param) + ") has a non-integer or sub-1 bit width");
      pair.param = rounded;
      pair.spec = CompressorSpec{CompressorKind::qsgd, pair.param};
    } else {
      pair.spec = CompressorSpec{CompressorKind::top_k, pair.param};
      validate_compressor(pair.spec);
    }
    pairs.push_back(pair);
  }

  // All pairs must charge exactly equal nominal bits per gossip-iteration.
  const std::int64_t base_bits =
      static_cast<std::int64_t>(pairs.front().q_steps) * message_bits(pairs.front().spec, d, BitCostMode::nominal);
  for (const BudgetPair& pair : pairs) {
    const std::int64_t bits =
        static_cast<std::int64_t>(pair.q_steps) * message_bits(pair.spec, d, BitCostMode::nominal);
    if (bits != base_bits)
      throw ConfigError("budget pair (Q=" + std::to_string(pair.q_steps) + ", param=" +
                        format_double(pair.param) + ") costs " + std::to_string(bits) +
                        " bits per iteration, base pair costs " + std::to_string(base_bits));
  }
  return pairs;
}

BudgetOutput run_budget(const ExperimentConfig& cfg, const std::string& mode, int base_q,
                        double base_param, const std::vector<int>& c_list) {
  // Dimension of the messages: resolved from the data config.
  ExperimentConfig probe = cfg;
  const PreparedExperiment base_prep = prepare_experiment(probe);
  const int d = base_prep.obj.dataset.dim();
  const std::vector<BudgetPair> pairs = derive_budget_pairs(mode, base_q, base_param, c_list, d);
  std::filesystem::create_directories(cfg.out_dir);

  BudgetOutput out;
  std::vector<RunTrace> reported;
  std::vector<std::string> labels;
  for (size_t pi = 0; pi < pairs.size(); ++pi) {
    ExperimentConfig pcfg = cfg;
    pcfg.q_steps = pairs[pi].q_steps;
    pcfg.compressor = to_string(pairs[pi].spec);
    const PreparedExperiment prep = prepare_experiment(pcfg);

    std::vector<RunTrace> traces;
    double final_sub = 0.0;
    for (int rep = 0; rep < pcfg.repeats; ++rep) {
      const std::uint64_t run_seed = repeat_seed(sweep_seed(cfg.seed, static_cast<int>(pi)), rep);
      RunTrace trace = run_algorithm(pcfg, prep, run_seed);
      trace.metadata["budget_mode"] = mode;
      final_sub += trace.rows.back().suboptimality / pcfg.repeats;
      traces.push_back(std::move(trace));
    }
    const std::string label = "q" + std::to_string(pairs[pi].q_steps) + "_" +
                              sanitize_for_filename(format_double(pairs[pi].param));
    const std::string path = cfg.out_dir + "/budget_" + label + ".csv";
    write_trace_csv(traces.size() == 1 ? traces.front() : mean_trace(traces), path);
    out.trace_paths.push_back(path);
    out.final_suboptimality.push_back(final_sub);
    reported.push_back(traces.size() == 1 ? std::move(traces.front()) : mean_trace(traces));
    labels.push_back("loss_" + label);
  }

  // All pairs share the bit schedule, so cumulative bits key the rows.
  std::string csv = "cumulative_bits";
  for (const std::string& label : labels) csv += "," + label;
  csv += "\n";
  for (size_t r = 0; r < reported.front().rows.size(); ++r) {
    csv += std::to_string(reported.front().rows[r].cumulative_bits);
    for (const RunTrace& t : reported) csv += "," + format_double(t.rows[r].suboptimality);
    csv += "\n";
  }
  out.summary_path = cfg.out_dir + "/budget_" + mode + "_summary.csv";
  write_text_file_atomic(out.summary_path, csv);
  return out;
}

std::string theory_table(const std::vector<double>& deltas, const std::vector<double>& omegas,
                         const std::vector<double>& lambda_maxes, double rho_bar, int q_base,
                         const std::vector<int>& c_list) {
  std::string csv = "delta,omega,lambda_max_i_minus_w,gamma,per_round_rate,shorthand_rate,q0";
  for (int c : c_list) csv += ",g_c" + std::to_string(c);
  csv += "\n";
  for (double delta : deltas)
    for (double omega : omegas)
      for (double lm : lambda_maxes) {
        const double gamma = consensus_lr(delta, omega, lm);
        const double rate = 1.0 - delta * gamma / 2.0;
        const int q0 = q_min_plc(rho_bar, delta, gamma);
        csv += format_double(delta);
        csv += "," + format_double(omega);
        csv += "," + format_double(lm);
        csv += "," + format_double(gamma);
        csv += "," + format_double(rate);
        csv += "," + format_double(gossip_rate_shorthand(delta, omega));
        csv += "," + std::to_string(q0);
        for (int c : c_list) csv += "," + format_double(budget_tradeoff(delta, omega, q_base, c));
        csv += "\n";
      }
  return csv;
}

std::string generate_dataset(const ExperimentConfig& cfg, const std::string& out_path) {
  Vector theta;
  const Dataset ds = build_dataset(cfg, &theta);
  save_dataset_csv(ds, out_path);
  if (!theta.empty()) {
    json doc;
    doc["theta_star"] = theta;
    doc["task"] = cfg.task;
    doc["m"] = cfg.m;
    doc["d"] = cfg.d;
    doc["noise_var"] = cfg.noise_var;
    doc["seed"] = cfg.seed;
    write_text_file_atomic(out_path + ".theta.json", doc.dump(2) + "\n");
  }
  return out_path;
}

}  // namespace delicoco

// SPDX-License-Identifier: Apache-2.0
#include "fpinn/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fpinn/checkpoint.hpp"
#include "fpinn/error.hpp"
#include "fpinn/io.hpp"
#include "fpinn/metrics.hpp"
#include "fpinn/plot.hpp"
#include "fpinn/serialize.hpp"
#include "fpinn/trainer.hpp"

#ifndef FPINN_VERSION
#define FPINN_VERSION "unknown"
#endif

namespace fpinn::cli {

namespace fs = std::filesystem;

namespace {

/// An output directory that must not exist yet. Every file written through
/// it is hashed into the manifest.
class RunDir {
 public:
  RunDir(const fs::path& path, std::string command, const CommonOptions& opts, const ExperimentConfig& cfg)
      : path_(path) {
    if (fs::exists(path_)) {
      throw ValidationError("output directory " + path_.string() +
                            " already exists; run directories are never overwritten");
    }
    fs::create_directories(path_);
    manifest_ = {{"tool", "fpinn"},
                 {"version", FPINN_VERSION},
                 {"command", std::move(command)},
                 {"invocation", opts.invocation},
                 {"deterministic", cfg.train.deterministic},
                 {"seeds",
                  {{"network", cfg.network.seed},
                   {"train", cfg.train.seed},
                   {"rho_network", cfg.rho_network.seed},
                   {"rho_train", cfg.rho_train.seed}}},
                 {"files", Json::object()}};
    write("config.json", to_json(cfg).dump(2) + "\n");
  }

  const fs::path& path() const { return path_; }

  void write(const std::string& name, const std::string& content) {
    write_new_file(path_ / name, content);
    manifest_["files"][name] = "fnv1a64:" + hex64(fnv1a64(content));
  }
  void write_csv(const std::string& name, const CsvTable& t) { write(name, format_csv(t)); }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  /// Binary files are written by their own serializer; only the hash is recorded.
  void record_file(const std::string& name) {
    std::ifstream f(path_ / name, std::ios::binary);
    std::stringstream buf;
    buf << f.rdbuf();
    manifest_["files"][name] = "fnv1a64:" + hex64(fnv1a64(buf.str()));
  }

  Json& manifest() { return manifest_; }
  void finish() { write_new_file(path_ / "manifest.json", manifest_.dump(2) + "\n"); }

 private:
  fs::path path_;
  Json manifest_;
};

Json checkpoint_meta(const std::string& phase, const ExperimentConfig& cfg) {
  const Json full = to_json(cfg);
  return {{"phase", phase}, {"system", full["system"]}, {"grid", full["grid"]}, {"version", FPINN_VERSION}};
}

EpochObserver progress(std::ostream& log, const char* phase, int t_max) {
  const int every = std::max(1, t_max / 10);
  return [&log, phase, every, t_max](const LossBreakdown& b) {
    if (b.epoch % every == 0 || b.epoch + 1 == t_max) {
      log << phase << " epoch " << b.epoch << "/" << t_max << "  L_tot " << b.total << "  lr " << b.lr << "\n";
    }
  };
}

Json losses_json(const LossBreakdown& b) { return to_json(b); }

/// Mean fidelity over physical points, with the count of points that failed
/// the physicality check.
std::pair<std::optional<double>, int> robust_avg_fidelity(const Trajectory& pred, const Trajectory& ref) {
  double sum = 0.0;
  int ok = 0;
  int bad = 0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    try {
      sum += fidelity(pred.values[i], ref.values[i]);
      ++ok;
    } catch (const NumericalError&) {
      ++bad;
    }
  }
  if (bad > 0 || ok == 0) return {std::nullopt, bad};
  return {sum / ok, 0};
}

struct Priors {
  Trajectory o;
  Trajectory q;
  Json source;
};

Priors resolve_priors(const std::string& priors, const ExperimentConfig& cfg, const SystemSpec& spec,
                      const OracleResult& oracle) {
  if (priors == "oracle") return {oracle.o, oracle.q, {{"kind", "oracle"}}};
  const Checkpoint ckpt = load_checkpoint(priors);
  const Json& meta = ckpt.meta;
  if (meta.value("phase", "") != "operators") {
    throw ValidationError(priors + ": not an operator checkpoint");
  }
  const Json expected = checkpoint_meta("operators", cfg);
  if (meta.value("grid", Json()) != expected["grid"]) {
    throw ValidationError("prior grid mismatch: checkpoint " + priors + " was trained on " +
                          meta.value("grid", Json()).dump() + " but the config asks for " +
                          expected["grid"].dump());
  }
  const Json& ms = meta.value("system", Json::object());
  const Json& es = expected["system"];
  for (const char* key : {"name", "Gamma", "gamma", "T"}) {
    if (ms.value(key, Json()) != es[key]) {
      throw ValidationError(std::string("prior system mismatch on '") + key + "': checkpoint " + priors +
                            " has " + ms.value(key, Json()).dump() + ", config has " + es[key].dump());
    }
  }
  const Model model = model_from_checkpoint(ckpt);
  auto pred = predict_operators(model, spec, cfg.time_grid());
  std::ifstream f(priors, std::ios::binary);
  std::stringstream buf;
  buf << f.rdbuf();
  return {std::move(pred.o), std::move(pred.q),
          {{"kind", "checkpoint"}, {"path", priors}, {"hash", "fnv1a64:" + hex64(fnv1a64(buf.str()))}}};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentConfig resolve_config(const CommonOptions& opts) {
  std::vector<std::string> overrides = opts.overrides;
  if (opts.seed) {
    const std::string s = std::to_string(*opts.seed);
    for (const char* key : {"network.seed", "train.seed", "rho_network.seed", "rho_train.seed"}) {
      overrides.push_back(std::string(key) + "=" + s);
    }
  }
  if (opts.out) overrides.push_back("output=" + Json(opts.out->string()).dump());
  if (opts.deterministic) {
    overrides.emplace_back("train.deterministic=true");
    overrides.emplace_back("rho_train.deterministic=true");
  }
  return load_experiment_config(opts.config, overrides);
}

int cmd_oracle(const CommonOptions& opts, std::ostream& log) {
  const ExperimentConfig cfg = resolve_config(opts);
  const SystemSpec spec = cfg.system_spec();
  RunDir dir(cfg.output, "oracle", opts, cfg);
  const OracleResult res = integrate_system(spec, cfg.initial_state(), cfg.time_grid(), cfg.oracle_substeps);
  for (const auto& w : res.warnings) log << "warning: " << w << "\n";
  dir.write_csv("oracle_O.csv", operator_table(res.o, spec.o_layout, "O"));
  dir.write_csv("oracle_Q.csv", operator_table(res.q, spec.q_layout, "Q"));
  dir.write_csv("oracle_rho.csv", density_table(res.rho, spec.rho_layout));
  dir.write_csv("oracle_observables.csv", observables_table(res.rho, spec));
  dir.manifest()["oracle"] = {{"substeps", cfg.oracle_substeps},
                              {"min_rho_eigenvalue", res.min_rho_eigenvalue},
                              {"warnings", res.warnings}};
  dir.finish();
  log << "oracle: " << cfg.grid.t_f << " samples written to " << dir.path().string() << "\n";
  return 0;
}

int cmd_train_operators(const CommonOptions& opts, std::ostream& log) {
  const ExperimentConfig cfg = resolve_config(opts);
  const SystemSpec spec = cfg.system_spec();
  const TimeGrid grid = cfg.time_grid();
  RunDir dir(cfg.output, "train-operators", opts, cfg);
  const OracleResult oracle = integrate_system(spec, cfg.initial_state(), grid, cfg.oracle_substeps);

  TrainResult run = train_operators(spec, cfg.network, cfg.train, grid, progress(log, "operators", cfg.train.t_max));
  save_checkpoint(dir.path() / "operators.ckpt", cfg.network, run.model.params, checkpoint_meta("operators", cfg));
  dir.record_file("operators.ckpt");
  run.record.checkpoint = "operators.ckpt";

  const OperatorPrediction pred = predict_operators(run.model, spec, grid);
  const double eps_o = avg_frobenius_error(pred.o, oracle.o);
  const double eps_q = avg_frobenius_error(pred.q, oracle.q);
  dir.write_json("run_record.json", to_json(run.record));
  dir.write_csv("losses.csv", loss_table(run.record));
  dir.write_csv("pred_O.csv", operator_table(pred.o, spec.o_layout, "O"));
  dir.write_csv("pred_Q.csv", operator_table(pred.q, spec.q_layout, "Q"));
  dir.write_csv("oracle_O.csv", operator_table(oracle.o, spec.o_layout, "O"));
  dir.write_csv("oracle_Q.csv", operator_table(oracle.q, spec.q_layout, "Q"));
  const Json report = {{"variant", cfg.train.lambda_er == 0.0 ? "no-ER" : "ER"},
                       {"architecture", to_string(cfg.network.architecture)},
                       {"epochs", cfg.train.t_max},
                       {"eps_O", eps_o},
                       {"eps_Q", eps_q},
                       {"final_eval", losses_json(run.record.final_eval)},
                       {"wall_seconds", run.record.wall_seconds}};
  dir.write_json("report.json", report);
  dir.finish();
  log << "train-operators: eps(O) = " << eps_o << ", eps(Q) = " << eps_q << " [" << report["variant"].get<std::string>()
      << "] -> " << dir.path().string() << "\n";
  return 0;
}

int cmd_train_rho(const CommonOptions& opts, const std::string& priors, std::ostream& log) {
  const ExperimentConfig cfg = resolve_config(opts);
  const SystemSpec spec = cfg.system_spec();
  const TimeGrid grid = cfg.time_grid();
  const ComplexMatrix rho0 = cfg.initial_state();
  const OracleResult oracle = integrate_system(spec, rho0, grid, cfg.oracle_substeps);
  // Resolve priors before creating the run directory so a bad prior leaves nothing behind.
  const Priors p = resolve_priors(priors, cfg, spec, oracle);
  RunDir dir(cfg.output, "train-rho", opts, cfg);

  TrainResult run = train_rho(spec, rho0, p.o, p.q, cfg.rho_network, cfg.rho_train, grid,
                              progress(log, "rho", cfg.rho_train.t_max));
  save_checkpoint(dir.path() / "rho.ckpt", cfg.rho_network, run.model.params, checkpoint_meta("rho", cfg));
  dir.record_file("rho.ckpt");
  run.record.checkpoint = "rho.ckpt";

  const Trajectory pred = predict_rho(run.model, spec, grid);
  const auto [fid, unphysical] = robust_avg_fidelity(pred, oracle.rho);
  dir.write_json("run_record.json", to_json(run.record));
  dir.write_csv("losses.csv", loss_table(run.record));
  dir.write_csv("pred_rho.csv", density_table(pred, spec.rho_layout));
  dir.write_csv("observables.csv", observables_table(pred, spec, &oracle.rho));
  dir.write_csv("oracle_rho.csv", density_table(oracle.rho, spec.rho_layout));
  dir.write_csv("oracle_observables.csv", observables_table(oracle.rho, spec));
  Json report = {{"priors", p.source},
                 {"rho0", to_string(cfg.system.rho0)},
                 {"avg_fidelity", fid ? Json(*fid) : Json()},
                 {"unphysical_points", unphysical},
                 {"final_eval", losses_json(run.record.final_eval)},
                 {"wall_seconds", run.record.wall_seconds}};
  dir.write_json("report.json", report);
  dir.manifest()["priors"] = p.source;
  dir.finish();
  log << "train-rho: average fidelity "
      << (fid ? std::to_string(*fid) : "n/a (" + std::to_string(unphysical) + " unphysical points)") << " -> "
      << dir.path().string() << "\n";
  return 0;
}

int cmd_compare_architectures(const CommonOptions& opts, const std::vector<std::string>& architectures,
                              const std::vector<std::uint64_t>& seeds, std::ostream& log) {
  const ExperimentConfig cfg = resolve_config(opts);
  if (architectures.empty()) throw ValidationError("compare-architectures: no architectures given");
  if (seeds.empty()) throw ValidationError("compare-architectures: no seeds given");
  std::vector<Architecture> archs;
  for (const auto& a : architectures) {
    archs.push_back(architecture_from_string(a));
    if (archs.back() == Architecture::kPlain) throw ValidationError("compare-architectures: plain has one head");
  }
  const SystemSpec spec = cfg.system_spec();
  const TimeGrid grid = cfg.time_grid();
  RunDir dir(cfg.output, "compare-architectures", opts, cfg);
  const OracleResult oracle = integrate_system(spec, cfg.initial_state(), grid, cfg.oracle_substeps);

  Json runs = Json::array();
  Json summary = Json::object();
  std::vector<std::pair<double, std::string>> ranking;
  for (const Architecture arch : archs) {
    const std::string name = to_string(arch);
    std::vector<double> totals, eps_o, eps_q;
    for (const std::uint64_t seed : seeds) {
      NetworkConfig nc = matched_network(cfg.network, arch);
      nc.seed = seed;
      TrainConfig tc = cfg.train;
      tc.seed = seed;
      log << "compare: " << name << " seed " << seed << " (" << parameter_count(nc) << " parameters)\n";
      const TrainResult run = train_operators(spec, nc, tc, grid, progress(log, name.c_str(), tc.t_max));
      const OperatorPrediction pred = predict_operators(run.model, spec, grid);
      totals.push_back(run.record.final_eval.total);
      eps_o.push_back(avg_frobenius_error(pred.o, oracle.o));
      eps_q.push_back(avg_frobenius_error(pred.q, oracle.q));
      const std::string tag = name + "_seed" + std::to_string(seed);
      dir.write_csv("losses_" + tag + ".csv", loss_table(run.record));
      runs.push_back({{"architecture", name},
                      {"seed", seed},
                      {"parameters", parameter_count(nc)},
                      {"l_tot", totals.back()},
                      {"eps_O", eps_o.back()},
                      {"eps_Q", eps_q.back()},
                      {"wall_seconds", run.record.wall_seconds}});
    }
    summary[name] = {{"min_l_tot", *std::min_element(totals.begin(), totals.end())},
                     {"median_l_tot", median(totals)},
                     {"min_eps_O", *std::min_element(eps_o.begin(), eps_o.end())},
                     {"median_eps_O", median(eps_o)},
                     {"min_eps_Q", *std::min_element(eps_q.begin(), eps_q.end())},
                     {"median_eps_Q", median(eps_q)}};
    ranking.emplace_back(median(totals), name);
  }
  std::stable_sort(ranking.begin(), ranking.end());
  Json order = Json::array();
  for (const auto& r : ranking) order.push_back(r.second);
  const Json report = {{"runs", runs}, {"summary", summary}, {"ranking_by_median_l_tot", order}};
  dir.write_json("comparison.json", report);
  dir.finish();
  for (const auto& r : ranking) log << "  " << r.second << ": median L_tot " << r.first << "\n";
  return 0;
}

int cmd_evaluate(const CommonOptions& opts, const fs::path& checkpoint, const std::string& priors,
                 std::ostream& log) {
  const ExperimentConfig cfg = resolve_config(opts);
  const SystemSpec spec = cfg.system_spec();
  const TimeGrid grid = cfg.time_grid();
  const ComplexMatrix rho0 = cfg.initial_state();
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const std::string phase = ckpt.meta.value("phase", "");
  if (ckpt.meta.value("grid", Json()) != checkpoint_meta(phase, cfg)["grid"]) {
    log << "note: checkpoint was trained on grid " << ckpt.meta.value("grid", Json()).dump()
        << "; evaluating on the config grid\n";
  }
  const Model model = model_from_checkpoint(ckpt);
  const OracleResult oracle = integrate_system(spec, rho0, grid, cfg.oracle_substeps);
  RunDir dir(cfg.output, "evaluate", opts, cfg);
  Json report = {{"checkpoint", checkpoint.string()}, {"phase", phase}};
  if (phase == "operators") {
    const OperatorPrediction pred = predict_operators(model, spec, grid);
    report["eps_O"] = avg_frobenius_error(pred.o, oracle.o);
    report["eps_Q"] = avg_frobenius_error(pred.q, oracle.q);
    report["eval_losses"] = losses_json(operator_losses(model, spec, cfg.train, grid));
    dir.write_csv("pred_O.csv", operator_table(pred.o, spec.o_layout, "O"));
    dir.write_csv("pred_Q.csv", operator_table(pred.q, spec.q_layout, "Q"));
    log << "evaluate: eps(O) = " << report["eps_O"] << ", eps(Q) = " << report["eps_Q"] << "\n";
  } else if (phase == "rho") {
    const Trajectory pred = predict_rho(model, spec, grid);
    const auto [fid, unphysical] = robust_avg_fidelity(pred, oracle.rho);
    report["avg_fidelity"] = fid ? Json(*fid) : Json();
    report["unphysical_points"] = unphysical;
    const Priors p = resolve_priors(priors, cfg, spec, oracle);
    report["eval_losses"] = losses_json(rho_losses(model, spec, rho0, p.o, p.q, cfg.rho_train, grid));
    report["priors"] = p.source;
    dir.write_csv("pred_rho.csv", density_table(pred, spec.rho_layout));
    dir.write_csv("observables.csv", observables_table(pred, spec, &oracle.rho));
    log << "evaluate: average fidelity " << report["avg_fidelity"] << "\n";
  } else {
    throw ValidationError(checkpoint.string() + ": unknown checkpoint phase '" + phase + "'");
  }
  dir.write_json("report.json", report);
  dir.finish();
  return 0;
}

int cmd_plot(const std::vector<PlotInput>& inputs, const std::vector<std::string>& columns, const fs::path& output,
             const std::string& title, std::ostream& log) {
  if (inputs.empty()) throw ValidationError("plot: no input files");
  if (columns.empty()) throw ValidationError("plot: no columns requested");
  std::vector<PlotSeries> series;
  std::string x_name;
  for (const auto& in : inputs) {
    const CsvTable table = read_csv(in.file);
    const std::string x = std::find(table.columns.begin(), table.columns.end(), "t") != table.columns.end() ? "t"
                          : std::find(table.columns.begin(), table.columns.end(), "epoch") != table.columns.end()
                              ? "epoch"
                              : table.columns.front();
    if (x_name.empty()) x_name = x;
    const std::string label = in.label.empty() ? in.file.stem().string() : in.label;
    for (const auto& c : columns) {
      try {
        series.push_back({inputs.size() > 1 ? label + ": " + c : c, table.values(x), table.values(c)});
      } catch (const ValidationError& e) {
        throw ValidationError(in.file.string() + ": " + e.what());
      }
    }
  }
  PlotOptions options;
  options.title = title;
  options.x_label = x_name;
  options.y_label = columns.size() == 1 ? columns.front() : std::string();
  write_new_file(output, render_svg(series, options));
  log << "plot: " << series.size() << " series -> " << output.string() << "\n";
  return 0;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return 2;
  return 1;
}

}  // namespace fpinn::cli

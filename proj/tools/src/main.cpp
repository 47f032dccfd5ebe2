// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fpinn/cli/commands.hpp"
#include "fpinn/error.hpp"

namespace {

void add_common(CLI::App* cmd, fpinn::cli::CommonOptions& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Run directory to create (overrides the config's output)");
  cmd->add_option("--seed", o.seed, "Seed for both networks and both training phases");
  cmd->add_option("--override", o.overrides, "Config override, dotted.key=value (repeatable)");
  cmd->add_flag("--deterministic", o.deterministic, "Force deterministic execution");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fpinn::cli;
  CLI::App app{"Forked physics-informed networks for non-Markovian open quantum dynamics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FPINN_VERSION);

  std::string invocation;
  for (int i = 0; i < argc; ++i) invocation += (i ? " " : "") + std::string(argv[i]);

  CommonOptions common;
  common.invocation = invocation;

  auto* oracle = app.add_subcommand("oracle", "Integrate the reference solution with RK4");
  add_common(oracle, common);

  auto* train_ops = app.add_subcommand("train-operators", "Train the operator network (phase 1)");
  add_common(train_ops, common);

  std::string priors = "oracle";
  auto* train_rho = app.add_subcommand("train-rho", "Train the density-matrix network (phase 2)");
  add_common(train_rho, common);
  train_rho->add_option("--priors", priors, "'oracle' or an operator checkpoint path");

  std::string arch_list = "forked,unified,separated";
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  auto* compare = app.add_subcommand("compare-architectures", "Train forked, unified and separated networks");
  add_common(compare, common);
  compare->add_option("--architectures", arch_list, "Comma-separated architectures");
  compare->add_option("--seeds", seeds, "Seeds per architecture")->delimiter(',');

  std::string checkpoint;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint against the oracle");
  add_common(evaluate, common);
  evaluate->add_option("--checkpoint", checkpoint, "Checkpoint to evaluate")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--priors", priors, "Operator priors for rho checkpoints");

  std::vector<std::string> plot_inputs;
  std::string plot_columns;
  std::string plot_output;
  std::string plot_title;
  auto* plot = app.add_subcommand("plot", "Render CSV columns as an SVG line plot");
  plot->add_option("--input", plot_inputs, "CSV file, optionally file.csv:label (repeatable)")->required();
  plot->add_option("--columns", plot_columns, "Comma-separated column names")->required();
  plot->add_option("--output", plot_output, "SVG file to create")->required();
  plot->add_option("--title", plot_title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*oracle) return cmd_oracle(common, std::cout);
    if (*train_ops) return cmd_train_operators(common, std::cout);
    if (*train_rho) return cmd_train_rho(common, priors, std::cout);
    if (*compare) return cmd_compare_architectures(common, split_list(arch_list), seeds, std::cout);
    if (*evaluate) return cmd_evaluate(common, checkpoint, priors, std::cout);
    if (*plot) {
      std::vector<PlotInput> inputs;
      for (const auto& spec : plot_inputs) {
        const auto colon = spec.rfind(':');
        if (colon != std::string::npos && colon + 1 < spec.size() && spec.find(".csv", colon) == std::string::npos) {
          inputs.push_back({spec.substr(0, colon), spec.substr(colon + 1)});
        } else {
          inputs.push_back({spec, ""});
        }
      }
      return cmd_plot(inputs, split_list(plot_columns), plot_output, plot_title, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 1;
}

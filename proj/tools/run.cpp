#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "errmodel/error.hpp"

#ifndef ERRMODEL_DATA_DIR
#define ERRMODEL_DATA_DIR "data"
#endif

namespace errmodel::cli {

namespace {

void print_report(const RunReport& report, bool as_json, std::ostream& out,
                  std::ostream& err) {
  if (as_json) {
    out << report.to_json().dump(2) << '\n';
    return;
  }
  for (const auto& line : report.lines) out << line << '\n';
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  out << "input sha256 " << report.input_sha256 << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Measurement error-model toolkit", "errmodel"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string data_dir = ERRMODEL_DATA_DIR;
  bool as_json = false;
  app.add_option("--data-dir", data_dir, "Directory searched for inputs")
      ->capture_default_str();
  app.add_flag("--json", as_json, "Print the run report as JSON");

  RandomModelOptions rm;
  auto* rm_cmd = app.add_subcommand("random-model", "Mean and std of a column");
  rm_cmd->add_option("input", rm.input, "CSV file")->required();
  rm_cmd->add_option("--column", rm.column, "observed, condition, diff, s1 or s2")
      ->capture_default_str();

  FitOptions fit;
  double quantum = -1.0;
  std::string fit_series;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a function model");
  fit_cmd->add_option("input", fit.input, "CSV file")->required();
  fit_cmd->add_option("--model", fit.model, "poly3, poly, cycle or cycle-diff")
      ->capture_default_str();
  fit_cmd->add_option("--degree", fit.degree, "Degree for --model poly")
      ->capture_default_str();
  fit_cmd->add_option("--wavelength", fit.wavelength, "Cycle wavelength (m)")
      ->capture_default_str();
  fit_cmd->add_flag("--constant-term", fit.constant_term, "Add a constant to the cycle fit");
  fit_cmd->add_option("--error-quantum", quantum,
                      "Round errors to this resolution (default 1 ppm for poly, none "
                      "for cycle)");
  fit_cmd->add_flag("--emit-matrix", fit.emit_matrix, "Include the normal equations");
  fit_cmd->add_option("--emit-series", fit_series, "Directory for x,y curve CSVs");

  SimulateOptions sim;
  std::uint64_t sim_seed = 0;
  std::string sim_series;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a simulation scenario");
  sim_cmd->add_option("scenario", sim.input, "Scenario JSON")->required();
  auto* seed_opt = sim_cmd->add_option("--seed", sim_seed, "Override the scenario seed");
  sim_cmd->add_option("--emit-series", sim_series, "Write the simulated series CSV");
  sim_cmd->add_flag("--classify", sim.classify, "Classify per-source effects");
  sim_cmd->add_flag("--regen-table3", sim.regen_table3,
                    "Regenerate the differential fixture and diff it");

  PropagateOptions prop;
  std::size_t mc_n = 0;
  auto* prop_cmd = app.add_subcommand("propagate", "Synthesize an error budget");
  prop_cmd->add_option("budget", prop.input, "Budget JSON")->required();
  auto* mc_opt = prop_cmd->add_option("--monte-carlo", mc_n, "Monte-Carlo sample count");
  prop_cmd->add_option("--seed", prop.seed, "Monte-Carlo seed")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInputError;
  }

  common.data_dir = data_dir;
  common.command_line = "errmodel";
  for (const auto& a : args) common.command_line += " " + a;

  try {
    RunReport report;
    if (*rm_cmd) {
      report = cmd_random_model(rm, common);
    } else if (*fit_cmd) {
      if (quantum >= 0.0) fit.error_quantum = quantum;
      if (!fit_series.empty()) fit.emit_series = fit_series;
      report = cmd_fit(fit, common);
    } else if (*sim_cmd) {
      if (*seed_opt) sim.seed = sim_seed;
      if (!sim_series.empty()) sim.emit_series = sim_series;
      report = cmd_simulate(sim, common);
    } else {
      if (*mc_opt) prop.monte_carlo = mc_n;
      report = cmd_propagate(prop, common);
    }
    print_report(report, as_json, out, err);
    return report.exit_code;
  } catch (const SingularMatrixError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace errmodel::cli

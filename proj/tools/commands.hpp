#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "errmodel/regression.hpp"
#include "errmodel/simulate.hpp"

namespace errmodel::cli {

/// Exit codes shared by every command.
enum ExitCode : int { kSuccess = 0, kInputError = 2, kNumericalError = 3 };

/// Result of one command: everything printed is re-derivable from the input.
struct RunReport {
  std::string command;
  std::string input;
  std::string input_sha256;
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> warnings;
  std::vector<std::string> lines;  // human-readable summary
  int exit_code = kSuccess;

  nlohmann::json to_json() const;
};

struct CommonOptions {
  std::filesystem::path data_dir;
  std::string command_line;
};

struct RandomModelOptions {
  std::string input;
  std::string column = "observed";  // observed | condition | diff | s1 | s2
};

struct FitOptions {
  std::string input;
  std::string model = "poly3";  // poly3 | cycle | cycle-diff
  int degree = 3;
  double wavelength = 20.0;
  bool constant_term = false;
  /// Error rounding quantum; unset means 1 ppm for poly3 and none otherwise.
  std::optional<double> error_quantum;
  bool emit_matrix = false;
  std::optional<std::filesystem::path> emit_series;
};

struct SimulateOptions {
  std::string input;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> emit_series;
  bool classify = false;
  bool regen_table3 = false;
};

struct PropagateOptions {
  std::string input;
  std::optional<std::size_t> monte_carlo;
  std::uint64_t seed = 1;
};

/// Resolves `input` as given, then relative to the data directory. Throws
/// InputError("no such input: ...") when neither exists.
std::filesystem::path resolve_input(const std::string& input,
                                    const std::filesystem::path& data_dir);

std::string sha256_file(const std::filesystem::path& path);

RunReport cmd_random_model(const RandomModelOptions& options, const CommonOptions& common);
RunReport cmd_fit(const FitOptions& options, const CommonOptions& common);
RunReport cmd_simulate(const SimulateOptions& options, const CommonOptions& common);
RunReport cmd_propagate(const PropagateOptions& options, const CommonOptions& common);

/// {model, coefficients, residual_std, dof, normal_matrix, rhs}
nlohmann::json fit_to_json(const PolynomialFit& fit, bool with_matrix);
nlohmann::json fit_to_json(const CycleFit& fit, std::string_view model, bool with_matrix);
nlohmann::json effects_to_json(const EffectReport& report);

/// Runs a command line (argv without the program name) and returns the exit
/// code; output goes to the given streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace errmodel::cli

#include "commands.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "errmodel/budget.hpp"
#include "errmodel/dataset.hpp"
#include "errmodel/distributions.hpp"
#include "errmodel/error.hpp"
#include "errmodel/scenario.hpp"

namespace errmodel::cli {

using nlohmann::json;

namespace {

std::string fixed(double value, int decimals) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << value;
  return out.str();
}

std::string general(double value, int digits = 6) {
  std::ostringstream out;
  out << std::setprecision(digits) << value;
  return out.str();
}

double degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

void write_xy(const std::filesystem::path& path, const std::vector<double>& x,
              const std::vector<double>& y) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "x,y\n" << std::setprecision(12);
  for (std::size_t i = 0; i < x.size(); ++i) out << x[i] << ',' << y[i] << '\n';
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

json matrix_json(const NormalEquations& eq) { return eq.matrix_rows(); }

json rhs_json(const NormalEquations& eq) {
  return std::vector<double>(eq.rhs_data().begin(), eq.rhs_data().end());
}

void warn_if_inaccurate(RunReport& report, const NormalEquations& eq,
                        std::span<const double> x) {
  const double r = relative_residual(eq, x);
  if (r > 1e-8) {
    report.warnings.push_back("near-singular system: relative residual " + general(r));
  }
}

RunReport start_report(const std::string& command, const std::filesystem::path& input,
                       const CommonOptions& common) {
  RunReport report;
  report.command = common.command_line.empty() ? command : common.command_line;
  report.input = input.string();
  report.input_sha256 = sha256_file(input);
  return report;
}

}  // namespace

json RunReport::to_json() const {
  return json{{"command", command},
              {"input", {{"path", input}, {"sha256", input_sha256}}},
              {"results", results},
              {"warnings", warnings},
              {"exit_code", exit_code}};
}

std::filesystem::path resolve_input(const std::string& input,
                                    const std::filesystem::path& data_dir) {
  const std::filesystem::path direct(input);
  if (std::filesystem::is_regular_file(direct)) return direct;
  if (!data_dir.empty() && direct.is_relative()) {
    const auto bundled = data_dir / direct;
    if (std::filesystem::is_regular_file(bundled)) return bundled;
  }
  throw InputError("no such input: " + input);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("no such input: " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 8192> buffer{};
  while (in.read(buffer.data(), buffer.size()) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &length);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

json fit_to_json(const PolynomialFit& fit, bool with_matrix) {
  json coefficients = json::object();
  for (std::size_t k = 0; k < fit.model.coeffs.size(); ++k) {
    coefficients["a" + std::to_string(k)] = fit.model.coeffs[k];
  }
  return json{{"model", "poly" + std::to_string(fit.model.degree())},
              {"coefficients", coefficients},
              {"residual_std", fit.model.residual_std},
              {"dof", fit.model.dof},
              {"domain", {fit.model.domain.min, fit.model.domain.max}},
              {"normal_matrix", with_matrix ? matrix_json(fit.normal) : json(nullptr)},
              {"rhs", with_matrix ? rhs_json(fit.normal) : json(nullptr)}};
}

json fit_to_json(const CycleFit& fit, std::string_view model, bool with_matrix) {
  const auto& m = fit.model;
  json coefficients = json::object();
  if (m.offset_s0) {
    coefficients = {{"S0", fit.solution[0]}, {"a", fit.solution[1]}, {"b", fit.solution[2]}};
  } else {
    coefficients = {{"a", fit.solution[0]}, {"b", fit.solution[1]}};
    if (m.constant) coefficients["constant"] = *m.constant;
  }
  coefficients["amplitude"] = m.amplitude;
  coefficients["phase_rad"] = m.phase;
  coefficients["phase_deg"] = degrees(m.phase);
  coefficients["wavelength"] = m.wavelength;
  return json{{"model", model},
              {"coefficients", coefficients},
              {"residual_std", m.residual_std},
              {"dof", m.dof},
              {"normal_matrix", with_matrix ? matrix_json(fit.normal) : json(nullptr)},
              {"rhs", with_matrix ? rhs_json(fit.normal) : json(nullptr)}};
}

json effects_to_json(const EffectReport& report) {
  json sources = json::array();
  for (const auto& s : report.sources) {
    sources.push_back({{"name", s.name},
                       {"classification", effect_name(s.effect)},
                       {"mean_mm", s.mean},
                       {"std_mm", s.std},
                       {"max_abs_mm", s.max_abs},
                       {"contributions_mm", s.contributions}});
  }
  return json{{"eps_abs_mm", report.eps_abs}, {"sources", sources}};
}

RunReport cmd_random_model(const RandomModelOptions& options, const CommonOptions& common) {
  const auto path = resolve_input(options.input, common.data_dir);
  auto report = start_report("random-model " + options.input, path, common);

  std::vector<double> values;
  std::string unit;
  int decimals = 6;
  const auto& col = options.column;
  if (col == "diff" || col == "s1" || col == "s2") {
    const auto table = load_differential(path);
    for (const auto& r : table.rows) {
      values.push_back(col == "diff" ? r.difference() : col == "s1" ? r.s1 : r.s2);
    }
    unit = "m";
    decimals = table.reading_decimals;
  } else if (col == "observed" || col == "condition") {
    const auto series = load_series(path);
    values = col == "observed" ? series.observed() : series.conditions();
    unit = std::string(unit_symbol(col == "observed" ? series.value_unit()
                                                     : series.condition_unit()));
    decimals = col == "observed" ? series.decimals().observed : series.decimals().condition;
  } else {
    throw InputError("unknown column '" + col + "' (observed, condition, diff, s1, s2)");
  }

  const auto est = random_model(values);
  report.results = {{"column", col},     {"unit", unit},   {"mean", est.mean},
                    {"std", est.std},    {"n", est.n},     {"dof", est.n - 1}};
  report.lines.push_back("mean  " + fixed(est.mean, decimals) + " " + unit);
  std::string std_line = "std   " + general(est.std, 4) + " " + unit;
  if (col == "observed" && est.mean != 0.0) {
    const double rel_ppm = est.relative_std() * 1e6;
    report.results["relative_std_ppm"] = rel_ppm;
    std_line += " (" + fixed(rel_ppm, 1) + " ppm relative)";
  }
  report.lines.push_back(std_line);
  report.lines.push_back("n     " + std::to_string(est.n));
  return report;
}

RunReport cmd_fit(const FitOptions& options, const CommonOptions& common) {
  const auto path = resolve_input(options.input, common.data_dir);
  auto report = start_report("fit " + options.input, path, common);
  if (options.emit_series) std::filesystem::create_directories(*options.emit_series);
  auto series_file = [&](const std::string& name) { return *options.emit_series / name; };

  if (options.model == "poly3" || options.model == "poly") {
    const int degree = options.model == "poly3" ? 3 : options.degree;
    const double quantum = options.error_quantum.value_or(1.0);
    const auto series = load_series(path);
    const auto samples = to_error_samples(series, ReferenceRule::mean_reference, quantum);
    const auto fit = fit_polynomial(samples, degree);
    warn_if_inaccurate(report, fit.normal, fit.model.coeffs);
    const auto f0 = random_model(series.observed()).mean;

    report.results = fit_to_json(fit, options.emit_matrix);
    report.results["f0"] = f0;
    report.results["error_quantum_ppm"] = quantum;
    report.lines.push_back("R(T) = sum a_k T^k  [ppm, T in degC]");
    for (std::size_t k = 0; k < fit.model.coeffs.size(); ++k) {
      report.lines.push_back("a" + std::to_string(k) + " = " + fixed(fit.model.coeffs[k], 6));
    }
    report.lines.push_back("residual std " + fixed(fit.model.residual_std, 2) +
                           " ppm (dof " + std::to_string(fit.model.dof) + ")");
    report.lines.push_back("f0 " + fixed(f0, 6) + " MHz; f = f0 (1 + R 1e-6)");
    if (options.emit_matrix) {
      for (std::size_t i = 0; i < fit.normal.size(); ++i) {
        std::string row = "N[" + std::to_string(i) + "] =";
        for (std::size_t j = 0; j < fit.normal.size(); ++j) {
          row += " " + general(fit.normal.matrix(i, j), 15);
        }
        row += " | " + general(fit.normal.rhs(i), 15);
        report.lines.push_back(row);
      }
    }
    if (options.emit_series) {
      const auto t = sample_conditions(samples);
      write_xy(series_file("samples.csv"), t, sample_errors(samples));
      write_xy(series_file("residuals.csv"), t, fit.residuals);
      const auto grid = linspace(fit.model.domain.min, fit.model.domain.max, 141);
      std::vector<double> curve;
      for (double x : grid) curve.push_back(fit.model.evaluate(x));
      write_xy(series_file("fit.csv"), grid, curve);
    }
    return report;
  }

  if (options.model == "cycle") {
    const double quantum = options.error_quantum.value_or(0.0);
    const auto series = load_series(path);
    const auto samples =
        to_error_samples(series, ReferenceRule::explicit_reference, quantum);
    const auto fit =
        fit_cycle_direct(samples, options.wavelength, {options.constant_term});
    warn_if_inaccurate(report, fit.normal, fit.solution);
    const auto& m = fit.model;
    report.results = fit_to_json(fit, "cycle", options.emit_matrix);
    report.lines.push_back("y = A sin(2 pi S / " + general(m.wavelength) + " + phi)  [mm]");
    report.lines.push_back("A   = " + fixed(m.amplitude, 3) + " mm");
    report.lines.push_back("phi = " + fixed(degrees(m.phase), 2) + " deg");
    if (m.constant) report.lines.push_back("c   = " + fixed(*m.constant, 3) + " mm");
    report.lines.push_back("residual std " + fixed(m.residual_std, 3) + " mm (dof " +
                           std::to_string(m.dof) + ")");
    report.lines.push_back("arcsine std A/sqrt2 = " +
                           fixed(ArcsineDistribution(m.amplitude).stddev(), 3) + " mm");
    if (options.emit_series) {
      const auto s = sample_conditions(samples);
      write_xy(series_file("samples.csv"), s, sample_errors(samples));
      write_xy(series_file("residuals.csv"), s, fit.residuals);
      const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
      const auto grid = linspace(*lo, *hi, 201);
      std::vector<double> curve;
      for (double x : grid) curve.push_back(m.evaluate(x));
      write_xy(series_file("fit.csv"), grid, curve);
      const ArcsineDistribution dist(m.amplitude);
      const auto ys = linspace(-0.995 * m.amplitude, 0.995 * m.amplitude, 201);
      std::vector<double> density;
      for (double y : ys) density.push_back(dist.pdf(y));
      write_xy(series_file("pdf.csv"), ys, density);
    }
    return report;
  }

  if (options.model == "cycle-diff") {
    const auto table = load_differential(path);
    const auto fit = fit_cycle_differential(table.rows, options.wavelength);
    warn_if_inaccurate(report, fit.normal, fit.solution);
    const auto& m = fit.model;
    const auto naive = random_model(table.differences());
    report.results = fit_to_json(fit, "cycle-diff", options.emit_matrix);
    report.results["random_model_mean"] = naive.mean;
    report.lines.push_back("S0  = " + fixed(*m.offset_s0, 5) + " m");
    report.lines.push_back("a   = " + fixed(fit.solution[1], 5) + ", b = " +
                           fixed(fit.solution[2], 5));
    report.lines.push_back("A   = " + fixed(m.amplitude, 5) + " m");
    report.lines.push_back("phi = " + fixed(m.phase, 4) + " rad (" +
                           fixed(degrees(m.phase), 2) + " deg)");
    report.lines.push_back("residual std " + general(m.residual_std, 3) + " m (dof " +
                           std::to_string(m.dof) + ")");
    report.lines.push_back("random-model mean of S1 - S2: " + fixed(naive.mean, 4) + " m");
    if (options.emit_matrix) {
      for (std::size_t i = 0; i < 3; ++i) {
        report.lines.push_back("N[" + std::to_string(i) + "] = " +
                               fixed(fit.normal.matrix(i, 0), 5) + " " +
                               fixed(fit.normal.matrix(i, 1), 5) + " " +
                               fixed(fit.normal.matrix(i, 2), 5) + " | " +
                               fixed(fit.normal.rhs(i), 5));
      }
    }
    if (options.emit_series) {
      std::vector<double> index;
      for (std::size_t i = 0; i < fit.residuals.size(); ++i) index.push_back(double(i + 1));
      write_xy(series_file("residuals.csv"), index, fit.residuals);
      const auto grid = linspace(0.0, m.wavelength, 201);
      std::vector<double> curve;
      for (double x : grid) curve.push_back(m.evaluate(x));
      write_xy(series_file("fit.csv"), grid, curve);
    }
    return report;
  }

  throw InputError("unknown model '" + options.model + "' (poly3, poly, cycle, cycle-diff)");
}

RunReport cmd_simulate(const SimulateOptions& options, const CommonOptions& common) {
  const auto path = resolve_input(options.input, common.data_dir);
  auto report = start_report("simulate " + options.input, path, common);
  auto scenario = load_scenario(path);

  auto classify_lines = [&](const std::vector<SourceTrace>& traces,
                            const std::vector<ErrorSource>& sources) {
    const auto effects = classify_effects(traces, scenario.eps_abs);
    report.results["effects"] = effects_to_json(effects);
    for (std::size_t k = 0; k < effects.sources.size(); ++k) {
      const auto& e = effects.sources[k];
      std::string line = e.name + ": " + std::string(effect_name(e.effect)) + ", mean " +
                         general(e.mean, 5) + " mm, std " + general(e.std, 5) + " mm";
      if (const auto* c = std::get_if<CycleError>(&sources[k].kind());
          c && e.effect == Effect::random) {
        line += " (A/sqrt2 = " + general(ArcsineDistribution(std::abs(c->amplitude_mm)).stddev(), 5) +
                " mm)";
      }
      report.lines.push_back(line);
    }
  };

  if (options.regen_table3 || scenario.differential) {
    const auto cycle_it =
        std::find_if(scenario.sources.begin(), scenario.sources.end(), [](const auto& s) {
          return std::holds_alternative<CycleError>(s.kind());
        });
    if (cycle_it == scenario.sources.end()) {
      throw ConfigError("/sources: a differential simulation needs a cycle source");
    }
    std::vector<ErrorSource> extras;
    for (auto it = scenario.sources.begin(); it != scenario.sources.end(); ++it) {
      if (it != cycle_it) extras.push_back(*it);
    }

    DifferentialDesign design;
    std::optional<DifferentialTable> fixture;
    if (options.regen_table3) {
      fixture = load_differential(resolve_input("table3.csv", common.data_dir));
    }
    if (scenario.differential) {
      design = *scenario.differential;
    } else {
      design.pairs = fixture->nominal;
    }
    if (options.regen_table3) design.round_readings = true;

    DifferentialOptions sim_options{design.round_readings, options.seed.value_or(0)};
    const auto sim = simulate_differential(*cycle_it, design.pairs, extras, sim_options);
    std::vector<ErrorSource> ordered{*cycle_it};
    ordered.insert(ordered.end(), extras.begin(), extras.end());

    json rows = json::array();
    for (std::size_t i = 0; i < sim.rows.size(); ++i) {
      rows.push_back({{"s_ab", design.pairs[i].s_ab},
                      {"s_ac", design.pairs[i].s_ac},
                      {"s2", sim.rows[i].s2},
                      {"s1", sim.rows[i].s1},
                      {"difference", sim.differences[i]}});
    }
    report.results["differential"] = rows;
    report.lines.push_back("simulated " + std::to_string(sim.rows.size()) +
                           " differential pairs");

    if (options.regen_table3) {
      std::size_t total = 0, matching = 0;
      json mismatches = json::array();
      const std::size_t n = std::min(fixture->rows.size(), sim.rows.size());
      for (std::size_t i = 0; i < n; ++i) {
        const std::array<std::pair<double, double>, 2> legs{
            std::pair{sim.rows[i].s2, fixture->rows[i].s2},
            std::pair{sim.rows[i].s1, fixture->rows[i].s1}};
        for (std::size_t leg = 0; leg < 2; ++leg) {
          ++total;
          if (legs[leg].first == legs[leg].second) {
            ++matching;
          } else {
            mismatches.push_back({{"row", i + 1},
                                  {"column", leg == 0 ? "s2" : "s1"},
                                  {"simulated", legs[leg].first},
                                  {"fixture", legs[leg].second}});
          }
        }
      }
      total += 2 * (std::max(fixture->rows.size(), sim.rows.size()) - n);
      report.results["regen_table3"] = {
          {"matching", matching}, {"total", total}, {"mismatches", mismatches}};
      report.lines.push_back(std::to_string(matching) + "/" + std::to_string(total) +
                             " values match");
      if (matching != total) report.exit_code = kNumericalError;
    }
    if (options.classify) classify_lines(sim.traces, ordered);
    if (options.emit_series) {
      DifferentialTable table{design.pairs, sim.rows, "simulated differential distances",
                              fixture ? fixture->nominal_decimals : 4,
                              design.round_readings ? 4 : 7};
      std::ofstream out(*options.emit_series);
      if (!out) throw InputError("cannot write " + options.emit_series->string());
      write_differential(table, out);
    }
    return report;
  }

  auto schedule = *scenario.schedule;
  if (options.seed) schedule = schedule.with_seed(*options.seed);
  const auto sim = simulate_repeated(scenario.sources, schedule, scenario.true_value_m);
  report.results["repeats"] = sim.series.size();
  report.results["observed"] = sim.series.observed();
  report.lines.push_back("simulated " + std::to_string(sim.series.size()) + " repeats");
  if (sim.series.size() >= 2) {
    const auto est = random_model(sim.series.observed());
    report.results["mean"] = est.mean;
    report.results["std"] = est.std;
    report.lines.push_back("observed mean " + fixed(est.mean, 7) + " m, std " +
                           general(est.std * 1000.0, 5) + " mm");
  }
  if (options.classify) classify_lines(sim.traces, scenario.sources);
  if (options.emit_series) {
    std::ofstream out(*options.emit_series);
    if (!out) throw InputError("cannot write " + options.emit_series->string());
    write_csv(sim.series, out);
  }
  return report;
}

RunReport cmd_propagate(const PropagateOptions& options, const CommonOptions& common) {
  const auto path = resolve_input(options.input, common.data_dir);
  auto report = start_report("propagate " + options.input, path, common);
  const auto budget = load_budget(path);
  const double total = total_std(budget);

  json terms = json::array();
  for (std::size_t i = 0; i < budget.components().size(); ++i) {
    const auto& c = budget.components()[i];
    terms.push_back({{"name", c.name},
                     {"std", c.std},
                     {"unit", unit_symbol(c.unit)},
                     {"term_mm", budget.terms_mm()[i]},
                     {"shape", shape_name(c.shape)}});
    report.lines.push_back(c.name + ": " + general(budget.terms_mm()[i], 6) + " mm");
  }
  report.results = {{"operating_point_m", budget.operating_point()},
                    {"components", terms},
                    {"total_std_mm", total}};
  if (budget.components().empty()) report.warnings.push_back("empty budget");
  report.lines.push_back("sigma(Delta) = " + fixed(total, 3) + " mm");

  if (options.monte_carlo) {
    if (*options.monte_carlo < 10000) throw InputError("--monte-carlo needs n >= 10000");
    if (!budget.components().empty()) {
      const double mc = monte_carlo_std(budget, *options.monte_carlo, options.seed);
      const double discrepancy = total > 0.0 ? std::abs(mc - total) / total : 0.0;
      report.results["monte_carlo"] = {{"n", *options.monte_carlo},
                                       {"seed", options.seed},
                                       {"std_mm", mc},
                                       {"relative_discrepancy", discrepancy}};
      report.lines.push_back("Monte-Carlo (n = " + std::to_string(*options.monte_carlo) +
                             ", seed " + std::to_string(options.seed) +
                             "): " + fixed(mc, 3) + " mm, discrepancy " +
                             fixed(discrepancy * 100.0, 3) + "%");
    }
  }
  return report;
}

}  // namespace errmodel::cli

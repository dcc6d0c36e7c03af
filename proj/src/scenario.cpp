#include "errmodel/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "errmodel/error.hpp"

namespace errmodel {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
  throw ConfigError((pointer.empty() ? std::string("(root)") : pointer) + ": " + what);
}

double number_at(const json& obj, const std::string& key, const std::string& at) {
  if (!obj.contains(key)) fail(at + "/" + key, "required");
  if (!obj[key].is_number()) fail(at + "/" + key, "must be a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& at,
                 double fallback) {
  return obj.contains(key) ? number_at(obj, key, at) : fallback;
}

std::vector<double> numbers_at(const json& obj, const std::string& key,
                               const std::string& at) {
  if (!obj.contains(key) || !obj[key].is_array()) fail(at + "/" + key, "must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < obj[key].size(); ++i) {
    if (!obj[key][i].is_number()) {
      fail(at + "/" + key + "/" + std::to_string(i), "must be a number");
    }
    out.push_back(obj[key][i].get<double>());
  }
  return out;
}

ErrorSource parse_source(const json& item, const std::string& at) {
  if (!item.is_object()) fail(at, "must be an object");
  if (!item.contains("kind") || !item["kind"].is_string()) fail(at + "/kind", "must be a string");
  const auto kind = item["kind"].get<std::string>();
  std::string name = kind;
  if (item.contains("name")) {
    if (!item["name"].is_string()) fail(at + "/name", "must be a string");
    name = item["name"].get<std::string>();
  }

  SourceKind source_kind;
  Condition depends_on = Condition::none;
  if (kind == "additive-constant") {
    source_kind = AdditiveConstant{number_at(item, "c_mm", at)};
  } else if (kind == "multiplicative") {
    source_kind = Multiplicative{number_at(item, "r_ppm", at)};
    depends_on = Condition::distance;
  } else if (kind == "cycle") {
    double phase = 0.0;
    if (item.contains("phase_deg")) {
      phase = number_at(item, "phase_deg", at) * std::numbers::pi / 180.0;
    } else {
      phase = number_or(item, "phase_rad", at, 0.0);
    }
    source_kind = CycleError{number_at(item, "amplitude_mm", at),
                             number_or(item, "wavelength_m", at, 20.0), phase};
    depends_on = Condition::distance;
  } else if (kind == "temperature-polynomial") {
    source_kind = TemperaturePolynomial{numbers_at(item, "coeffs_ppm", at)};
    depends_on = Condition::temperature;
  } else if (kind == "gaussian-noise") {
    source_kind = GaussianNoise{number_at(item, "sigma_mm", at)};
  } else {
    fail(at + "/kind", "unknown source kind '" + kind + "'");
  }

  if (item.contains("depends_on")) {
    if (!item["depends_on"].is_string()) fail(at + "/depends_on", "must be a string");
    try {
      depends_on = parse_condition(item["depends_on"].get<std::string>());
    } catch (const ConfigError& e) {
      fail(at + "/depends_on", e.what());
    }
  }
  try {
    return ErrorSource(std::move(name), std::move(source_kind), depends_on);
  } catch (const ConfigError& e) {
    fail(at, e.what());
  }
}

ConditionGenerator parse_generator(const json& g, const std::string& at) {
  if (!g.is_object()) fail(at, "must be an object");
  if (g.contains("constant")) return ConstantCondition{number_at(g, "constant", at)};
  if (g.contains("listed")) return ListedCondition{numbers_at(g, "listed", at)};
  if (g.contains("uniform")) {
    const auto& u = g["uniform"];
    if (!u.is_object()) fail(at + "/uniform", "must be an object");
    return UniformCondition{number_at(u, "min", at + "/uniform"),
                            number_at(u, "max", at + "/uniform")};
  }
  fail(at, "expected one of constant, listed, uniform");
}

ConditionSchedule parse_schedule(const json& s, const std::string& at) {
  if (!s.is_object()) fail(at, "must be an object");
  if (!s.contains("repeats") || !s["repeats"].is_number_unsigned() ||
      s["repeats"].get<std::uint64_t>() == 0) {
    fail(at + "/repeats", "must be a positive integer");
  }
  std::uint64_t seed = 0;
  if (s.contains("seed")) {
    if (!s["seed"].is_number_unsigned()) fail(at + "/seed", "must be a non-negative integer");
    seed = s["seed"].get<std::uint64_t>();
  }
  try {
    ConditionSchedule schedule(s["repeats"].get<std::size_t>(), seed);
    for (auto c : {Condition::temperature, Condition::distance}) {
      const std::string key(condition_name(c));
      if (!s.contains(key)) continue;
      const auto gen = parse_generator(s[key], at + "/" + key);
      try {
        schedule.set(c, gen);
      } catch (const ConfigError& e) {
        fail(at + "/" + key, e.what());
      }
    }
    return schedule;
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (!what.empty() && what.front() == '/') throw;
    fail(at, what);
  }
}

DifferentialDesign parse_differential_design(const json& d, const std::string& at) {
  if (!d.is_object()) fail(at, "must be an object");
  DifferentialDesign design;
  if (!d.contains("pairs") || !d["pairs"].is_array()) fail(at + "/pairs", "must be an array");
  for (std::size_t i = 0; i < d["pairs"].size(); ++i) {
    const auto& p = d["pairs"][i];
    const std::string pat = at + "/pairs/" + std::to_string(i);
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      fail(pat, "must be [s_ab, s_ac]");
    }
    NominalPair pair{p[0].get<double>(), p[1].get<double>()};
    if (!(pair.s_ac > pair.s_ab)) fail(pat, "s_ac must exceed s_ab");
    design.pairs.push_back(pair);
  }
  if (d.contains("round_readings")) {
    if (!d["round_readings"].is_boolean()) fail(at + "/round_readings", "must be a boolean");
    design.round_readings = d["round_readings"].get<bool>();
  }
  return design;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("", std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("", "scenario must be an object");

  Scenario scenario;
  scenario.true_value_m = number_or(doc, "true_value", "", 0.0);
  scenario.eps_abs = number_or(doc, "eps_abs", "", kDefaultEffectThreshold);
  if (!(scenario.eps_abs > 0.0)) fail("/eps_abs", "must be positive");

  if (!doc.contains("sources") || !doc["sources"].is_array()) {
    fail("/sources", "must be an array");
  }
  for (std::size_t i = 0; i < doc["sources"].size(); ++i) {
    scenario.sources.push_back(
        parse_source(doc["sources"][i], "/sources/" + std::to_string(i)));
  }
  if (doc.contains("schedule")) scenario.schedule = parse_schedule(doc["schedule"], "/schedule");
  if (doc.contains("differential")) {
    scenario.differential = parse_differential_design(doc["differential"], "/differential");
    const bool has_cycle =
        std::any_of(scenario.sources.begin(), scenario.sources.end(), [](const auto& s) {
          return std::holds_alternative<CycleError>(s.kind());
        });
    if (!has_cycle) fail("/sources", "a differential design needs a cycle source");
  }
  if (!scenario.schedule && !scenario.differential) {
    fail("/schedule", "required when no differential design is given");
  }
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("no such input: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

}  // namespace errmodel

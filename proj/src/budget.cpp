#include "errmodel/budget.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "errmodel/error.hpp"

namespace errmodel {

namespace {

double length_to_mm(Unit unit, double value) {
  switch (unit) {
    case Unit::millimetre: return value;
    case Unit::metre: return value * 1000.0;
    default: return std::nan("");
  }
}

// Zero-mean unit-variance draw of the given shape.
class ShapeSampler {
 public:
  ShapeSampler(Shape shape, std::uint64_t seed) : shape_(shape), engine_(seed) {}

  double operator()() {
    switch (shape_) {
      case Shape::gaussian: return normal_(engine_);
      case Shape::arcsine:
        return std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * unit_(engine_));
      case Shape::uniform:
        return std::sqrt(3.0) * (2.0 * unit_(engine_) - 1.0);
    }
    return 0.0;
  }

 private:
  Shape shape_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace

std::string_view shape_name(Shape shape) {
  switch (shape) {
    case Shape::gaussian: return "gaussian";
    case Shape::arcsine: return "arcsine";
    case Shape::uniform: return "uniform";
  }
  return "?";
}

Shape parse_shape(std::string_view name) {
  for (auto s : {Shape::gaussian, Shape::arcsine, Shape::uniform}) {
    if (shape_name(s) == name) return s;
  }
  throw ConfigError("unknown shape '" + std::string(name) + "'");
}

ErrorBudget::ErrorBudget(std::vector<BudgetComponent> components,
                         double operating_point_m)
    : components_(std::move(components)), operating_point_(operating_point_m) {
  std::set<std::string> names;
  for (const auto& c : components_) {
    if (!names.insert(c.name).second) {
      throw ConfigError("duplicate component name '" + c.name + "'");
    }
    if (!std::isfinite(c.std) || c.std < 0.0) {
      throw ConfigError("component '" + c.name + "' has a negative or non-finite std");
    }
    double term = 0.0;
    switch (c.sensitivity.kind) {
      case Sensitivity::Kind::constant:
      case Sensitivity::Kind::custom: {
        if (!std::isfinite(c.sensitivity.coefficient)) {
          throw ConfigError("component '" + c.name + "' has a non-finite sensitivity");
        }
        const double mm = length_to_mm(c.unit, c.std);
        if (std::isnan(mm)) {
          throw UnitError(c.name, "unit '" + std::string(unit_symbol(c.unit)) +
                                      "' is not a length; use mm or m, or a "
                                      "proportional sensitivity for ppm");
        }
        term = c.sensitivity.coefficient * mm;
        break;
      }
      case Sensitivity::Kind::proportional:
        if (c.unit != Unit::ppm) {
          throw UnitError(c.name, "proportional sensitivity needs a ppm std");
        }
        if (!(operating_point_ > 0.0)) {
          throw ConfigError("operating point must be positive for proportional "
                            "component '" + c.name + "'");
        }
        // ppm * m = 1e-6 m = 1e-3 mm
        term = c.std * operating_point_ * 1e-3;
        break;
    }
    terms_.push_back(term);
  }
}

double total_std(const ErrorBudget& budget) {
  double ss = 0.0;
  for (double t : budget.terms_mm()) ss += t * t;
  return std::sqrt(ss);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 of the combined key
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double monte_carlo_std(const ErrorBudget& budget, std::size_t n, std::uint64_t seed,
                       std::span<const Shape> shapes) {
  if (n < 10000) throw std::invalid_argument("monte_carlo_std needs n >= 10^4");
  const auto& terms = budget.terms_mm();
  if (shapes.size() != terms.size()) {
    throw std::invalid_argument("one shape per component is required");
  }
  std::vector<ShapeSampler> samplers;
  samplers.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    samplers.emplace_back(shapes[i], substream_seed(seed, i));
  }

  // Welford accumulation over Delta.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double delta = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) delta += terms[i] * samplers[i]();
    const double d = delta - mean;
    mean += d / static_cast<double>(k + 1);
    m2 += d * (delta - mean);
  }
  return std::sqrt(m2 / static_cast<double>(n - 1));
}

double monte_carlo_std(const ErrorBudget& budget, std::size_t n, std::uint64_t seed) {
  std::vector<Shape> shapes;
  for (const auto& c : budget.components()) shapes.push_back(c.shape);
  return monte_carlo_std(budget, n, seed, shapes);
}

ErrorBudget parse_budget(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("budget is not valid JSON: ") + e.what());
  }
  auto fail = [](const std::string& pointer, const std::string& what) {
    throw ConfigError((pointer.empty() ? std::string("(root)") : pointer) + ": " + what);
  };
  if (!doc.is_object()) fail("", "budget must be an object");

  double operating_point = 0.0;
  if (doc.contains("operating_point_m")) {
    if (!doc["operating_point_m"].is_number()) fail("/operating_point_m", "must be a number");
    operating_point = doc["operating_point_m"].get<double>();
  }
  if (!doc.contains("components") || !doc["components"].is_array()) {
    fail("/components", "must be an array");
  }

  std::vector<BudgetComponent> components;
  const auto& list = doc["components"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = "/components/" + std::to_string(i);
    const auto& item = list[i];
    if (!item.is_object()) fail(at, "must be an object");
    BudgetComponent c;
    if (!item.contains("name") || !item["name"].is_string()) fail(at + "/name", "must be a string");
    c.name = item["name"].get<std::string>();
    if (!item.contains("std") || !item["std"].is_number()) fail(at + "/std", "must be a number");
    c.std = item["std"].get<double>();
    if (!item.contains("unit") || !item["unit"].is_string()) fail(at + "/unit", "must be a string");
    try {
      c.unit = parse_unit(item["unit"].get<std::string>());
    } catch (const InputError& e) {
      throw UnitError(c.name, e.what());
    }
    if (item.contains("sensitivity")) {
      const auto& s = item["sensitivity"];
      if (s.is_number()) {
        c.sensitivity = Sensitivity::custom(s.get<double>());
      } else if (s == "constant") {
        c.sensitivity = Sensitivity::constant();
      } else if (s == "proportional") {
        c.sensitivity = Sensitivity::proportional();
      } else {
        fail(at + "/sensitivity", "must be \"constant\", \"proportional\" or a number");
      }
    }
    if (item.contains("shape")) {
      if (!item["shape"].is_string()) fail(at + "/shape", "must be a string");
      try {
        c.shape = parse_shape(item["shape"].get<std::string>());
      } catch (const ConfigError& e) {
        fail(at + "/shape", e.what());
      }
    }
    components.push_back(std::move(c));
  }
  return ErrorBudget(std::move(components), operating_point);
}

ErrorBudget load_budget(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("no such input: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_budget(text.str());
}

}  // namespace errmodel

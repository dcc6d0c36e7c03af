#include "errmodel/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "errmodel/budget.hpp"
#include "errmodel/error.hpp"

namespace errmodel {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double polynomial(const std::vector<double>& coeffs, double t) {
  double r = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * t + *it;
  return r;
}

struct Contribution {
  double native;
  double mm;
};

// Evaluates one source at one repeat. `scale_m` is the magnitude relative
// sources act on.
Contribution evaluate(const ErrorSource& source, double argument, double scale_m,
                      std::mt19937_64& noise) {
  return std::visit(
      overloaded{
          [](const AdditiveConstant& k) { return Contribution{k.c_mm, k.c_mm}; },
          [&](const Multiplicative& k) {
            return Contribution{k.r_ppm, k.r_ppm * scale_m * 1e-3};
          },
          [&](const CycleError& k) {
            const double y = k.amplitude_mm *
                             std::sin(2.0 * std::numbers::pi * argument / k.wavelength_m +
                                      k.phase_rad);
            return Contribution{y, y};
          },
          [&](const TemperaturePolynomial& k) {
            const double r = polynomial(k.coeffs_ppm, argument);
            return Contribution{r, r * scale_m * 1e-3};
          },
          [&](const GaussianNoise& k) {
            std::normal_distribution<double> draw(0.0, k.sigma_mm);
            const double e = k.sigma_mm > 0.0 ? draw(noise) : 0.0;
            return Contribution{e, e};
          },
      },
      source.kind());
}

// Noise streams are keyed by source name so adding or reordering sources
// leaves the other streams untouched.
std::uint64_t name_stream(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::string_view condition_name(Condition c) {
  switch (c) {
    case Condition::none: return "none";
    case Condition::temperature: return "temperature";
    case Condition::distance: return "distance";
  }
  return "?";
}

Condition parse_condition(std::string_view name) {
  for (auto c : {Condition::none, Condition::temperature, Condition::distance}) {
    if (condition_name(c) == name) return c;
  }
  throw ConfigError("unknown condition '" + std::string(name) + "'");
}

ErrorSource::ErrorSource(std::string name, SourceKind kind, Condition depends_on)
    : name_(std::move(name)), kind_(std::move(kind)), depends_on_(depends_on) {
  if (const auto* c = std::get_if<CycleError>(&kind_)) {
    if (!(c->wavelength_m > 0.0)) {
      throw ConfigError("source '" + name_ + "': cycle wavelength must be positive");
    }
  }
  if (const auto* g = std::get_if<GaussianNoise>(&kind_)) {
    if (!(g->sigma_mm >= 0.0)) {
      throw ConfigError("source '" + name_ + "': noise sigma must be >= 0");
    }
  }
}

ErrorSource ErrorSource::additive(std::string name, double c_mm) {
  return {std::move(name), AdditiveConstant{c_mm}, Condition::none};
}
ErrorSource ErrorSource::multiplicative(std::string name, double r_ppm) {
  return {std::move(name), Multiplicative{r_ppm}, Condition::distance};
}
ErrorSource ErrorSource::cycle(std::string name, double amplitude_mm, double wavelength_m,
                               double phase_rad) {
  return {std::move(name), CycleError{amplitude_mm, wavelength_m, phase_rad},
          Condition::distance};
}
ErrorSource ErrorSource::temperature_polynomial(std::string name,
                                                std::vector<double> coeffs) {
  return {std::move(name), TemperaturePolynomial{std::move(coeffs)},
          Condition::temperature};
}
ErrorSource ErrorSource::gaussian_noise(std::string name, double sigma_mm) {
  return {std::move(name), GaussianNoise{sigma_mm}, Condition::none};
}

bool ErrorSource::relative() const noexcept {
  return std::holds_alternative<Multiplicative>(kind_) ||
         std::holds_alternative<TemperaturePolynomial>(kind_);
}

std::string_view ErrorSource::kind_name() const noexcept {
  return std::visit(overloaded{
                        [](const AdditiveConstant&) { return "additive-constant"; },
                        [](const Multiplicative&) { return "multiplicative"; },
                        [](const CycleError&) { return "cycle"; },
                        [](const TemperaturePolynomial&) { return "temperature-polynomial"; },
                        [](const GaussianNoise&) { return "gaussian-noise"; },
                    },
                    kind_);
}

std::optional<double> ConditionVector::get(Condition c) const {
  switch (c) {
    case Condition::temperature: return temperature;
    case Condition::distance: return distance;
    case Condition::none: return std::nullopt;
  }
  return std::nullopt;
}

ConditionSchedule::ConditionSchedule(std::size_t repeats, std::uint64_t seed)
    : repeats_(repeats), seed_(seed) {
  if (repeats == 0) throw ConfigError("schedule needs at least one repeat");
}

ConditionSchedule& ConditionSchedule::set(Condition condition,
                                          ConditionGenerator generator) {
  const std::string name(condition_name(condition));
  if (condition == Condition::none) throw ConfigError("cannot schedule condition 'none'");
  if (const auto* l = std::get_if<ListedCondition>(&generator)) {
    if (l->values.size() != repeats_) {
      throw ConfigError("listed " + name + " schedule has " +
                        std::to_string(l->values.size()) + " values for " +
                        std::to_string(repeats_) + " repeats");
    }
  }
  if (const auto* u = std::get_if<UniformCondition>(&generator)) {
    if (!(u->max > u->min)) throw ConfigError("uniform " + name + " range is empty");
  }
  (condition == Condition::temperature ? temperature_ : distance_) = std::move(generator);
  return *this;
}

bool ConditionSchedule::has(Condition condition) const {
  switch (condition) {
    case Condition::none: return true;
    case Condition::temperature: return temperature_.has_value();
    case Condition::distance: return distance_.has_value();
  }
  return false;
}

ConditionSchedule ConditionSchedule::with_seed(std::uint64_t seed) const {
  ConditionSchedule copy(*this);
  copy.seed_ = seed;
  return copy;
}

std::vector<ConditionVector> ConditionSchedule::materialize() const {
  std::vector<ConditionVector> out(repeats_);
  auto fill = [&](const std::optional<ConditionGenerator>& gen, std::uint64_t stream,
                  std::optional<double> ConditionVector::*field) {
    if (!gen) return;
    std::mt19937_64 engine(substream_seed(seed_, stream));
    for (std::size_t i = 0; i < repeats_; ++i) {
      out[i].*field = std::visit(
          overloaded{
              [](const ConstantCondition& c) { return c.value; },
              [i](const ListedCondition& l) { return l.values[i]; },
              [&engine](const UniformCondition& u) {
                return std::uniform_real_distribution<double>(u.min, u.max)(engine);
              },
          },
          *gen);
    }
  };
  fill(temperature_, 0, &ConditionVector::temperature);
  fill(distance_, 1, &ConditionVector::distance);
  return out;
}

Simulation simulate_repeated(std::span<const ErrorSource> sources,
                             const ConditionSchedule& schedule, double true_value_m) {
  for (const auto& s : sources) {
    if (!schedule.has(s.depends_on())) {
      throw ConfigError("source '" + s.name() + "' depends on " +
                        std::string(condition_name(s.depends_on())) +
                        ", which the schedule does not provide");
    }
  }
  const auto conditions = schedule.materialize();
  const std::size_t n = conditions.size();

  std::vector<SourceTrace> traces;
  std::vector<std::mt19937_64> noise;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    traces.push_back({sources[k].name(), {}, {}});
    traces.back().native.reserve(n);
    traces.back().contribution_mm.reserve(n);
    noise.emplace_back(substream_seed(schedule.seed(), name_stream(sources[k].name())));
  }

  const bool by_distance = schedule.has(Condition::distance);
  const bool by_temperature = schedule.has(Condition::temperature);
  std::vector<MeasurementRow> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cv = conditions[i];
    const double scale = cv.distance.value_or(true_value_m);
    double total_mm = 0.0;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const auto& s = sources[k];
      const double argument = s.depends_on() == Condition::none
                                  ? true_value_m
                                  : *cv.get(s.depends_on());
      const auto c = evaluate(s, argument, scale, noise[k]);
      traces[k].native.push_back(c.native);
      traces[k].contribution_mm.push_back(c.mm);
      total_mm += c.mm;
    }
    const double condition = by_distance      ? *cv.distance
                             : by_temperature ? *cv.temperature
                                              : static_cast<double>(i + 1);
    rows.push_back({condition, true_value_m + total_mm / 1000.0, std::nullopt});
  }

  const Unit condition_unit = by_distance      ? Unit::metre
                              : by_temperature ? Unit::celsius
                                               : Unit::dimensionless;
  MeasurementSeries series(std::move(rows), condition_unit, Unit::metre,
                           "simulated repeated measurement");
  series.set_decimals({6, 7, 7});
  return {std::move(series), conditions, std::move(traces)};
}

double round_to_tenth_mm(double metres) { return std::floor(metres * 1e4 + 0.5) / 1e4; }

DifferentialSimulation simulate_differential(const ErrorSource& cycle,
                                             std::span<const NominalPair> pairs,
                                             std::span<const ErrorSource> extra_sources,
                                             DifferentialOptions options) {
  if (!std::holds_alternative<CycleError>(cycle.kind())) {
    throw ConfigError("source '" + cycle.name() + "' is not a cycle error");
  }
  std::vector<const ErrorSource*> sources{&cycle};
  for (const auto& s : extra_sources) {
    if (s.depends_on() == Condition::temperature) {
      throw ConfigError("source '" + s.name() +
                        "' depends on temperature, which a differential design "
                        "does not provide");
    }
    sources.push_back(&s);
  }

  DifferentialSimulation out;
  std::vector<std::mt19937_64> noise;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    out.traces.push_back({sources[k]->name(), {}, {}});
    noise.emplace_back(substream_seed(options.seed, name_stream(sources[k]->name())));
  }

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [s_ab, s_ac] = pairs[i];
    if (!(s_ac > s_ab)) {
      throw ConfigError("pair " + std::to_string(i + 1) + ": s_ac must exceed s_ab");
    }
    double leg1_mm = 0.0, leg2_mm = 0.0;
    double difference = s_ac - s_ab;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const auto& s = *sources[k];
      const auto c1 = evaluate(s, s_ac, s_ac, noise[k]);
      const auto c2 = evaluate(s, s_ab, s_ab, noise[k]);
      leg1_mm += c1.mm;
      leg2_mm += c2.mm;
      const double d = c1.mm - c2.mm;
      out.traces[k].native.push_back(c1.native - c2.native);
      out.traces[k].contribution_mm.push_back(d);
      difference += d / 1000.0;
    }
    DifferentialRow row{s_ac + leg1_mm / 1000.0, s_ab + leg2_mm / 1000.0};
    if (options.round_readings) {
      row.s1 = round_to_tenth_mm(row.s1);
      row.s2 = round_to_tenth_mm(row.s2);
    }
    out.rows.push_back(row);
    out.differences.push_back(difference);
  }
  return out;
}

std::string_view effect_name(Effect e) {
  switch (e) {
    case Effect::systematic: return "systematic";
    case Effect::random: return "random";
    case Effect::non_effect: return "non-effect";
  }
  return "?";
}

EffectReport classify_effects(std::span<const SourceTrace> traces, double eps_abs) {
  if (!(eps_abs > 0.0)) throw ConfigError("effect threshold must be positive");
  EffectReport report;
  report.eps_abs = eps_abs;
  for (const auto& t : traces) {
    if (t.contribution_mm.empty()) {
      throw InsufficientDataError("source '" + t.name + "' has no contributions");
    }
    SourceEffect e;
    e.name = t.name;
    e.contributions = t.contribution_mm;
    e.mean = mean_of(e.contributions);
    double ss = 0.0;
    for (double c : e.contributions) {
      ss += (c - e.mean) * (c - e.mean);
      e.max_abs = std::max(e.max_abs, std::abs(c));
    }
    const std::size_t n = e.contributions.size();
    e.std = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    if (e.max_abs <= eps_abs) {
      e.effect = Effect::non_effect;
    } else if (e.std > eps_abs) {
      e.effect = Effect::random;
    } else {
      e.effect = Effect::systematic;
    }
    report.sources.push_back(std::move(e));
  }
  return report;
}

}  // namespace errmodel

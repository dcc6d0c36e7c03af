#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "errmodel/dataset.hpp"

namespace errmodel {

/// Measurement condition an error source is a function of.
enum class Condition { none, temperature, distance };

std::string_view condition_name(Condition c);
Condition parse_condition(std::string_view name);

struct AdditiveConstant {
  double c_mm = 0.0;
};
struct Multiplicative {
  double r_ppm = 0.0;
};
struct CycleError {
  double amplitude_mm = 0.0;
  double wavelength_m = 20.0;
  double phase_rad = 0.0;
};
struct TemperaturePolynomial {
  std::vector<double> coeffs_ppm;  // ascending powers of T (degC)
};
struct GaussianNoise {
  double sigma_mm = 0.0;
};

using SourceKind = std::variant<AdditiveConstant, Multiplicative, CycleError,
                                TemperaturePolynomial, GaussianNoise>;

/// One error source acting on a distance measurand (m). Absolute sources are
/// in mm; relative ones (multiplicative, temperature polynomial) in ppm of the
/// distance condition, or of the true value when no distance is scheduled.
class ErrorSource {
 public:
  ErrorSource(std::string name, SourceKind kind, Condition depends_on);

  static ErrorSource additive(std::string name, double c_mm);
  static ErrorSource multiplicative(std::string name, double r_ppm);
  static ErrorSource cycle(std::string name, double amplitude_mm, double wavelength_m,
                           double phase_rad);
  static ErrorSource temperature_polynomial(std::string name, std::vector<double> coeffs);
  static ErrorSource gaussian_noise(std::string name, double sigma_mm);

  const std::string& name() const noexcept { return name_; }
  const SourceKind& kind() const noexcept { return kind_; }
  Condition depends_on() const noexcept { return depends_on_; }
  bool relative() const noexcept;
  std::string_view kind_name() const noexcept;

 private:
  std::string name_;
  SourceKind kind_;
  Condition depends_on_;
};

struct ConstantCondition {
  double value = 0.0;
};
struct ListedCondition {
  std::vector<double> values;
};
struct UniformCondition {
  double min = 0.0;
  double max = 1.0;
};
using ConditionGenerator = std::variant<ConstantCondition, ListedCondition, UniformCondition>;

/// Condition values of one repeat.
struct ConditionVector {
  std::optional<double> temperature;
  std::optional<double> distance;

  std::optional<double> get(Condition c) const;
};

/// How conditions vary across n repeats. Uniform generators draw from a
/// per-condition substream of `seed`.
class ConditionSchedule {
 public:
  explicit ConditionSchedule(std::size_t repeats, std::uint64_t seed = 0);

  /// Throws ConfigError if a listed generator's length differs from repeats
  /// or a uniform range is empty.
  ConditionSchedule& set(Condition condition, ConditionGenerator generator);

  std::size_t repeats() const noexcept { return repeats_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool has(Condition condition) const;

  /// Copy with the same generators and a different seed.
  ConditionSchedule with_seed(std::uint64_t seed) const;

  std::vector<ConditionVector> materialize() const;

 private:
  std::size_t repeats_;
  std::uint64_t seed_;
  std::optional<ConditionGenerator> temperature_;
  std::optional<ConditionGenerator> distance_;
};

/// Per-source contributions. `native` is in the source's own unit (mm or ppm);
/// `contribution_mm` is the effect on the measurand.
struct SourceTrace {
  std::string name;
  std::vector<double> native;
  std::vector<double> contribution_mm;
};

struct Simulation {
  MeasurementSeries series;
  std::vector<ConditionVector> conditions;
  std::vector<SourceTrace> traces;
};

/// observed_i = true_value + sum of contributions (mm converted to m).
/// The series condition column is distance when scheduled, else temperature,
/// else the repeat index. Throws ConfigError naming a source whose condition
/// is not scheduled.
Simulation simulate_repeated(std::span<const ErrorSource> sources,
                             const ConditionSchedule& schedule, double true_value_m);

struct DifferentialOptions {
  /// Round readings to 0.1 mm (half up), as the bundled fixtures do.
  bool round_readings = false;
  std::uint64_t seed = 0;
};

struct DifferentialSimulation {
  std::vector<DifferentialRow> rows;
  /// Differential observable (s_ac - s_ab) + sum_k (leg1_k - leg2_k), from
  /// unrounded per-source terms.
  std::vector<double> differences;
  /// Per-source leg1 - leg2 in mm.
  std::vector<SourceTrace> traces;
};

/// Each leg reads its nominal length plus every source evaluated at that
/// nominal length: s2 = s_ab + y(s_ab), s1 = s_ac + y(s_ac).
DifferentialSimulation simulate_differential(const ErrorSource& cycle,
                                             std::span<const NominalPair> pairs,
                                             std::span<const ErrorSource> extra_sources,
                                             DifferentialOptions options = {});

/// Rounds a reading in metres to 0.1 mm, half up.
double round_to_tenth_mm(double metres);

enum class Effect { systematic, random, non_effect };

std::string_view effect_name(Effect e);

struct SourceEffect {
  std::string name;
  std::vector<double> contributions;
  double mean = 0.0;
  double std = 0.0;
  double max_abs = 0.0;
  Effect effect = Effect::non_effect;
};

struct EffectReport {
  std::vector<SourceEffect> sources;
  double eps_abs = 0.0;
};

/// non-effect if max|c| <= eps; random if std > eps; systematic otherwise.
/// Requires non-empty sequences and eps_abs > 0.
EffectReport classify_effects(std::span<const SourceTrace> traces, double eps_abs);

inline constexpr double kDefaultEffectThreshold = 1e-6;  // mm

}  // namespace errmodel

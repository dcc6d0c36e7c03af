#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errmodel/dataset.hpp"

namespace errmodel {

/// How a component's standard deviation enters the total error.
struct Sensitivity {
  enum class Kind { constant, proportional, custom };

  Kind kind = Kind::constant;
  double coefficient = 1.0;  // used by Kind::custom

  static Sensitivity constant() { return {Kind::constant, 1.0}; }
  /// Scaled by the operating distance; the component std is in ppm.
  static Sensitivity proportional() { return {Kind::proportional, 1.0}; }
  static Sensitivity custom(double c) { return {Kind::custom, c}; }
};

enum class Shape { gaussian, arcsine, uniform };

std::string_view shape_name(Shape shape);
/// Throws ConfigError for names other than gaussian, arcsine, uniform.
Shape parse_shape(std::string_view name);

struct BudgetComponent {
  std::string name;
  double std = 0.0;
  Unit unit = Unit::millimetre;
  Sensitivity sensitivity;
  Shape shape = Shape::gaussian;
};

/// Independent zero-mean error components combined at a distance S (m).
/// Every term resolves to mm: length stds are converted, ppm stds are
/// multiplied by S.
class ErrorBudget {
 public:
  /// Throws ConfigError for duplicate names, negative stds or a non-positive
  /// operating point with proportional terms, and UnitError when a
  /// component's unit does not fit its sensitivity.
  ErrorBudget(std::vector<BudgetComponent> components, double operating_point_m);

  const std::vector<BudgetComponent>& components() const noexcept { return components_; }
  double operating_point() const noexcept { return operating_point_; }

  /// Resolved c_i * sigma_i in mm, one per component.
  const std::vector<double>& terms_mm() const noexcept { return terms_; }

 private:
  std::vector<BudgetComponent> components_;
  double operating_point_;
  std::vector<double> terms_;
};

/// sqrt(sum (c_i sigma_i)^2), in mm.
double total_std(const ErrorBudget& budget);

/// Sample std of Delta = sum c_i e_i with e_i drawn from each component's
/// shape scaled to its sigma. Component i draws from its own mt19937_64
/// seeded from (seed, i). Requires n >= 10^4.
double monte_carlo_std(const ErrorBudget& budget, std::size_t n, std::uint64_t seed,
                       std::span<const Shape> shapes);
double monte_carlo_std(const ErrorBudget& budget, std::size_t n, std::uint64_t seed);

/// Reads {operating_point_m, components: [{name, std, unit, sensitivity[, shape]}]}
/// where sensitivity is "constant", "proportional" or a number.
ErrorBudget parse_budget(std::string_view json_text);
ErrorBudget load_budget(const std::filesystem::path& path);

/// Derives independent stream seeds from one user seed.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace errmodel

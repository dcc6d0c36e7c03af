#include "errmodel/regression.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "errmodel/error.hpp"

namespace errmodel {

namespace {

double sum_squares(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

std::vector<double> monomials(double t, int degree) {
  std::vector<double> row(static_cast<std::size_t>(degree) + 1);
  double p = 1.0;
  for (auto& x : row) {
    x = p;
    p *= t;
  }
  return row;
}

// Sine and cosine columns are bounded, so a column whose squared norm is
// negligible next to the largest one is rank-deficient even though
// equilibration inside solve() would rescale it to unit size.
std::vector<double> solve_bounded_basis(const NormalEquations& normal) {
  double largest = 0.0;
  for (std::size_t j = 0; j < normal.size(); ++j) largest = std::max(largest, normal.matrix(j, j));
  for (std::size_t j = 0; j < normal.size(); ++j) {
    if (!(normal.matrix(j, j) > kSingularityThreshold * largest)) {
      throw SingularMatrixError(j, "singular normal equations: basis column " +
                                       std::to_string(j) + " vanishes on these samples");
    }
  }
  return solve(normal);
}

CycleFit differential_fit(std::span<const DifferentialRow> rows,
                          std::span<const NominalPair> abscissa, double wavelength) {
  if (rows.size() < 3) {
    throw InsufficientDataError("differential cycle fit needs at least 3 rows");
  }
  if (!(wavelength > 0.0)) throw InputError("wavelength must be positive");
  const double w = 2.0 * std::numbers::pi / wavelength;

  NormalEquations normal(3);
  std::vector<std::array<double, 3>> basis;
  basis.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double at1 = abscissa.empty() ? rows[i].s1 : abscissa[i].s_ac;
    const double at2 = abscissa.empty() ? rows[i].s2 : abscissa[i].s_ab;
    const std::array<double, 3> row{1.0, std::sin(w * at1) - std::sin(w * at2),
                                    std::cos(w * at1) - std::cos(w * at2)};
    normal.accumulate(row, rows[i].difference());
    basis.push_back(row);
  }

  std::vector<double> x;
  try {
    x = solve_bounded_basis(normal);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(
        e.pivot(), std::string(e.what()) +
                       "; leg distances must sample diverse cycle phases");
  }

  CycleFit fit{{}, std::move(normal), x, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& b = basis[i];
    fit.residuals.push_back(rows[i].difference() - x[0] - x[1] * b[1] - x[2] * b[2]);
  }
  auto& m = fit.model;
  m.wavelength = wavelength;
  m.amplitude = std::hypot(x[1], x[2]);
  m.phase = normalize_phase(std::atan2(x[2], x[1]));
  m.offset_s0 = x[0];
  m.dof = static_cast<int>(rows.size()) - 3;
  m.residual_std = m.dof > 0 ? std::sqrt(sum_squares(fit.residuals) / m.dof) : 0.0;
  return fit;
}

}  // namespace

RandomModelEstimate random_model(std::span<const double> values) {
  if (values.size() < 2) {
    throw InsufficientDataError("random model needs at least 2 values, got " +
                                std::to_string(values.size()));
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)), values.size()};
}

double PolynomialErrorModel::evaluate(double t) const {
  double r = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * t + *it;
  return r;
}

PolynomialFit fit_polynomial(std::span<const ErrorSample> samples, int degree) {
  if (degree < 0) throw InputError("polynomial degree must be non-negative");
  const auto k = static_cast<std::size_t>(degree) + 1;
  if (samples.size() <= k) {
    throw InsufficientDataError("degree-" + std::to_string(degree) +
                                " fit needs more than " + std::to_string(k) +
                                " samples");
  }

  NormalEquations normal(k);
  Domain domain{samples.front().condition, samples.front().condition};
  for (const auto& s : samples) {
    normal.accumulate(monomials(s.condition, degree), s.error);
    domain.min = std::min(domain.min, s.condition);
    domain.max = std::max(domain.max, s.condition);
  }

  PolynomialFit fit{{solve(normal), domain, 0.0, 0}, std::move(normal), {}};
  for (const auto& s : samples) {
    fit.residuals.push_back(s.error - fit.model.evaluate(s.condition));
  }
  fit.model.dof = static_cast<int>(samples.size() - k);
  fit.model.residual_std = std::sqrt(sum_squares(fit.residuals) / fit.model.dof);
  return fit;
}

FrequencyPrediction predict_frequency(const PolynomialErrorModel& model, double f0,
                                      double t) {
  const double r = model.evaluate(t);
  return {f0 * (1.0 + r * 1e-6), r, !model.domain.contains(t)};
}

double SinusoidalErrorModel::evaluate(double s) const {
  return amplitude * std::sin(2.0 * std::numbers::pi * s / wavelength + phase) +
         constant.value_or(0.0);
}

CycleFit fit_cycle_direct(std::span<const ErrorSample> samples, double wavelength,
                          CycleFitOptions options) {
  if (samples.size() < 3) {
    throw InsufficientDataError("cycle fit needs at least 3 samples");
  }
  if (!(wavelength > 0.0)) throw InputError("wavelength must be positive");
  const double w = 2.0 * std::numbers::pi / wavelength;
  const std::size_t k = options.constant_term ? 3 : 2;

  NormalEquations normal(k);
  for (const auto& s : samples) {
    const double th = w * s.condition;
    std::vector<double> row{std::sin(th), std::cos(th)};
    if (options.constant_term) row.push_back(1.0);
    normal.accumulate(row, s.error);
  }
  auto x = solve_bounded_basis(normal);

  CycleFit fit{{}, std::move(normal), x, {}};
  auto& m = fit.model;
  m.wavelength = wavelength;
  m.amplitude = std::hypot(x[0], x[1]);
  m.phase = normalize_phase(std::atan2(x[1], x[0]));
  if (options.constant_term) m.constant = x[2];
  for (const auto& s : samples) fit.residuals.push_back(s.error - m.evaluate(s.condition));
  m.dof = static_cast<int>(samples.size() - k);
  m.residual_std = m.dof > 0 ? std::sqrt(sum_squares(fit.residuals) / m.dof) : 0.0;
  return fit;
}

CycleFit fit_cycle_differential(std::span<const DifferentialRow> rows,
                                double wavelength) {
  return differential_fit(rows, {}, wavelength);
}

CycleFit fit_cycle_differential(std::span<const DifferentialRow> rows,
                                std::span<const NominalPair> abscissa,
                                double wavelength) {
  if (abscissa.size() != rows.size()) {
    throw InputError("nominal abscissa count does not match row count");
  }
  return differential_fit(rows, abscissa, wavelength);
}

double normalize_phase(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double p = std::fmod(radians, two_pi);
  if (p < 0.0) p += two_pi;
  if (p >= two_pi) p = 0.0;
  return p;
}

}  // namespace errmodel

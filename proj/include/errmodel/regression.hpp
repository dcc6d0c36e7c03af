#pragma once

#include <optional>
#include <span>
#include <vector>

#include "errmodel/dataset.hpp"
#include "errmodel/linsolve.hpp"

namespace errmodel {

/// Mean and dispersion of a sample treated purely statistically.
struct RandomModelEstimate {
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator
  std::size_t n = 0;

  double relative_std() const { return std / mean; }
};

/// Throws InsufficientDataError for fewer than two values.
RandomModelEstimate random_model(std::span<const double> values);

struct Domain {
  double min = 0.0;
  double max = 0.0;

  bool contains(double x) const noexcept { return x >= min && x <= max; }
};

/// R(T) = sum_k coeffs[k] T^k, fitted over `domain`.
struct PolynomialErrorModel {
  std::vector<double> coeffs;
  Domain domain;
  double residual_std = 0.0;
  int dof = 0;

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  double evaluate(double t) const;
};

struct PolynomialFit {
  PolynomialErrorModel model;
  NormalEquations normal;
  std::vector<double> residuals;
};

/// Least-squares fit over the raw monomial basis 1, T, ..., T^degree.
/// Requires n > degree + 1 samples.
PolynomialFit fit_polynomial(std::span<const ErrorSample> samples, int degree);

struct FrequencyPrediction {
  double frequency = 0.0;
  double relative_error_ppm = 0.0;
  bool out_of_domain = false;
};

/// f = f0 (1 + R(T) 1e-6).
FrequencyPrediction predict_frequency(const PolynomialErrorModel& model, double f0,
                                      double t);

/// y(S) = amplitude sin(2 pi S / wavelength + phase) [+ constant].
struct SinusoidalErrorModel {
  double amplitude = 0.0;
  double wavelength = 20.0;
  double phase = 0.0;  // radians, [0, 2 pi)
  std::optional<double> offset_s0;
  std::optional<double> constant;
  double residual_std = 0.0;
  int dof = 0;

  double evaluate(double s) const;
};

struct CycleFit {
  SinusoidalErrorModel model;
  NormalEquations normal;
  /// Raw solution: (a, b[, constant]) for the direct fit, (S0, a, b) for the
  /// differential fit.
  std::vector<double> solution;
  std::vector<double> residuals;
};

struct CycleFitOptions {
  bool constant_term = false;
};

/// Fits error = a sin(2 pi S / wavelength) + b cos(2 pi S / wavelength), with
/// the sample condition as S. amplitude = hypot(a, b), phase = atan2(b, a).
CycleFit fit_cycle_direct(std::span<const ErrorSample> samples, double wavelength,
                          CycleFitOptions options = {});

/// Fits S1 - S2 = S0 + a A_i + b B_i with A_i, B_i the sine and cosine
/// differences at the two leg readings.
CycleFit fit_cycle_differential(std::span<const DifferentialRow> rows,
                                double wavelength);

/// Same fit with the basis evaluated at the nominal leg lengths instead of the
/// readings; for simulated designs whose cycle error was generated there.
CycleFit fit_cycle_differential(std::span<const DifferentialRow> rows,
                                std::span<const NominalPair> abscissa,
                                double wavelength);

/// Maps an angle into [0, 2 pi).
double normalize_phase(double radians);

}  // namespace errmodel

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "errmodel/error.hpp"
#include "errmodel/regression.hpp"
#include "fixtures.hpp"

namespace errmodel {
namespace {

constexpr double kPi = std::numbers::pi;

// Least squares through QR of the design matrix; shares no code with the
// normal-equation route.
Eigen::VectorXd qr_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  return design.colPivHouseholderQr().solve(y);
}

std::vector<ErrorSample> table1_samples(double quantum = 1.0) {
  return to_error_samples(testing::table1(), ReferenceRule::mean_reference, quantum);
}

TEST(RandomModel, Table1Frequencies) {
  const auto est = random_model(testing::table1().observed());
  EXPECT_EQ(est.n, 15u);
  EXPECT_NEAR(est.mean, 5.000050, 5e-7);
  EXPECT_NEAR(est.relative_std() * 1e6, 15.8, 0.1);
}

TEST(RandomModel, Table3Differences) {
  EXPECT_NEAR(random_model(testing::table3().differences()).mean, 8.0014, 1e-4);
}

TEST(RandomModel, ConstantList) {
  const std::vector<double> v{5, 5, 5};
  const auto est = random_model(v);
  EXPECT_EQ(est.mean, 5.0);
  EXPECT_EQ(est.std, 0.0);
}

TEST(RandomModel, NeedsTwoValues) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(random_model(one), InsufficientDataError);
}

TEST(RandomModelProperty, TranslationEquivariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(2 + trial % 30);
    for (auto& x : v) x = u(rng);
    // Power-of-two shift keeps every addition exact.
    const double c = std::ldexp(1.0, trial % 5);
    std::vector<double> shifted(v);
    for (auto& x : shifted) x += c;
    const auto a = random_model(v), b = random_model(shifted);
    EXPECT_NEAR(b.mean, a.mean + c, 1e-12);
    EXPECT_NEAR(b.std, a.std, 1e-12);
  }
}

TEST(FitPolynomial, Table1NormalEquations) {
  const auto fit = fit_polynomial(table1_samples(), 3);
  const double expected[4][4] = {{15, 450, 41500, 2925000},
                                 {450, 41500, 2925000, 256870000},
                                 {41500, 2925000, 256870000, 21952500000.0},
                                 {2925000, 256870000, 21952500000.0, 1983295000000.0}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(fit.normal.matrix(i, j), expected[i][j]);
  const double rhs[4] = {-1, 4610, 304500, 42713000};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(fit.normal.rhs(i), rhs[i]);
}

TEST(FitPolynomial, Table1CoefficientsAndResidual) {
  const auto fit = fit_polynomial(table1_samples(), 3);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(fit.model.coeffs[k], testing::kReferenceCubic[k], 1e-4) << "k=" << k;
  }
  EXPECT_NEAR(fit.model.residual_std, 2.3, 0.2);
  EXPECT_EQ(fit.model.dof, 11);
  EXPECT_EQ(fit.model.domain.min, -40.0);
  EXPECT_EQ(fit.model.domain.max, 100.0);

  // Independent QR route on the same samples.
  const auto samples = table1_samples();
  Eigen::MatrixXd design(15, 4);
  Eigen::VectorXd y(15);
  for (int i = 0; i < 15; ++i) {
    const double t = samples[i].condition;
    design.row(i) << 1, t, t * t, t * t * t;
    y(i) = samples[i].error;
  }
  const auto oracle = qr_least_squares(design, y);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(fit.model.coeffs[k], oracle(k), 1e-9 * std::max(1.0, std::abs(oracle(k))));
  }
}

TEST(FitPolynomial, ExactLine) {
  std::vector<ErrorSample> s;
  for (int i = 0; i < 6; ++i) s.push_back({double(i), 1.0 + 2.0 * i});
  const auto fit = fit_polynomial(s, 1);
  EXPECT_NEAR(fit.model.coeffs[0], 1.0, 1e-13);
  EXPECT_NEAR(fit.model.coeffs[1], 2.0, 1e-13);
  EXPECT_NEAR(fit.model.residual_std, 0.0, 1e-13);
}

TEST(FitPolynomial, AllConditionsEqualIsSingular) {
  std::vector<ErrorSample> s(8, ErrorSample{20.0, 1.0});
  EXPECT_THROW(fit_polynomial(s, 3), SingularMatrixError);
}

TEST(FitPolynomial, TooFewSamples) {
  std::vector<ErrorSample> s{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  EXPECT_THROW(fit_polynomial(s, 3), InsufficientDataError);
}

TEST(FitPolynomialProperty, ResidualsOrthogonalToBasis) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(-50, 120), e(-40, 40);
  for (int trial = 0; trial < 50; ++trial) {
    const int degree = 1 + trial % 4;
    std::vector<ErrorSample> s(10 + trial % 20);
    for (auto& x : s) x = {t(rng), e(rng)};
    const auto fit = fit_polynomial(s, degree);
    double tmax = 0.0, rsum = 0.0;
    for (const auto& x : s) {
      tmax = std::max(tmax, std::abs(x.condition));
      rsum += std::abs(x.error);
    }
    for (int k = 0; k <= degree; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        dot += fit.residuals[i] * std::pow(s[i].condition, k);
      }
      EXPECT_LE(std::abs(dot), 1e-6 * rsum * std::pow(tmax, k)) << "k=" << k;
    }
  }
}

TEST(PredictFrequency, ReferenceCoefficientsAtZero) {
  const PolynomialErrorModel m{{testing::kReferenceCubic, testing::kReferenceCubic + 4},
                               {-40, 100}};
  const auto p = predict_frequency(m, 5.000050, 0.0);
  EXPECT_DOUBLE_EQ(p.frequency, 5.000050 * (1 + 9.983251e-6));
  EXPECT_FALSE(p.out_of_domain);
  EXPECT_TRUE(predict_frequency(m, 5.000050, 120.0).out_of_domain);
}

TEST(PredictFrequency, ZeroModelIsIdentity) {
  const PolynomialErrorModel m{{0, 0, 0, 0}, {-40, 100}};
  EXPECT_EQ(predict_frequency(m, 5.000050, 37.0).frequency, 5.000050);
}

TEST(PredictFrequency, RefittedCubicAtMinus40) {
  const auto fit = fit_polynomial(table1_samples(), 3);
  const auto p = predict_frequency(fit.model, 5.000050, -40.0);
  // Within the fitted residual envelope of Table 1 row 1.
  EXPECT_LE(std::abs(p.frequency - 4.999900) / 4.999900, 3e-6);
}

TEST(FitCycleDirect, Table2) {
  const auto samples =
      to_error_samples(testing::table2(), ReferenceRule::explicit_reference);
  const auto fit = fit_cycle_direct(samples, 20.0);
  EXPECT_NEAR(fit.model.amplitude, 5.7, 0.3);
  EXPECT_NEAR(fit.model.phase * 180.0 / kPi, 254.41, 3.0);
  // Frozen from an independent numpy lstsq run on the same samples.
  EXPECT_NEAR(fit.model.amplitude, 5.723529853501958, 1e-9);
  EXPECT_NEAR(fit.model.phase * 180.0 / kPi, 255.14130048689296, 1e-7);
  EXPECT_EQ(fit.model.dof, 19);
}

TEST(FitCycleDirect, NoiselessSynthetic) {
  std::vector<ErrorSample> s;
  for (int i = 0; i < 20; ++i) s.push_back({double(i), 5.0 * std::sin(2 * kPi * i / 20 + kPi / 4)});
  const auto fit = fit_cycle_direct(s, 20.0);
  EXPECT_NEAR(fit.model.amplitude, 5.0, 1e-10);
  EXPECT_NEAR(fit.model.phase, kPi / 4, 1e-10);
}

TEST(FitCycleDirect, NullSignal) {
  std::vector<ErrorSample> s;
  for (int i = 0; i < 10; ++i) s.push_back({1.7 * i, 0.0});
  EXPECT_EQ(fit_cycle_direct(s, 20.0).model.amplitude, 0.0);
}

TEST(FitCycleDirect, CongruentDistancesAreSingular) {
  std::vector<ErrorSample> s{{3, 1}, {23, 1.1}, {43, 0.9}, {63, 1}};
  EXPECT_THROW(fit_cycle_direct(s, 20.0), SingularMatrixError);
}

TEST(FitCycleDirect, OptionalConstantTerm) {
  std::vector<ErrorSample> s;
  for (int i = 0; i < 12; ++i) {
    const double S = 1.3 * i;
    s.push_back({S, 2.0 * std::sin(2 * kPi * S / 20 + 1.0) + 0.75});
  }
  const auto fit = fit_cycle_direct(s, 20.0, {.constant_term = true});
  EXPECT_NEAR(fit.model.amplitude, 2.0, 1e-10);
  EXPECT_NEAR(fit.model.phase, 1.0, 1e-10);
  ASSERT_TRUE(fit.model.constant);
  EXPECT_NEAR(*fit.model.constant, 0.75, 1e-10);
}

TEST(FitCycleDirectProperty, NoiselessRecovery) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> amp(1e-3, 100.0), ph(0.0, 2 * kPi), dist(0, 200);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = amp(rng), phi = ph(rng);
    std::vector<ErrorSample> s(5 + trial % 20);
    for (auto& x : s) {
      x.condition = dist(rng);
      x.error = a * std::sin(2 * kPi * x.condition / 20 + phi);
    }
    const auto m = fit_cycle_direct(s, 20.0).model;
    EXPECT_NEAR(m.amplitude, a, 1e-9 * a);
    // Phase compared on the circle.
    const double dphi = std::remainder(m.phase - phi, 2 * kPi);
    EXPECT_LE(std::abs(dphi), 1e-9 * std::max(1.0, phi));
    EXPECT_GE(m.phase, 0.0);
    EXPECT_LT(m.phase, 2 * kPi);
  }
}

TEST(FitCycleDifferential, Table3Assembly) {
  const auto fit = fit_cycle_differential(testing::table3().rows, 20.0);
  // Oracle: numpy assembly of the same basis from the fixture readings.
  const double n[3][3] = {{15.0, 3.6425203565968314, 2.395258316292257},
                          {3.6425203565968314, 27.830761041070268, -3.441032424054761},
                          {2.395258316292257, -3.441032424054761, 26.447641846635378}};
  const double u[3] = {120.0215, 29.22673397992118, 19.24293966800813};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(fit.normal.rhs(i), u[i], 1e-10);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(fit.normal.matrix(i, j), n[i][j], 1e-12);
  }
  // Reference system agrees to 1e-4 everywhere except (3,3) and rhs 2, 3.
  EXPECT_NEAR(fit.normal.matrix(0, 1), 3.64249, 1e-4);
  EXPECT_NEAR(fit.normal.matrix(0, 2), 2.39534, 1e-4);
  EXPECT_NEAR(fit.normal.matrix(1, 1), 27.83084, 1e-4);
  EXPECT_NEAR(fit.normal.matrix(1, 2), -3.44106, 1e-4);
}

TEST(FitCycleDifferential, Table3Solution) {
  const auto fit = fit_cycle_differential(testing::table3().rows, 20.0);
  EXPECT_NEAR(fit.solution[0], 8.0000109200246357, 1e-10);
  EXPECT_NEAR(fit.solution[1], 3.5441672970036144e-03, 1e-12);
  EXPECT_NEAR(fit.solution[2], 3.5179913776450158e-03, 1e-12);
  EXPECT_NEAR(fit.model.amplitude, 0.00499, 5e-5);
  EXPECT_NEAR(fit.model.phase, kPi / 4, 0.01);
  EXPECT_EQ(fit.model.dof, 12);
  const double naive = random_model(testing::table3().differences()).mean;
  EXPECT_LT(std::abs(*fit.model.offset_s0 - 8.0), std::abs(naive - 8.0));
}

TEST(FitCycleDifferential, NullSignalGivesMeanDifference) {
  const auto t = testing::table3();
  std::vector<DifferentialRow> rows;
  for (const auto& p : t.nominal) rows.push_back({p.s_ac, p.s_ab});
  const auto fit = fit_cycle_differential(rows, 20.0);
  EXPECT_NEAR(fit.solution[0], 8.0, 1e-12);
  EXPECT_NEAR(fit.solution[1], 0.0, 1e-12);
  EXPECT_NEAR(fit.solution[2], 0.0, 1e-12);
}

TEST(FitCycleDifferential, DegenerateLayoutIsSingular) {
  // Both legs a whole wavelength apart: A_i = B_i = 0.
  std::vector<DifferentialRow> rows{{21, 1}, {33, 13}, {47.5, 27.5}, {60, 40}};
  try {
    fit_cycle_differential(rows, 20.0);
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_NE(std::string(e.what()).find("diverse"), std::string::npos);
  }
}

TEST(NormalizePhase, Range) {
  EXPECT_EQ(normalize_phase(0.0), 0.0);
  EXPECT_NEAR(normalize_phase(-kPi / 2), 1.5 * kPi, 1e-15);
  EXPECT_NEAR(normalize_phase(5 * kPi), kPi, 1e-14);
  EXPECT_LT(normalize_phase(2 * kPi), 2 * kPi);
}

TEST(SinusoidalModel, BoundedByAmplitude) {
  SinusoidalErrorModel m;
  m.amplitude = 5.7;
  m.phase = 254.41 * kPi / 180.0;
  for (double s = 0; s < 60; s += 0.37) EXPECT_LE(std::abs(m.evaluate(s)), m.amplitude);
}

}  // namespace
}  // namespace errmodel

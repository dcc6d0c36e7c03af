#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "errmodel/distributions.hpp"

namespace errmodel {
namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double kPi = std::numbers::pi;

// Integral of g(y) pdf(y) over (-A, A) with y = A sin(u); the Jacobian
// A cos(u) cancels the endpoint singularity.
template <class F>
double integrate_substituted(const ArcsineDistribution& d, F g) {
  const double a = d.amplitude();
  auto integrand = [&](double u) {
    const double y = a * std::sin(u);
    return g(y) * d.pdf(y) * a * std::cos(u);
  };
  return gauss_kronrod<double, 61>::integrate(integrand, -kPi / 2, kPi / 2, 15, 1e-13);
}

TEST(ArcsinePdf, Values) {
  const ArcsineDistribution d(5.7);
  EXPECT_NEAR(d.pdf(0.0), 1.0 / (5.7 * kPi), 1e-15);
  EXPECT_NEAR(d.pdf(0.0), 0.05585, 1e-5);
  EXPECT_EQ(d.pdf(6.0), 0.0);
  EXPECT_EQ(d.pdf(-6.0), 0.0);
  EXPECT_EQ(d.pdf(5.7), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(ArcsineDistribution(1.0).pdf(0.6), 1.0 / (kPi * 0.8), 1e-15);
  EXPECT_NEAR(ArcsineDistribution(1.0).pdf(0.6), 0.39789, 5e-6);
}

TEST(ArcsineStd, Values) {
  EXPECT_NEAR(ArcsineDistribution(5.7).stddev(), 4.0305, 5e-5);
  EXPECT_EQ(ArcsineDistribution(0.0).stddev(), 0.0);
  EXPECT_DOUBLE_EQ(ArcsineDistribution(std::sqrt(2.0)).stddev(), 1.0);
}

TEST(ArcsineCdf, Values) {
  const ArcsineDistribution d(2.5);
  EXPECT_EQ(d.cdf(0.0), 0.5);
  EXPECT_EQ(d.cdf(-2.5), 0.0);
  EXPECT_EQ(d.cdf(-3.0), 0.0);
  EXPECT_EQ(d.cdf(2.5), 1.0);
  EXPECT_NEAR(ArcsineDistribution(1.0).cdf(1.0 / std::sqrt(2.0)), 0.75, 1e-15);
  double prev = 0.0;
  for (double y = -2.49; y < 2.5; y += 0.01) {
    EXPECT_GT(d.cdf(y), prev);
    prev = d.cdf(y);
  }
}

TEST(ArcsineCdf, MatchesIntegratedPdf) {
  const ArcsineDistribution d(1.3);
  for (double y : {-1.2, -0.4, 0.3, 1.1}) {
    // Integrating from the centre keeps the endpoint singularity out of range.
    const double area = gauss_kronrod<double, 61>::integrate(
        [&](double t) { return d.pdf(t); }, 0.0, y, 15, 1e-13);
    EXPECT_NEAR(0.5 + area, d.cdf(y), 1e-10) << y;
  }
}

TEST(ArcsineProperty, NormalizationAndSecondMoment) {
  for (double a : {0.01, 1.0, 5.0, 5.7, 123.0}) {
    const ArcsineDistribution d(a);
    EXPECT_NEAR(integrate_substituted(d, [](double) { return 1.0; }), 1.0, 1e-9) << a;
    const double m2 = integrate_substituted(d, [](double y) { return y * y; });
    EXPECT_NEAR(m2 / (a * a / 2.0), 1.0, 1e-8) << a;
  }
}

TEST(ArcsineProperty, SampledStdAndKolmogorovSmirnov) {
  const ArcsineDistribution d(5.0);
  const auto y = d.sample(42, 100000);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(y.size() - 1));
  EXPECT_NEAR(sd / d.stddev(), 1.0, 0.02);
  EXPECT_LT(ks_distance(d, y), 0.01);
  for (double v : y) EXPECT_LE(std::abs(v), 5.0);
}

TEST(Arcsine, RejectsNegativeAmplitude) {
  EXPECT_THROW(ArcsineDistribution(-1.0), std::invalid_argument);
}

}  // namespace
}  // namespace errmodel

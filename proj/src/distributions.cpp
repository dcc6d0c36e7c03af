#include "errmodel/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace errmodel {

ArcsineDistribution::ArcsineDistribution(double amplitude) : amplitude_(amplitude) {
  if (!std::isfinite(amplitude) || amplitude < 0.0) {
    throw std::invalid_argument("arcsine amplitude must be finite and >= 0");
  }
}

double ArcsineDistribution::pdf(double y) const {
  const double ay = std::abs(y);
  if (ay > amplitude_) return 0.0;
  if (ay == amplitude_) return std::numeric_limits<double>::infinity();
  // (A - |y|)(A + |y|) keeps precision near the support edge.
  return 1.0 / (std::numbers::pi * std::sqrt((amplitude_ - ay) * (amplitude_ + ay)));
}

double ArcsineDistribution::cdf(double y) const {
  if (y < -amplitude_) return 0.0;
  if (y >= amplitude_) return 1.0;
  if (y == -amplitude_) return 0.0;
  return 0.5 + std::asin(y / amplitude_) / std::numbers::pi;
}

double ArcsineDistribution::stddev() const { return amplitude_ / std::numbers::sqrt2; }

std::vector<double> ArcsineDistribution::sample(std::uint64_t seed, std::size_t n) const {
  std::mt19937_64 engine(seed);
  std::vector<double> out(n);
  for (auto& y : out) y = (*this)(engine);
  return out;
}

double ks_distance(const ArcsineDistribution& dist, std::vector<double> samples) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = dist.cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n,
                  static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace errmodel

#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace errmodel {

/// Distribution of y = A sin(phi) with phi uniform on [0, 2 pi):
/// density 1 / (pi sqrt(A^2 - y^2)) on (-A, A).
class ArcsineDistribution {
 public:
  /// Throws std::invalid_argument for a negative or non-finite amplitude.
  /// A zero amplitude is the degenerate point mass at 0.
  explicit ArcsineDistribution(double amplitude);

  double amplitude() const noexcept { return amplitude_; }

  /// +infinity exactly at |y| = A; 0 outside the support.
  double pdf(double y) const;
  double cdf(double y) const;
  double stddev() const;

  template <class Engine>
  double operator()(Engine& engine) const {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    return amplitude_ * std::sin(phase(engine));
  }

  /// n draws from a std::mt19937_64 seeded with `seed`.
  std::vector<double> sample(std::uint64_t seed, std::size_t n) const;

 private:
  double amplitude_;
};

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// the distribution's CDF.
double ks_distance(const ArcsineDistribution& dist, std::vector<double> samples);

}  // namespace errmodel

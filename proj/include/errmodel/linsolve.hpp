#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace errmodel {

/// Symmetric k x k normal-equation system N x = u, stored dense row-major.
/// Accumulation writes both triangles from the same product, so the matrix is
/// symmetric bit-for-bit.
class NormalEquations {
 public:
  explicit NormalEquations(std::size_t k);

  /// Builds a system from explicit entries. Throws std::invalid_argument if
  /// the matrix is not square and symmetric or has a negative diagonal.
  static NormalEquations from_dense(const std::vector<std::vector<double>>& matrix,
                                    std::vector<double> rhs);

  /// Adds one observation equation  basis . x = observation.
  void accumulate(std::span<const double> basis, double observation);

  std::size_t size() const noexcept { return k_; }
  double matrix(std::size_t row, std::size_t col) const { return a_[row * k_ + col]; }
  double rhs(std::size_t row) const { return b_[row]; }
  std::span<const double> matrix_data() const noexcept { return a_; }
  std::span<const double> rhs_data() const noexcept { return b_; }

  std::vector<std::vector<double>> matrix_rows() const;

 private:
  std::size_t k_;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// Pivot threshold relative to the largest entry of the equilibrated matrix.
inline constexpr double kSingularityThreshold = 1e-12;

/// Solves the system by Gaussian elimination with complete pivoting on the
/// diagonally equilibrated matrix, followed by iterative refinement with
/// extended-precision residuals. Throws SingularMatrixError carrying the
/// elimination step whose pivot fell below the threshold.
std::vector<double> solve(const NormalEquations& eq);

/// max_i |(N x - u)_i| / max_i |u_i|; 0 when u = 0 and the residual is 0.
double relative_residual(const NormalEquations& eq, std::span<const double> x);

}  // namespace errmodel

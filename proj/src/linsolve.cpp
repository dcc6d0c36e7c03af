#include "errmodel/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "errmodel/error.hpp"

namespace errmodel {

NormalEquations::NormalEquations(std::size_t k) : k_(k), a_(k * k, 0.0), b_(k, 0.0) {
  if (k == 0) throw std::invalid_argument("normal equations need k >= 1");
}

NormalEquations NormalEquations::from_dense(
    const std::vector<std::vector<double>>& matrix, std::vector<double> rhs) {
  const std::size_t k = matrix.size();
  if (rhs.size() != k) throw std::invalid_argument("rhs length does not match matrix");
  NormalEquations eq(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (matrix[i].size() != k) throw std::invalid_argument("matrix is not square");
    if (matrix[i][i] < 0.0) throw std::invalid_argument("negative diagonal entry");
    for (std::size_t j = 0; j < k; ++j) {
      if (matrix[i][j] != matrix[j][i]) {
        throw std::invalid_argument("matrix is not symmetric");
      }
      eq.a_[i * k + j] = matrix[i][j];
    }
  }
  eq.b_ = std::move(rhs);
  return eq;
}

void NormalEquations::accumulate(std::span<const double> basis, double observation) {
  if (basis.size() != k_) throw std::invalid_argument("basis length does not match k");
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = i; j < k_; ++j) {
      const double p = basis[i] * basis[j];
      a_[i * k_ + j] += p;
      if (j != i) a_[j * k_ + i] += p;
    }
    b_[i] += basis[i] * observation;
  }
}

std::vector<std::vector<double>> NormalEquations::matrix_rows() const {
  std::vector<std::vector<double>> out(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    out[i].assign(a_.begin() + static_cast<std::ptrdiff_t>(i * k_),
                  a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * k_));
  }
  return out;
}

namespace {

// LU factors of P B Q with B = D A D, D = diag(1/sqrt(a_ii)).
struct Factorization {
  std::size_t k;
  std::vector<double> lu;
  std::vector<std::size_t> row_perm;
  std::vector<std::size_t> col_perm;
  std::vector<double> scale;

  std::vector<double> apply(std::span<const double> rhs) const {
    std::vector<double> y(k);
    for (std::size_t i = 0; i < k; ++i) y[i] = scale[row_perm[i]] * rhs[row_perm[i]];
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < i; ++j) y[i] -= lu[i * k + j] * y[j];
    }
    for (std::size_t i = k; i-- > 0;) {
      for (std::size_t j = i + 1; j < k; ++j) y[i] -= lu[i * k + j] * y[j];
      y[i] /= lu[i * k + i];
    }
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) x[col_perm[i]] = scale[col_perm[i]] * y[i];
    return x;
  }
};

Factorization factorize(const NormalEquations& eq) {
  const std::size_t k = eq.size();
  Factorization f{k, std::vector<double>(k * k), {}, {}, std::vector<double>(k)};
  f.row_perm.resize(k);
  f.col_perm.resize(k);
  std::iota(f.row_perm.begin(), f.row_perm.end(), std::size_t{0});
  std::iota(f.col_perm.begin(), f.col_perm.end(), std::size_t{0});

  for (std::size_t i = 0; i < k; ++i) {
    const double d = eq.matrix(i, i);
    f.scale[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
  }
  double largest = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      f.lu[i * k + j] = f.scale[i] * eq.matrix(i, j) * f.scale[j];
      largest = std::max(largest, std::abs(f.lu[i * k + j]));
    }
  }
  const double threshold = kSingularityThreshold * largest;

  auto& a = f.lu;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t pr = step, pc = step;
    double best = -1.0;
    for (std::size_t i = step; i < k; ++i) {
      for (std::size_t j = step; j < k; ++j) {
        if (std::abs(a[i * k + j]) > best) {
          best = std::abs(a[i * k + j]);
          pr = i;
          pc = j;
        }
      }
    }
    if (!(best > threshold)) {
      throw SingularMatrixError(
          step, "singular normal equations: pivot " + std::to_string(step) +
                    " is below " + std::to_string(kSingularityThreshold) +
                    " of the largest entry");
    }
    if (pr != step) {
      for (std::size_t j = 0; j < k; ++j) std::swap(a[pr * k + j], a[step * k + j]);
      std::swap(f.row_perm[pr], f.row_perm[step]);
    }
    if (pc != step) {
      for (std::size_t i = 0; i < k; ++i) std::swap(a[i * k + pc], a[i * k + step]);
      std::swap(f.col_perm[pc], f.col_perm[step]);
    }
    const double pivot = a[step * k + step];
    for (std::size_t i = step + 1; i < k; ++i) {
      const double m = a[i * k + step] / pivot;
      a[i * k + step] = m;
      for (std::size_t j = step + 1; j < k; ++j) a[i * k + j] -= m * a[step * k + j];
    }
  }
  return f;
}

std::vector<double> residual(const NormalEquations& eq, std::span<const double> x) {
  const std::size_t k = eq.size();
  std::vector<double> r(k);
  for (std::size_t i = 0; i < k; ++i) {
    long double acc = eq.rhs(i);
    for (std::size_t j = 0; j < k; ++j) {
      acc -= static_cast<long double>(eq.matrix(i, j)) * x[j];
    }
    r[i] = static_cast<double>(acc);
  }
  return r;
}

}  // namespace

std::vector<double> solve(const NormalEquations& eq) {
  const auto f = factorize(eq);
  auto x = f.apply(eq.rhs_data());
  for (int iter = 0; iter < 3; ++iter) {
    const auto r = residual(eq, x);
    const auto dx = f.apply(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  }
  return x;
}

double relative_residual(const NormalEquations& eq, std::span<const double> x) {
  const auto r = residual(eq, x);
  double rmax = 0.0, bmax = 0.0;
  for (std::size_t i = 0; i < eq.size(); ++i) {
    rmax = std::max(rmax, std::abs(r[i]));
    bmax = std::max(bmax, std::abs(eq.rhs(i)));
  }
  if (bmax == 0.0) return rmax;
  return rmax / bmax;
}

}  // namespace errmodel

#include "kikuchi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kikuchi/error.hpp"

namespace kikuchi::linalg {

void DenseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  KIKUCHI_REQUIRE(x.size() == cols_ && y.size() == rows_, ParameterError,
                  "dense multiply: dimension mismatch");
  for (std::size_t i = 0; i < rows_; ++i) y[i] = dot(row(i), x);
}

void DenseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  KIKUCHI_REQUIRE(x.size() == rows_ && y.size() == cols_, ParameterError,
                  "dense multiply_transpose: dimension mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < rows_; ++i) axpy(x[i], row(i), y);
}

double DenseMatrix::frobenius_norm() const { return norm(data_); }

double dot(std::span<const double> a, std::span<const double> b) {
  KIKUCHI_REQUIRE(a.size() == b.size(), ParameterError, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  KIKUCHI_REQUIRE(x.size() == y.size(), ParameterError, "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(std::span<double> x, double alpha) {
  for (double& v : x) v *= alpha;
}

SymmetricEigen jacobi_eigen(const DenseMatrix& input, std::size_t max_dim) {
  const std::size_t n = input.rows();
  KIKUCHI_REQUIRE(input.cols() == n, ParameterError, "jacobi_eigen needs a square matrix");
  if (n > max_dim) {
    throw CapacityError("dense diagonalization of dimension " + std::to_string(n) +
                        " exceeds cap " + std::to_string(max_dim));
  }
  DenseMatrix a = input;
  DenseMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double total = 0.0;
  for (double x : a.data()) total += x * x;
  const double threshold = 1e-30 * std::max(total, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off <= threshold) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p), aqq = a(q, q);
        // Skip rotations that would not change the diagonal in floating point.
        if (sweep > 3 && std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

}  // namespace kikuchi::linalg

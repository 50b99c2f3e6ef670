#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kikuchi::linalg {

/// Row-major dense matrix. Small sizes only: used for voting matrices, the
/// Lanczos tridiagonal, and the dense diagonalization oracle.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const { return data_; }

  void multiply(std::span<const double> x, std::span<double> y) const;
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  double frobenius_norm() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct SymmetricEigen {
  /// Ascending.
  std::vector<double> values;
  /// Column k of `vectors` is the unit eigenvector for values[k].
  DenseMatrix vectors;
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Throws CapacityError above `max_dim`.
SymmetricEigen jacobi_eigen(const DenseMatrix& a, std::size_t max_dim = 5000);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double alpha);

/// Sum with fixed-size blocks: deterministic order and error growth governed
/// by the block count rather than the vector length.
class BlockedSum {
public:
  void add(double v) {
    block_ += v;
    if (++count_ == kBlock) flush();
  }
  double total() {
    flush();
    return total_;
  }

private:
  static constexpr unsigned kBlock = 64;
  void flush() {
    total_ += block_;
    block_ = 0.0;
    count_ = 0;
  }
  double block_ = 0.0;
  double total_ = 0.0;
  unsigned count_ = 0;
};

}  // namespace kikuchi::linalg

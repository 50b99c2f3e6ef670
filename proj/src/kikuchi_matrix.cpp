#include "kikuchi/kikuchi_matrix.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "kikuchi/combinat.hpp"
#include "kikuchi/error.hpp"

namespace kikuchi {

using combinat::ExchangeEnumerator;
using combinat::SubsetIndexer;

KikuchiMatrix KikuchiMatrix::build(const model::SubsetTensor& tensor, std::uint32_t ell,
                                   const BuildOptions& options) {
  const std::uint32_t n = tensor.n, p = tensor.p;
  KIKUCHI_REQUIRE(p >= 1 && p <= n, ParameterError, "tensor order must satisfy 1 <= p <= n");
  KIKUCHI_REQUIRE(tensor.entries.size() == combinat::binom(static_cast<int>(n), static_cast<int>(p)),
                  ParameterError, "tensor entry count does not match C(n, p)");
  const std::uint32_t lo = p / 2, hi_margin = (p + 1) / 2;
  KIKUCHI_REQUIRE(ell >= lo && ell + hi_margin <= n, ParameterError,
                  "level l = " + std::to_string(ell) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(static_cast<int>(n) - static_cast<int>(hi_margin)) + "]");

  KikuchiMatrix m;
  m.source_ = std::make_shared<const model::SubsetTensor>(tensor);
  m.ell_ = ell;
  m.mode_ = options.mode;
  const bool even = p % 2 == 0;
  m.rows_ = SubsetIndexer(n, ell).size();
  m.cols_ = SubsetIndexer(n, even ? ell : ell + 1).size();
  if (even) {
    m.row_degree_ = m.col_degree_ = combinat::d_ell(n, ell, p);
  } else {
    const std::uint32_t h = p / 2;
    m.row_degree_ = combinat::binom(static_cast<int>(ell), static_cast<int>(h)) *
                    combinat::binom(static_cast<int>(n - ell), static_cast<int>(h + 1));
    m.col_degree_ = combinat::binom(static_cast<int>(ell + 1), static_cast<int>(h + 1)) *
                    combinat::binom(static_cast<int>(n - ell - 1), static_cast<int>(h));
  }

  if (options.mode == MatrixMode::ExplicitSparse) {
    std::uint64_t nnz = 0;
    if (__builtin_mul_overflow(m.rows_, m.row_degree_, &nnz) || nnz > options.entry_cap) {
      throw CapacityError("explicit symmetric-difference matrix needs more than " +
                          std::to_string(options.entry_cap) + " stored entries");
    }
    KIKUCHI_REQUIRE(m.cols_ <= std::numeric_limits<std::uint32_t>::max() &&
                        m.rows_ <= std::numeric_limits<std::uint32_t>::max(),
                    CapacityError, "explicit mode needs 32-bit row and column indices");
    m.csr_ = std::make_shared<const Csr>(m.materialize(false));
    if (!even) m.csr_transpose_ = std::make_shared<const Csr>(m.materialize(true));
  }
  return m;
}

template <class RowVisitor>
void KikuchiMatrix::for_each_in_row(bool transpose, std::uint64_t row, RowVisitor&& visit) const {
  const std::uint32_t n = this->n(), p = this->p();
  const bool even = p % 2 == 0;
  const std::uint32_t row_size = transpose && !even ? ell_ + 1 : ell_;
  const std::uint32_t col_size = even ? ell_ : (transpose ? ell_ : ell_ + 1);
  const std::uint32_t drop = even ? p / 2 : (transpose ? (p + 1) / 2 : p / 2);
  const std::uint32_t add = p - drop;

  const SubsetIndexer row_index(n, row_size);
  const SubsetIndexer col_index(n, col_size);
  const SubsetIndexer edge_index(n, p);
  std::vector<std::uint32_t> s(row_size);
  row_index.unrank_into(row, s);
  for (ExchangeEnumerator it(n, s, drop, add); it.next();) {
    visit(col_index.rank_unchecked(it.target()),
          source_->entries[edge_index.rank_unchecked(it.difference())]);
  }
}

KikuchiMatrix::Csr KikuchiMatrix::materialize(bool transpose) const {
  const std::uint64_t nrows = transpose ? cols_ : rows_;
  const std::uint64_t degree = transpose ? col_degree_ : row_degree_;
  Csr csr;
  csr.offsets.resize(nrows + 1);
  csr.columns.resize(nrows * degree);
  csr.values.resize(nrows * degree);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(nrows); ++r) {
    std::uint64_t k = static_cast<std::uint64_t>(r) * degree;
    csr.offsets[r] = k;
    for_each_in_row(transpose, static_cast<std::uint64_t>(r), [&](std::uint64_t c, double v) {
      csr.columns[k] = static_cast<std::uint32_t>(c);
      csr.values[k] = v;
      ++k;
    });
  }
  csr.offsets[nrows] = nrows * degree;
  return csr;
}

void KikuchiMatrix::apply(bool transpose, std::span<const double> v, std::span<double> out) const {
  const bool even = square();
  const bool use_transpose = transpose && !even;
  const std::uint64_t nrows = use_transpose ? cols_ : rows_;
  const std::uint64_t ncols = use_transpose ? rows_ : cols_;
  KIKUCHI_REQUIRE(v.size() == ncols && out.size() == nrows, ParameterError,
                  "matvec: dimension mismatch");
  const Csr* csr = mode_ == MatrixMode::ExplicitSparse
                       ? (use_transpose ? csr_transpose_.get() : csr_.get())
                       : nullptr;
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(nrows); ++r) {
    linalg::BlockedSum sum;
    if (csr) {
      for (std::uint64_t k = csr->offsets[r]; k < csr->offsets[r + 1]; ++k) {
        sum.add(csr->values[k] * v[csr->columns[k]]);
      }
    } else {
      for_each_in_row(use_transpose, static_cast<std::uint64_t>(r),
                      [&](std::uint64_t c, double y) { sum.add(y * v[c]); });
    }
    out[r] = sum.total();
  }
}

void KikuchiMatrix::matvec(std::span<const double> v, std::span<double> out) const {
  apply(false, v, out);
}

void KikuchiMatrix::matvec_transpose(std::span<const double> v, std::span<double> out) const {
  apply(true, v, out);
}

SymmetricOperator KikuchiMatrix::as_symmetric_operator() const {
  KIKUCHI_REQUIRE(square(), ParameterError, "odd-order symmetric-difference matrix is rectangular");
  return {rows_, [self = *this](std::span<const double> x, std::span<double> y) {
            self.matvec(x, y);
          }};
}

RectangularOperator KikuchiMatrix::as_rectangular_operator() const {
  return {rows_, cols_,
          [self = *this](std::span<const double> x, std::span<double> y) { self.matvec(x, y); },
          [self = *this](std::span<const double> x, std::span<double> y) {
            self.matvec_transpose(x, y);
          }};
}

double KikuchiMatrix::max_abs_row_sum() const {
  double best = 0.0;
  for (std::uint64_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for_each_in_row(false, r, [&](std::uint64_t, double y) { s += std::abs(y); });
    best = std::max(best, s);
  }
  return best;
}

linalg::DenseMatrix KikuchiMatrix::to_dense(std::uint64_t max_entries) const {
  if (rows_ * cols_ > max_entries) {
    throw CapacityError("dense copy of the symmetric-difference matrix exceeds the entry cap");
  }
  linalg::DenseMatrix d(rows_, cols_);
  for (std::uint64_t r = 0; r < rows_; ++r) {
    for_each_in_row(false, r, [&](std::uint64_t c, double y) { d(r, c) += y; });
  }
  return d;
}

void KikuchiMatrix::write_triplets(std::ostream& out) const {
  char buf[64];
  for (std::uint64_t r = 0; r < rows_; ++r) {
    for_each_in_row(false, r, [&](std::uint64_t c, double y) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), y);
      out << r << ' ' << c << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
    });
  }
}

model::SubsetTensor gauge_transform(const model::SubsetTensor& tensor, std::span<const double> x) {
  KIKUCHI_REQUIRE(x.size() == tensor.n, ParameterError, "gauge vector has wrong length");
  for (double v : x) {
    KIKUCHI_REQUIRE(v == 1.0 || v == -1.0, ParameterError, "gauge vector must be +-1");
  }
  model::SubsetTensor out = tensor;
  const SubsetIndexer index(tensor.n, tensor.p);
  std::vector<std::uint32_t> e(tensor.p);
  for (std::uint64_t r = 0; r < out.size(); ++r) {
    index.unrank_into(r, e);
    double sign = 1.0;
    for (std::uint32_t i : e) sign *= x[i];
    out.entries[r] *= sign;
  }
  return out;
}

KikuchiMatrix conjugate_by_spike(const KikuchiMatrix& m, std::span<const double> x) {
  KIKUCHI_REQUIRE(m.square(), ParameterError, "spike conjugation needs an even order");
  // For +-1 x and even p, x^S x^T = x^{S delta T}.
  BuildOptions options;
  options.mode = m.mode();
  return KikuchiMatrix::build(gauge_transform(m.source(), x), m.ell(), options);
}

}  // namespace kikuchi

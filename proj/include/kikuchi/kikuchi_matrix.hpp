#pragma once

// Order-l symmetric-difference matrices.
//
// Even p: square C(n,l) x C(n,l) with M_{S,T} = Y_{S delta T} when
// |S delta T| = p. Odd p: rectangular C(n,l) x C(n,l+1) with the same rule.
// Rows and columns are indexed by colex rank.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "kikuchi/linalg.hpp"
#include "kikuchi/linear_operator.hpp"
#include "kikuchi/tensor_model.hpp"

namespace kikuchi {

enum class MatrixMode { Implicit, ExplicitSparse };

struct BuildOptions {
  MatrixMode mode = MatrixMode::Implicit;
  /// Explicit mode refuses to store more structural nonzeros than this.
  std::uint64_t entry_cap = 100'000'000;
};

class KikuchiMatrix {
public:
  /// Even p needs p/2 <= l <= n - p/2; odd p needs floor(p/2) <= l <= n - ceil(p/2).
  static KikuchiMatrix build(const model::SubsetTensor& tensor, std::uint32_t ell,
                             const BuildOptions& options = {});

  std::uint32_t n() const { return source_->n; }
  std::uint32_t p() const { return source_->p; }
  std::uint32_t ell() const { return ell_; }
  bool square() const { return p() % 2 == 0; }
  MatrixMode mode() const { return mode_; }
  std::uint64_t rows() const { return rows_; }
  std::uint64_t cols() const { return cols_; }
  /// Structural nonzeros per row (d_l for even p).
  std::uint64_t row_degree() const { return row_degree_; }
  const model::SubsetTensor& source() const { return *source_; }

  /// (M v)_S = sum over neighbours T of Y_{S delta T} v_T. Row-parallel with
  /// a fixed per-row summation order, so the result does not depend on the
  /// thread count, and implicit and explicit modes agree bit for bit.
  void matvec(std::span<const double> v, std::span<double> out) const;
  /// M^T v. Equal to matvec for even p.
  void matvec_transpose(std::span<const double> v, std::span<double> out) const;

  SymmetricOperator as_symmetric_operator() const;
  RectangularOperator as_rectangular_operator() const;

  /// max_S sum_T |M_{S,T}|; an upper bound on ||M|| for symmetric M.
  double max_abs_row_sum() const;

  linalg::DenseMatrix to_dense(std::uint64_t max_entries = 25'000'000) const;

  /// "row col value" per structural nonzero, values in shortest round-trip form.
  void write_triplets(std::ostream& out) const;

private:
  struct Csr {
    std::vector<std::uint64_t> offsets;
    std::vector<std::uint32_t> columns;
    std::vector<double> values;
  };

  template <class RowVisitor>
  void for_each_in_row(bool transpose, std::uint64_t row, RowVisitor&& visit) const;
  void apply(bool transpose, std::span<const double> v, std::span<double> out) const;
  Csr materialize(bool transpose) const;

  std::shared_ptr<const model::SubsetTensor> source_;
  std::uint32_t ell_ = 0;
  MatrixMode mode_ = MatrixMode::Implicit;
  std::uint64_t rows_ = 0;
  std::uint64_t cols_ = 0;
  std::uint64_t row_degree_ = 0;
  std::uint64_t col_degree_ = 0;
  std::shared_ptr<const Csr> csr_;
  std::shared_ptr<const Csr> csr_transpose_;
};

/// Entries x^S x^T M_{S,T} for a +-1 vector x (even p): the same spectrum,
/// with eigenvectors multiplied coordinatewise by x^S.
KikuchiMatrix conjugate_by_spike(const KikuchiMatrix& m, std::span<const double> x);

/// Y'_E = x^E Y_E; the tensor-level view of spike conjugation.
model::SubsetTensor gauge_transform(const model::SubsetTensor& tensor, std::span<const double> x);

}  // namespace kikuchi

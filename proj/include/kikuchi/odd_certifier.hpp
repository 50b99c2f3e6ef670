#pragma once

// Certified upper bounds on the Rademacher injective norm
//   ||Y||_pm = max over x in {+-1}^n / sqrt(n) of |<Y, x^{(x)p}>|
// of an odd-order tensor, via the Cauchy-Schwarz lift to an n^l x n^l matrix.
//
// With p = 2q + 1 and multi-indices a, b, c, d in [n]^q,
//   T~_abcd = 1{ac != bd} sum_e Y_{ace} Y_{bde},
//   M_{S,T} = sum_abcd T~_abcd / N_abcd * 1{S <-> T},
// and ||Y||_pm <= sqrt(n) + n^{l/2 - q} ||M||^{1/2}.
//
// S <-> T (for a given abcd) holds when some ordered tuple of 2q distinct
// positions carries ab in S and cd in T, or cd in S and ab in T, the values of
// abcd occur nowhere else in S or T, and S, T agree off those positions.
// N_abcd is the number of (S, T) pairs related this way, so the lift identity
//   n^l (x^{(x)l})^T M x^{(x)l} = n^{2q} <T~, x^{(x)4q}>
// holds exactly on the scaled hypercube.

#include <cstdint>
#include <span>
#include <vector>

#include "kikuchi/linear_operator.hpp"
#include "kikuchi/spectral.hpp"
#include "kikuchi/tensor_model.hpp"

namespace kikuchi::odd {

class LiftedOperator {
public:
  static constexpr std::uint64_t kDefaultDimCap = 1'000'000;

  /// Y is read as Y[a][c][e] with a, c in [n]^q. Requires odd p >= 3,
  /// 2q <= l and n^l <= dim_cap.
  LiftedOperator(const model::DenseTensor& y, std::uint32_t ell,
                 std::uint64_t dim_cap = kDefaultDimCap);

  std::uint32_t n() const { return n_; }
  std::uint32_t p() const { return 2 * q_ + 1; }
  std::uint32_t q() const { return q_; }
  std::uint32_t ell() const { return ell_; }
  /// n^l; tuples are indexed in base n, first position most significant.
  std::uint64_t dim() const { return dim_; }

  /// abcd as 4q indices: a, then b, then c, then d.
  double ttilde(std::span<const std::uint32_t> abcd) const;
  /// Closed form C(l,2q) (n - |vals|)^{l-2q} * arrangements of the column
  /// multiset {((ab)_j, (cd)_j)}, doubled unless it is swap-symmetric.
  std::uint64_t pair_count(std::span<const std::uint32_t> abcd) const;

  void matvec(std::span<const double> x, std::span<double> y) const;
  SymmetricOperator as_operator() const;
  /// max_S sum_T |M_ST|.
  double max_abs_row_sum() const;

private:
  template <class Visit>
  void for_each_entry(std::uint64_t row, std::vector<std::uint64_t>& scratch,
                      Visit&& visit) const;
  std::uint64_t flat(std::span<const std::uint32_t> digits) const;

  std::uint32_t n_;
  std::uint32_t q_;
  std::uint32_t ell_;
  std::uint64_t dim_;
  std::uint64_t half_;  // n^{2q}
  std::vector<double> ttilde_;
  std::vector<double> weight_;  // T~ / N, zero where N = 0
  std::vector<std::vector<std::uint32_t>> positions_;  // ordered distinct 2q-tuples
};

struct OddCertificate {
  double norm_estimate = 0.0;
  double residual = 0.0;
  /// The bound on ||M|| used below: min(|theta| + residual, row sum) when the
  /// solve converged, the row sum otherwise.
  double norm_upper = 0.0;
  /// sqrt(n) + n^{l/2 - q} sqrt(norm_upper).
  double bound = 0.0;
  bool converged = false;
  bool used_row_sum = false;
  std::uint64_t matvecs = 0;
};

OddCertificate certify_rademacher_norm(const model::DenseTensor& y, std::uint32_t ell,
                                       const spectral::EigOptions& opts = {},
                                       std::uint64_t dim_cap = LiftedOperator::kDefaultDimCap);

/// Exhaustive maximization over the hypercube; n <= 24.
double brute_force_rademacher_norm(const model::DenseTensor& y);

/// i.i.d. uniform +-1 entries, asymmetric.
model::DenseTensor random_rademacher_tensor(std::uint32_t n, std::uint32_t p, std::uint64_t seed);

}  // namespace kikuchi::odd

#pragma once

// Detection by thresholding the top eigenvalue of M, and recovery by
// rounding the top eigenvector (even p) or top singular pair (odd p) of M.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kikuchi/kikuchi_matrix.hpp"
#include "kikuchi/linalg.hpp"
#include "kikuchi/spectral.hpp"
#include "kikuchi/tensor_model.hpp"

namespace kikuchi {

struct DetectionReport {
  double lambda_max = 0.0;
  /// lambda * d_l / 2.
  double threshold = 0.0;
  bool planted = false;
  double residual = 0.0;
  bool converged = false;
  /// Solver budget ran out; `planted` is based on the best estimate.
  bool inconclusive = false;
  std::uint64_t matvecs = 0;
};

struct RecoveryReport {
  /// Unit vector, sign fixed so the largest-magnitude coordinate is positive.
  std::vector<double> estimate;
  /// |<estimate, truth>| / ||truth|| when the truth was supplied.
  std::optional<double> corr;
  /// Top eigenvalue of M (even p) or top singular value (odd p).
  double spectral_value = 0.0;
  double residual = 0.0;
  bool converged = false;
  /// The rounding step produced a zero vector; the estimate is 1/sqrt(n).
  bool degenerate = false;
  std::uint64_t matvecs = 0;
};

/// Builds M at level l and rejects the null when lambda_max(M) >= lambda d_l / 2.
DetectionReport detect(const model::SubsetTensor& tensor, std::uint32_t ell, double lambda,
                       const spectral::EigOptions& opts = {}, const BuildOptions& build = {});

/// V_ij = sum over S with i in S, j not in S of v_S v_{S - i + j}; V_ii = 0.
linalg::DenseMatrix voting_matrix(std::span<const double> v, std::uint32_t n, std::uint32_t ell);

/// Top eigenvector of M, then top eigenvector of its voting matrix. The
/// selection rule for M follows `opts.want`.
RecoveryReport recover_even(const model::SubsetTensor& tensor, std::uint32_t ell,
                            const spectral::EigOptions& opts = {},
                            std::span<const double> truth = {}, const BuildOptions& build = {});

/// Top singular pair (u, v = M^T u) of the rectangular M, then
/// x_i = sum over S not containing i of u_S v_{S + i}.
RecoveryReport recover_odd(const model::SubsetTensor& tensor, std::uint32_t ell,
                           const spectral::EigOptions& opts = {},
                           std::span<const double> truth = {}, const BuildOptions& build = {});

/// Dispatches on the parity of p.
RecoveryReport recover(const model::SubsetTensor& tensor, std::uint32_t ell,
                       const spectral::EigOptions& opts = {}, std::span<const double> truth = {},
                       const BuildOptions& build = {});

}  // namespace kikuchi

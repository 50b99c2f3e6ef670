#pragma once

// Leading eigenpair and singular triple of matvec-only operators.

#include <cstdint>
#include <vector>

#include "kikuchi/linear_operator.hpp"

namespace kikuchi::spectral {

enum class Want {
  /// Largest eigenvalue (signed).
  LeadingByValue,
  /// Eigenvalue of largest absolute value.
  LeadingByMagnitude,
};

struct EigOptions {
  double tol = 1e-8;
  /// Matvec budget; 0 selects max(10^4, 100 log dim).
  std::uint64_t max_iters = 0;
  std::uint64_t seed = 0x6b696b7563686921ULL;
  Want want = Want::LeadingByValue;
};

struct EigResult {
  double value = 0.0;
  std::vector<double> vector;
  /// ||A v - value v||.
  double residual = 0.0;
  /// Spectral-radius estimate used in the convergence test.
  double radius_estimate = 0.0;
  bool converged = false;
  std::uint64_t matvecs = 0;
};

struct SingularResult {
  double sigma = 0.0;
  /// Unit left singular vector.
  std::vector<double> left;
  /// A^T left, not normalized (its norm is sigma).
  std::vector<double> right;
  /// Residual of the underlying eigenproblem on A A^T.
  double residual = 0.0;
  bool converged = false;
  std::uint64_t matvecs = 0;
};

/// Leading eigenpair of a symmetric operator.
///
/// Restarted Lanczos with full reorthogonalization. Convergence means
/// ||A v - theta v|| <= tol * max(|theta|, radius_estimate). When the Krylov
/// space becomes invariant before the whole space is explored, the basis is
/// extended with a fresh seeded random direction, so a start vector that
/// happens to miss the top eigenspace cannot end the search early. On budget
/// exhaustion the best iterate is returned with converged = false; this is
/// not an exception.
EigResult leading_eig(const SymmetricOperator& op, const EigOptions& opts = {});

/// Top singular triple via the leading eigenvector of A A^T.
SingularResult leading_singular(const RectangularOperator& op, EigOptions opts = {});

std::uint64_t default_max_iters(std::size_t dim);

}  // namespace kikuchi::spectral

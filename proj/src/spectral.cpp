#include "kikuchi/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "kikuchi/error.hpp"
#include "kikuchi/linalg.hpp"
#include "kikuchi/rng.hpp"

namespace kikuchi::spectral {
namespace {

constexpr std::size_t kCycleLength = 40;

std::vector<double> random_unit(const CounterRng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.normal(i);
  linalg::scale(v, 1.0 / linalg::norm(v));
  return v;
}

// Two passes of classical Gram-Schmidt against the current basis.
void orthogonalize(std::span<double> w, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) linalg::axpy(-linalg::dot(w, q), q, w);
  }
}

std::size_t pick(const std::vector<double>& ritz, Want want) {
  // Values arrive in ascending order.
  if (want == Want::LeadingByValue) return ritz.size() - 1;
  std::size_t best = ritz.size() - 1;
  for (std::size_t i = 0; i < ritz.size(); ++i) {
    if (std::abs(ritz[i]) > std::abs(ritz[best])) best = i;
  }
  return best;
}

}  // namespace

std::uint64_t default_max_iters(std::size_t dim) {
  const double scaled = 100.0 * std::log(std::max<double>(static_cast<double>(dim), 2.0));
  return std::max<std::uint64_t>(10000, static_cast<std::uint64_t>(std::ceil(scaled)));
}

EigResult leading_eig(const SymmetricOperator& op, const EigOptions& opts) {
  const std::size_t n = op.dim;
  KIKUCHI_REQUIRE(n > 0, ParameterError, "leading_eig: empty operator");
  KIKUCHI_REQUIRE(static_cast<bool>(op.apply), ParameterError, "leading_eig: missing matvec");
  KIKUCHI_REQUIRE(opts.tol > 0.0, ParameterError, "leading_eig: tol must be positive");
  const std::uint64_t budget = opts.max_iters ? opts.max_iters : default_max_iters(n);

  const CounterRng rng(opts.seed);
  std::uint64_t fresh_index = 0;
  std::vector<double> x = random_unit(rng.derive("eig-start"), n);

  const std::size_t cycle = std::min(n, kCycleLength);
  std::vector<std::vector<double>> basis;
  basis.reserve(cycle);
  std::vector<double> alpha, beta;
  std::vector<double> w(n), y(n), ay(n);

  EigResult result;
  double radius = 0.0;

  for (;;) {
    basis.clear();
    alpha.clear();
    beta.clear();
    basis.push_back(x);
    for (;;) {
      const auto& q = basis.back();
      op.apply(q, w);
      ++result.matvecs;
      alpha.push_back(linalg::dot(w, q));
      orthogonalize(w, basis);
      if (basis.size() == cycle || result.matvecs >= budget) break;

      double scale_ref = radius;
      for (double a : alpha) scale_ref = std::max(scale_ref, std::abs(a));
      for (double b : beta) scale_ref = std::max(scale_ref, b);
      const double b = linalg::norm(w);
      if (b > 1e-12 * scale_ref && b > 0.0) {
        linalg::scale(w, 1.0 / b);
        beta.push_back(b);
        basis.push_back(w);
        continue;
      }
      // Invariant subspace reached: continue with a fresh direction.
      std::vector<double> z = random_unit(rng.derive("eig-fresh", fresh_index++), n);
      orthogonalize(z, basis);
      const double nz = linalg::norm(z);
      if (nz < 1e-8) break;  // basis already spans the space
      linalg::scale(z, 1.0 / nz);
      beta.push_back(0.0);
      basis.push_back(std::move(z));
    }

    const std::size_t k = basis.size();
    linalg::DenseMatrix t(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    const auto eig = linalg::jacobi_eigen(t);
    for (double v : eig.values) radius = std::max(radius, std::abs(v));
    const std::size_t idx = pick(eig.values, opts.want);

    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) linalg::axpy(eig.vectors(i, idx), basis[i], y);
    linalg::scale(y, 1.0 / linalg::norm(y));

    op.apply(y, ay);
    ++result.matvecs;
    const double theta = linalg::dot(y, ay);
    for (std::size_t i = 0; i < n; ++i) w[i] = ay[i] - theta * y[i];
    const double r = linalg::norm(w);
    radius = std::max(radius, std::abs(theta));

    result.value = theta;
    result.vector = y;
    result.residual = r;
    result.radius_estimate = radius;
    if (r <= opts.tol * std::max(std::abs(theta), radius)) {
      result.converged = true;
      return result;
    }
    if (result.matvecs >= budget) return result;
    x = y;
  }
}

SingularResult leading_singular(const RectangularOperator& op, EigOptions opts) {
  KIKUCHI_REQUIRE(op.rows > 0 && op.cols > 0, ParameterError, "leading_singular: empty operator");
  KIKUCHI_REQUIRE(op.apply && op.apply_transpose, ParameterError,
                  "leading_singular: both matvec directions are required");
  std::vector<double> scratch(op.cols);
  SymmetricOperator gram{op.rows, [&](std::span<const double> x, std::span<double> y) {
                           op.apply_transpose(x, scratch);
                           op.apply(scratch, y);
                         }};
  opts.want = Want::LeadingByValue;
  EigResult eig = leading_eig(gram, opts);

  SingularResult out;
  out.left = std::move(eig.vector);
  out.right.assign(op.cols, 0.0);
  op.apply_transpose(out.left, out.right);
  out.sigma = linalg::norm(out.right);
  out.residual = eig.residual;
  out.converged = eig.converged;
  out.matvecs = eig.matvecs;
  return out;
}

}  // namespace kikuchi::spectral

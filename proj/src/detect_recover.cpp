#include "kikuchi/detect_recover.hpp"

#include <cmath>

#include "kikuchi/combinat.hpp"
#include "kikuchi/error.hpp"

namespace kikuchi {
namespace {

// Unit-normalizes `x`; a zero vector becomes 1/sqrt(n) and reports true.
bool finish_estimate(std::vector<double>& x) {
  const double nrm = linalg::norm(x);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    std::fill(x.begin(), x.end(), 1.0 / std::sqrt(static_cast<double>(x.size())));
    return true;
  }
  linalg::scale(x, 1.0 / nrm);
  model::canonicalize_sign(x);
  return false;
}

void attach_truth(RecoveryReport& report, std::span<const double> truth) {
  if (truth.empty()) return;
  KIKUCHI_REQUIRE(truth.size() == report.estimate.size(), ParameterError,
                  "truth vector has the wrong length");
  report.corr = model::correlation(report.estimate, truth);
}

}  // namespace

DetectionReport detect(const model::SubsetTensor& tensor, std::uint32_t ell, double lambda,
                       const spectral::EigOptions& opts, const BuildOptions& build) {
  KIKUCHI_REQUIRE(tensor.p % 2 == 0, ParameterError, "detection needs an even order p");
  KIKUCHI_REQUIRE(lambda > 0.0 && std::isfinite(lambda), ParameterError,
                  "tested signal strength must be positive");
  const auto m = KikuchiMatrix::build(tensor, ell, build);
  spectral::EigOptions o = opts;
  o.want = spectral::Want::LeadingByValue;
  const auto eig = spectral::leading_eig(m.as_symmetric_operator(), o);

  DetectionReport r;
  r.lambda_max = eig.value;
  r.threshold = lambda * static_cast<double>(m.row_degree()) / 2.0;
  r.planted = r.lambda_max >= r.threshold;
  r.residual = eig.residual;
  r.converged = eig.converged;
  r.inconclusive = !eig.converged;
  r.matvecs = eig.matvecs;
  return r;
}

linalg::DenseMatrix voting_matrix(std::span<const double> v, std::uint32_t n, std::uint32_t ell) {
  const combinat::SubsetIndexer index(n, ell);
  KIKUCHI_REQUIRE(v.size() == index.size(), ParameterError, "voting matrix: dimension mismatch");
  linalg::DenseMatrix out(n, n);
  std::vector<std::uint32_t> s(ell);
  std::vector<char> member(n);
  for (std::uint64_t r = 0; r < index.size(); ++r) {
    if (v[r] == 0.0) continue;
    index.unrank_into(r, s);
    std::fill(member.begin(), member.end(), 0);
    for (std::uint32_t e : s) member[e] = 1;
    for (combinat::ExchangeEnumerator it(n, s, 1, 1); it.next();) {
      const auto d = it.difference();
      const std::uint32_t i = member[d[0]] ? d[0] : d[1];
      const std::uint32_t j = member[d[0]] ? d[1] : d[0];
      out(i, j) += v[r] * v[index.rank_unchecked(it.target())];
    }
  }
  return out;
}

RecoveryReport recover_even(const model::SubsetTensor& tensor, std::uint32_t ell,
                            const spectral::EigOptions& opts, std::span<const double> truth,
                            const BuildOptions& build) {
  KIKUCHI_REQUIRE(tensor.p % 2 == 0, ParameterError, "recover_even needs an even order p");
  const auto m = KikuchiMatrix::build(tensor, ell, build);
  const auto top = spectral::leading_eig(m.as_symmetric_operator(), opts);
  const auto votes = voting_matrix(top.vector, tensor.n, ell);

  RecoveryReport r;
  r.spectral_value = top.value;
  r.residual = top.residual;
  r.converged = top.converged;
  r.matvecs = top.matvecs;
  if (votes.frobenius_norm() == 0.0) {
    r.estimate.assign(tensor.n, 0.0);
  } else {
    spectral::EigOptions vo = opts;
    vo.want = spectral::Want::LeadingByValue;
    const SymmetricOperator vop{tensor.n, [&votes](std::span<const double> x, std::span<double> y) {
                                  votes.multiply(x, y);
                                }};
    auto xe = spectral::leading_eig(vop, vo);
    r.estimate = std::move(xe.vector);
    r.converged = r.converged && xe.converged;
    r.matvecs += xe.matvecs;
  }
  r.degenerate = finish_estimate(r.estimate);
  attach_truth(r, truth);
  return r;
}

RecoveryReport recover_odd(const model::SubsetTensor& tensor, std::uint32_t ell,
                           const spectral::EigOptions& opts, std::span<const double> truth,
                           const BuildOptions& build) {
  KIKUCHI_REQUIRE(tensor.p % 2 == 1, ParameterError, "recover_odd needs an odd order p");
  const auto m = KikuchiMatrix::build(tensor, ell, build);
  const auto sv = spectral::leading_singular(m.as_rectangular_operator(), opts);

  const std::uint32_t n = tensor.n;
  const combinat::SubsetIndexer rows(n, ell), cols(n, ell + 1);
  RecoveryReport r;
  r.estimate.assign(n, 0.0);
  std::vector<std::uint32_t> s(ell);
  for (std::uint64_t k = 0; k < rows.size(); ++k) {
    if (sv.left[k] == 0.0) continue;
    rows.unrank_into(k, s);
    for (combinat::ExchangeEnumerator it(n, s, 0, 1); it.next();) {
      r.estimate[it.difference()[0]] += sv.left[k] * sv.right[cols.rank_unchecked(it.target())];
    }
  }
  r.spectral_value = sv.sigma;
  r.residual = sv.residual;
  r.converged = sv.converged;
  r.matvecs = sv.matvecs;
  r.degenerate = finish_estimate(r.estimate);
  attach_truth(r, truth);
  return r;
}

RecoveryReport recover(const model::SubsetTensor& tensor, std::uint32_t ell,
                       const spectral::EigOptions& opts, std::span<const double> truth,
                       const BuildOptions& build) {
  return tensor.p % 2 == 0 ? recover_even(tensor, ell, opts, truth, build)
                           : recover_odd(tensor, ell, opts, truth, build);
}

}  // namespace kikuchi

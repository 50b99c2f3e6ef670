#include "kikuchi/johnson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kikuchi/combinat.hpp"
#include "kikuchi/error.hpp"
#include "kikuchi/kikuchi_matrix.hpp"

namespace kikuchi::johnson {
namespace {

__extension__ using i128 = __int128;

void check_params(std::uint32_t n, std::uint32_t ell, std::uint32_t p) {
  KIKUCHI_REQUIRE(p >= 2 && p % 2 == 0, ParameterError, "Johnson spectrum needs even p >= 2");
  KIKUCHI_REQUIRE(p <= n && ell >= p / 2 && ell + p / 2 <= n, ParameterError,
                  "level outside [p/2, n - p/2]");
}

i128 checked_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("Eberlein term overflows 128 bits");
  return r;
}

i128 b(int n, int k) { return static_cast<i128>(combinat::binom(n, k)); }

i128 ipow(i128 base, std::uint32_t e) {
  i128 r = 1;
  for (std::uint32_t i = 0; i < e; ++i) r = checked_mul(r, base);
  return r;
}

}  // namespace

std::int64_t eberlein(std::uint32_t n, std::uint32_t ell, std::uint32_t p, std::uint32_t m) {
  check_params(n, ell, p);
  KIKUCHI_REQUIRE(m <= std::min(ell, n - ell), ParameterError,
                  "eigenspace index m = " + std::to_string(m) + " exceeds min(l, n-l)");
  const int h = static_cast<int>(p / 2);
  const int mi = static_cast<int>(m), li = static_cast<int>(ell), ni = static_cast<int>(n);
  i128 total = 0;
  for (int s = 0; s <= std::min(mi, h); ++s) {
    i128 term = checked_mul(checked_mul(b(mi, s), b(li - mi, h - s)), b(ni - li - mi, h - s));
    total += (s % 2 == 0) ? term : -term;
  }
  if (total > std::numeric_limits<std::int64_t>::max() ||
      total < std::numeric_limits<std::int64_t>::min()) {
    throw CapacityError("Eberlein value does not fit in 64 bits");
  }
  return static_cast<std::int64_t>(total);
}

std::uint64_t eigenspace_dim(std::uint32_t n, std::uint32_t m) {
  KIKUCHI_REQUIRE(2 * m <= n, ParameterError, "eigenspace index exceeds n/2");
  return combinat::binom(static_cast<int>(n), static_cast<int>(m)) -
         (m == 0 ? 0 : combinat::binom(static_cast<int>(n), static_cast<int>(m) - 1));
}

JohnsonSpectrum spectrum(std::uint32_t n, std::uint32_t ell, std::uint32_t p) {
  check_params(n, ell, p);
  JohnsonSpectrum out{n, ell, p, {}, {}};
  for (std::uint32_t m = 0; m <= std::min(ell, n - ell); ++m) {
    out.eigenvalues.push_back(eberlein(n, ell, p, m));
    out.dims.push_back(eigenspace_dim(n, m));
  }
  return out;
}

bool decay_bound_holds(std::uint32_t n, std::uint32_t ell, std::uint32_t p, std::uint32_t m) {
  const i128 mu0 = eberlein(n, ell, p, 0);
  i128 mu = eberlein(n, ell, p, m);
  if (mu < 0) mu = -mu;
  // |mu| / mu0 <= ((l-m)/l)^{p/2}  or  |mu| / mu0 <= p/n
  if (checked_mul(mu, ipow(ell, p / 2)) <= checked_mul(mu0, ipow(ell - m, p / 2))) return true;
  return checked_mul(mu, n) <= checked_mul(mu0, p);
}

void PhiSequence::validate(std::uint32_t n) const {
  std::vector<bool> seen(n, false);
  for (const auto& [a, b] : pairs) {
    for (std::uint32_t i : {a, b}) {
      KIKUCHI_REQUIRE(i < n, ParameterError, "phi index out of range");
      KIKUCHI_REQUIRE(!seen[i], ParameterError, "phi indices must be distinct");
      seen[i] = true;
    }
  }
}

std::vector<double> phi_vector(std::uint32_t n, std::uint32_t ell, const PhiSequence& phi) {
  phi.validate(n);
  KIKUCHI_REQUIRE(phi.order() <= ell, ParameterError, "phi longer than l pairs");
  const combinat::SubsetIndexer index(n, ell);
  std::vector<double> out(index.size());
  std::vector<std::uint32_t> s(ell);
  std::vector<char> member(n);
  for (std::uint64_t r = 0; r < index.size(); ++r) {
    index.unrank_into(r, s);
    std::fill(member.begin(), member.end(), 0);
    for (std::uint32_t i : s) member[i] = 1;
    double v = 1.0;
    for (const auto& [a, b] : phi.pairs) v *= member[a] - member[b];
    out[r] = v;
  }
  return out;
}

linalg::DenseMatrix adjacency_dense(std::uint32_t n, std::uint32_t ell, std::uint32_t p,
                                    std::size_t max_dim) {
  check_params(n, ell, p);
  const std::uint64_t dim = combinat::binom(static_cast<int>(n), static_cast<int>(ell));
  if (dim > max_dim) throw CapacityError("dense Johnson adjacency above the size cap");
  auto ones = model::SubsetTensor::zeros(n, p);
  std::fill(ones.entries.begin(), ones.entries.end(), 1.0);
  return KikuchiMatrix::build(ones, ell).to_dense(dim * dim);
}

EigenspaceProjector::EigenspaceProjector(std::uint32_t n, std::uint32_t ell, std::size_t max_dim)
    : n_(n), ell_(ell) {
  KIKUCHI_REQUIRE(ell >= 1 && ell < n, ParameterError, "projector needs 1 <= l < n");
  auto eig = linalg::jacobi_eigen(adjacency_dense(n, ell, 2, max_dim), max_dim);
  basis_ = std::move(eig.vectors);
  const std::uint32_t top = std::min(ell, n - ell);
  labels_.resize(eig.values.size());
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    std::uint32_t best = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (std::uint32_t s = 0; s <= top; ++s) {
      const double mu = double(ell - s) * double(n - ell - s) - double(s);
      if (std::abs(eig.values[k] - mu) < gap) {
        gap = std::abs(eig.values[k] - mu);
        best = s;
      }
    }
    labels_[k] = best;
  }
}

std::pair<std::vector<double>, std::vector<double>> EigenspaceProjector::project(
    std::span<const double> v, std::uint32_t m) const {
  const std::size_t d = dim();
  KIKUCHI_REQUIRE(v.size() == d, ParameterError, "projection: dimension mismatch");
  std::vector<double> low(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    if (labels_[k] > m) continue;
    double c = 0.0;
    for (std::size_t i = 0; i < d; ++i) c += basis_(i, k) * v[i];
    for (std::size_t i = 0; i < d; ++i) low[i] += c * basis_(i, k);
  }
  std::vector<double> perp(d);
  for (std::size_t i = 0; i < d; ++i) perp[i] = v[i] - low[i];
  return {std::move(low), std::move(perp)};
}

std::pair<std::vector<double>, std::vector<double>> project_onto_low_eigenspaces(
    std::span<const double> v, std::uint32_t n, std::uint32_t ell, std::uint32_t m) {
  return EigenspaceProjector(n, ell).project(v, m);
}

double influence(std::span<const double> v, std::uint32_t n, std::uint32_t ell) {
  const combinat::SubsetIndexer index(n, ell);
  KIKUCHI_REQUIRE(v.size() == index.size(), ParameterError, "influence: dimension mismatch");
  // Each unordered {i, j} moves S only when exactly one of i, j lies in S, so
  // summing over (i in S, j not in S) visits every moving pair once.
  std::vector<std::uint32_t> s(ell);
  double total = 0.0;
  for (std::uint64_t r = 0; r < index.size(); ++r) {
    index.unrank_into(r, s);
    for (combinat::ExchangeEnumerator it(n, s, 1, 1); it.next();) {
      const double diff = v[index.rank_unchecked(it.target())] - v[r];
      total += 0.5 * diff * diff;
    }
  }
  return total / (static_cast<double>(n) * static_cast<double>(index.size()));
}

double slice_variance(std::span<const double> v) {
  KIKUCHI_REQUIRE(!v.empty(), ParameterError, "variance of an empty vector");
  double mean = 0.0, sq = 0.0;
  for (double x : v) {
    mean += x;
    sq += x * x;
  }
  mean /= static_cast<double>(v.size());
  return sq / static_cast<double>(v.size()) - mean * mean;
}

}  // namespace kikuchi::johnson

#pragma once

// Spectrum of the Johnson-scheme graph J_{n,l,p}: the symmetric-difference
// matrix X of the all-ones order-p tensor. Exact eigenvalues, eigenspace
// dimensions, explicit eigenvectors u^phi, and the slice Fourier quantities
// used by the recovery analysis. Everything beyond `eberlein` and `spectrum`
// is sized for tests.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kikuchi/linalg.hpp"

namespace kikuchi::johnson {

/// mu_m = sum_s (-1)^s C(m,s) C(l-m, p/2-s) C(n-l-m, p/2-s), computed in
/// 128-bit integers. Requires even p, p/2 <= l <= n - p/2 and
/// 0 <= m <= min(l, n-l). Throws CapacityError if the result leaves int64.
std::int64_t eberlein(std::uint32_t n, std::uint32_t ell, std::uint32_t p, std::uint32_t m);

/// dim Y_m = C(n,m) - C(n,m-1).
std::uint64_t eigenspace_dim(std::uint32_t n, std::uint32_t m);

struct JohnsonSpectrum {
  std::uint32_t n = 0;
  std::uint32_t ell = 0;
  std::uint32_t p = 0;
  /// mu_0 ... mu_{min(l, n-l)}.
  std::vector<std::int64_t> eigenvalues;
  std::vector<std::uint64_t> dims;
};

JohnsonSpectrum spectrum(std::uint32_t n, std::uint32_t ell, std::uint32_t p);

/// |mu_m| / mu_0 <= max{(1 - m/l)^{p/2}, p/n}, decided in exact integers.
bool decay_bound_holds(std::uint32_t n, std::uint32_t ell, std::uint32_t p, std::uint32_t m);

/// Pairs (a_1, b_1), ..., (a_m, b_m) of 2m distinct indices.
struct PhiSequence {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;

  std::uint32_t order() const { return static_cast<std::uint32_t>(pairs.size()); }
  /// Throws ParameterError on repeated or out-of-range indices.
  void validate(std::uint32_t n) const;
};

/// u^phi_S = prod_i (1{a_i in S} - 1{b_i in S}), indexed by colex rank.
std::vector<double> phi_vector(std::uint32_t n, std::uint32_t ell, const PhiSequence& phi);

/// Dense X for J_{n,l,p}; CapacityError above `max_dim` rows.
linalg::DenseMatrix adjacency_dense(std::uint32_t n, std::uint32_t ell, std::uint32_t p,
                                    std::size_t max_dim = 5000);

/// Orthogonal projections onto sum_{s <= m} Y_s.
///
/// The eigenspaces Y_s are shared by every J_{n,l,p}; they are read off the
/// p = 2 graph, whose eigenvalues (l-s)(n-l-s) - s are pairwise distinct.
class EigenspaceProjector {
public:
  EigenspaceProjector(std::uint32_t n, std::uint32_t ell, std::size_t max_dim = 5000);

  std::uint32_t n() const { return n_; }
  std::uint32_t ell() const { return ell_; }
  std::size_t dim() const { return labels_.size(); }

  /// (v_low, v_perp) with v_low in sum_{s <= m} Y_s and v = v_low + v_perp.
  std::pair<std::vector<double>, std::vector<double>> project(std::span<const double> v,
                                                              std::uint32_t m) const;

private:
  std::uint32_t n_;
  std::uint32_t ell_;
  linalg::DenseMatrix basis_;         // eigenvectors as columns
  std::vector<std::uint32_t> labels_;  // eigenspace index s of each column
};

std::pair<std::vector<double>, std::vector<double>> project_onto_low_eigenspaces(
    std::span<const double> v, std::uint32_t n, std::uint32_t ell, std::uint32_t m);

/// (1/n) sum_{i<j} (1/2) E_S[(v_{tau_ij S} - v_S)^2], tau_ij exchanging i and j.
double influence(std::span<const double> v, std::uint32_t n, std::uint32_t ell);

/// E[v^2] - E[v]^2 under the uniform average over coordinates.
double slice_variance(std::span<const double> v);

}  // namespace kikuchi::johnson

#pragma once

// Slow, independent reference implementations used only by tests. Subsets
// are bitmasks here; colex order on subsets is numeric order on masks, so a
// subset's rank is its position among masks of the same popcount.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

using Mask = std::uint64_t;
using Matrix = std::vector<std::vector<double>>;

inline int popcount(Mask m) { return __builtin_popcountll(m); }

inline std::vector<Mask> masks_of_size(int n, int ell) {
  std::vector<Mask> out;
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    if (popcount(m) == ell) out.push_back(m);
  }
  return out;
}

inline std::size_t rank_of(const std::vector<Mask>& sorted, Mask m) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), m) - sorted.begin());
}

inline std::vector<std::uint32_t> elements(Mask m) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; m; ++i, m >>= 1) {
    if (m & 1) out.push_back(i);
  }
  return out;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

/// Dense symmetric-difference matrix with rows of size `row_size` and
/// columns of size `col_size`; `entry` maps the difference mask to Y_E.
inline Matrix sym_diff_matrix(int n, int row_size, int col_size, int p,
                              const std::function<double(Mask)>& entry) {
  const auto rows = masks_of_size(n, row_size);
  const auto cols = masks_of_size(n, col_size);
  Matrix m(rows.size(), std::vector<double>(cols.size(), 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const Mask d = rows[i] ^ cols[j];
      if (popcount(d) == p) m[i][j] = entry(d);
    }
  }
  return m;
}

/// Eigenvalues only (ascending), by cyclic Jacobi sweeps; for sizes where
/// pivot search would dominate.
inline std::vector<double> cyclic_eigenvalues(Matrix a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a[i][j] * a[i][j];
        if (i != j) off += a[i][j] * a[i][j];
      }
    if (off <= 1e-30 * std::max(total, 1e-300)) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = a[i][i];
  std::sort(vals.begin(), vals.end());
  return vals;
}

/// Eigenvalues (ascending) and eigenvectors (columns) by classical Jacobi
/// with largest-off-diagonal pivoting.
inline std::pair<std::vector<double>, Matrix> symmetric_eigen(Matrix a) {
  const std::size_t n = a.size();
  Matrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int iter = 0; iter < 100000; ++iter) {
    std::size_t p = 0, q = 1;
    double big = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(a[i][j]) > big) big = std::abs(a[i][j]), p = i, q = j;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i][i]));
    if (n < 2 || big <= 1e-15 * std::max(scale, 1.0)) break;
    const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
    const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
    for (std::size_t k = 0; k < n; ++k) {
      const double akp = a[k][p], akq = a[k][q];
      a[k][p] = c * akp - s * akq;
      a[k][q] = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double apk = a[p][k], aqk = a[q][k];
      a[p][k] = c * apk - s * aqk;
      a[q][k] = s * apk + c * aqk;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double vkp = v[k][p], vkq = v[k][q];
      v[k][p] = c * vkp - s * vkq;
      v[k][q] = s * vkp + c * vkq;
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] < a[y][y]; });
  std::vector<double> vals(n);
  Matrix vecs(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    vals[k] = a[order[k]][order[k]];
    for (std::size_t i = 0; i < n; ++i) vecs[i][k] = v[i][order[k]];
  }
  return {vals, vecs};
}

/// Singular values (descending) by one-sided Jacobi on the columns.
inline std::vector<double> singular_values(Matrix a) {
  const std::size_t m = a.size(), n = a.empty() ? 0 : a[0].size();
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = 0, beta = 0, gamma = 0;
        for (std::size_t k = 0; k < m; ++k) {
          alpha += a[k][i] * a[k][i];
          beta += a[k][j] * a[k][j];
          gamma += a[k][i] * a[k][j];
        }
        if (gamma == 0.0) continue;
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const double x = a[k][i], y = a[k][j];
          a[k][i] = c * x - s * y;
          a[k][j] = s * x + c * y;
        }
      }
    }
    if (off < 1e-15) break;
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0;
    for (std::size_t k = 0; k < m; ++k) s += a[k][j] * a[k][j];
    out[j] = std::sqrt(s);
  }
  std::sort(out.rbegin(), out.rend());
  return out;
}

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

/// V_ij = (1/2) sum_{S,T} v_S v_T 1{S delta T = {i,j}}.
inline Matrix voting(const std::vector<double>& v, int n, int ell) {
  const auto masks = masks_of_size(n, ell);
  Matrix out(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < masks.size(); ++a) {
    for (std::size_t b = 0; b < masks.size(); ++b) {
      const Mask d = masks[a] ^ masks[b];
      if (popcount(d) != 2) continue;
      const auto ij = elements(d);
      out[ij[0]][ij[1]] += 0.5 * v[a] * v[b];
      out[ij[1]][ij[0]] += 0.5 * v[a] * v[b];
    }
  }
  return out;
}

/// max over x in {+-1}^n of the number of satisfied clauses.
inline std::uint64_t xor_max_satisfied(int n, const std::vector<std::vector<std::uint32_t>>& vars,
                                       const std::vector<int>& rhs) {
  std::uint64_t best = 0;
  for (Mask x = 0; x < (Mask{1} << n); ++x) {
    std::uint64_t sat = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      int prod = 1;
      for (auto v : vars[i]) prod *= (x >> v) & 1 ? -1 : 1;
      sat += prod == rhs[i];
    }
    best = std::max(best, sat);
  }
  return best;
}

/// <Y, x^{(x)p}> by a direct sum over all n^p index tuples.
inline double full_contraction(const std::vector<double>& y, int n, int p, const std::vector<double>& x) {
  double total = 0.0;
  std::vector<int> idx(p, 0);
  for (std::size_t flat = 0; flat < y.size(); ++flat) {
    std::size_t r = flat;
    double prod = 1.0;
    for (int k = p - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(r % n);
      r /= n;
    }
    for (int k = 0; k < p; ++k) prod *= x[idx[k]];
    total += y[flat] * prod;
  }
  return total;
}

}  // namespace oracle

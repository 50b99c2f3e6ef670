#pragma once

// Colexicographic indexing of l-subsets of [n] = {0, ..., n-1}, binomial
// arithmetic, and enumeration of subsets at a fixed symmetric difference.
// Every matrix in the library is addressed through these ranks.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace kikuchi::combinat {

/// Elements in strictly increasing order.
using Subset = std::vector<std::uint32_t>;

/// Largest ground-set size covered by the precomputed binomial triangle.
inline constexpr int kMaxN = 256;

/// C(n, k) from the precomputed triangle. Returns 0 when k < 0, n < 0 or
/// k > n. Throws CapacityError if n > kMaxN or the value does not fit in 64
/// bits.
std::uint64_t binom(int n, int k);

/// True when C(n, k) is representable (n <= kMaxN and no 64-bit overflow).
bool binom_fits(int n, int k);

/// Checks that `s` is a valid l-subset of [n]; throws InvalidSubsetError.
void validate_subset(std::uint32_t n, std::size_t ell, std::span<const std::uint32_t> s);

class SubsetIndexer {
public:
  /// Throws ParameterError if ell > n or n == 0, CapacityError if C(n, ell)
  /// is not representable.
  SubsetIndexer(std::uint32_t n, std::uint32_t ell);

  std::uint32_t n() const { return n_; }
  std::uint32_t ell() const { return ell_; }
  /// C(n, ell).
  std::uint64_t size() const { return size_; }

  /// Colex rank sum_i C(s_i, i + 1). Validates the subset.
  std::uint64_t rank(std::span<const std::uint32_t> s) const;
  /// Same, without validation; for hot loops over subsets already known good.
  std::uint64_t rank_unchecked(std::span<const std::uint32_t> s) const;

  Subset unrank(std::uint64_t r) const;
  void unrank_into(std::uint64_t r, std::span<std::uint32_t> out) const;

private:
  std::uint32_t n_;
  std::uint32_t ell_;
  std::uint64_t size_;
};

/// Lazily enumerates every T obtained from S by removing `drop` elements of S
/// and inserting `add` elements of [n] \ S, together with E = S delta T.
///
///   for (ExchangeEnumerator it(n, s, 2, 2); it.next();) use(it.target(), it.difference());
///
/// The enumerator owns copies of its scratch buffers; `s` must outlive it.
class ExchangeEnumerator {
public:
  ExchangeEnumerator(std::uint32_t n, std::span<const std::uint32_t> s, std::uint32_t drop,
                     std::uint32_t add);

  /// Advances to the next exchange. Returns false once exhausted.
  bool next();

  std::span<const std::uint32_t> target() const { return target_; }
  std::span<const std::uint32_t> difference() const { return difference_; }

private:
  void materialize();

  std::span<const std::uint32_t> s_;
  std::vector<std::uint32_t> complement_;
  std::vector<std::uint32_t> drop_pos_;
  std::vector<std::uint32_t> add_pos_;
  std::vector<std::uint32_t> target_;
  std::vector<std::uint32_t> difference_;
  bool started_ = false;
  bool done_ = false;
};

/// Row degree C(n - l, p/2) * C(l, p/2) of the order-l symmetric-difference
/// matrix. Requires even p with p/2 <= min(l, n - l).
std::uint64_t d_ell(std::uint32_t n, std::uint32_t ell, std::uint32_t p);

/// All (T, S delta T) with |S delta T| = p, in enumeration order.
std::vector<std::pair<Subset, Subset>> neighbors(const SubsetIndexer& indexer,
                                                 std::span<const std::uint32_t> s,
                                                 std::uint32_t p);

}  // namespace kikuchi::combinat

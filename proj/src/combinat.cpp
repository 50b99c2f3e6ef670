#include "kikuchi/combinat.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include "kikuchi/error.hpp"

namespace kikuchi::combinat {
namespace {

constexpr std::uint64_t kOverflow = std::numeric_limits<std::uint64_t>::max();

struct BinomialTriangle {
  std::array<std::array<std::uint64_t, kMaxN + 1>, kMaxN + 1> c{};

  BinomialTriangle() {
    for (int n = 0; n <= kMaxN; ++n) {
      c[n][0] = 1;
      for (int k = 1; k <= n; ++k) {
        const std::uint64_t a = c[n - 1][k - 1];
        const std::uint64_t b = k <= n - 1 ? c[n - 1][k] : 0;
        std::uint64_t sum = 0;
        if (a == kOverflow || b == kOverflow || __builtin_add_overflow(a, b, &sum)) {
          c[n][k] = kOverflow;
        } else {
          c[n][k] = sum;
        }
      }
    }
  }
};

const BinomialTriangle& triangle() {
  static const BinomialTriangle t;
  return t;
}

}  // namespace

std::uint64_t binom(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (n > kMaxN) {
    throw CapacityError("binomial C(" + std::to_string(n) + ", " + std::to_string(k) +
                        ") exceeds the precomputed range n <= " + std::to_string(kMaxN));
  }
  const std::uint64_t v = triangle().c[n][k];
  if (v == kOverflow) {
    throw CapacityError("binomial C(" + std::to_string(n) + ", " + std::to_string(k) +
                        ") overflows 64 bits");
  }
  return v;
}

bool binom_fits(int n, int k) {
  if (n < 0 || k < 0 || k > n) return true;
  return n <= kMaxN && triangle().c[n][k] != kOverflow;
}

void validate_subset(std::uint32_t n, std::size_t ell, std::span<const std::uint32_t> s) {
  if (s.size() != ell) {
    throw InvalidSubsetError("subset has " + std::to_string(s.size()) + " elements, expected " +
                             std::to_string(ell));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= n) {
      throw InvalidSubsetError("subset element " + std::to_string(s[i]) + " is outside [0, " +
                               std::to_string(n) + ")");
    }
    if (i > 0 && s[i] <= s[i - 1]) {
      throw InvalidSubsetError("subset elements must be strictly increasing");
    }
  }
}

SubsetIndexer::SubsetIndexer(std::uint32_t n, std::uint32_t ell) : n_(n), ell_(ell) {
  KIKUCHI_REQUIRE(n > 0, ParameterError, "ground set must be nonempty");
  KIKUCHI_REQUIRE(ell <= n, ParameterError,
                  "subset size " + std::to_string(ell) + " exceeds n = " + std::to_string(n));
  size_ = binom(static_cast<int>(n), static_cast<int>(ell));
}

std::uint64_t SubsetIndexer::rank(std::span<const std::uint32_t> s) const {
  validate_subset(n_, ell_, s);
  return rank_unchecked(s);
}

std::uint64_t SubsetIndexer::rank_unchecked(std::span<const std::uint32_t> s) const {
  const auto& c = triangle().c;
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::uint32_t e = s[i];
    if (e >= i + 1) r += c[e][i + 1];
  }
  return r;
}

Subset SubsetIndexer::unrank(std::uint64_t r) const {
  Subset out(ell_);
  unrank_into(r, out);
  return out;
}

void SubsetIndexer::unrank_into(std::uint64_t r, std::span<std::uint32_t> out) const {
  if (r >= size_) {
    throw IndexError("rank " + std::to_string(r) + " outside [0, " + std::to_string(size_) + ")");
  }
  KIKUCHI_REQUIRE(out.size() == ell_, ParameterError, "output span has the wrong length");
  const auto& c = triangle().c;
  std::int64_t candidate = static_cast<std::int64_t>(n_) - 1;
  for (std::int64_t i = ell_; i >= 1; --i) {
    // Largest e with C(e, i) <= r; e >= i - 1 always qualifies since C(i-1, i) = 0.
    while (candidate >= i && c[candidate][i] > r) --candidate;
    std::uint64_t value = candidate >= i ? c[candidate][i] : 0;
    if (candidate < i) candidate = i - 1;
    out[i - 1] = static_cast<std::uint32_t>(candidate);
    r -= value;
    --candidate;
  }
}

ExchangeEnumerator::ExchangeEnumerator(std::uint32_t n, std::span<const std::uint32_t> s,
                                       std::uint32_t drop, std::uint32_t add)
    : s_(s), drop_pos_(drop), add_pos_(add) {
  KIKUCHI_REQUIRE(drop <= s.size(), ParameterError, "cannot drop more elements than |S|");
  complement_.reserve(n - s.size());
  std::size_t j = 0;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (j < s.size() && s[j] == v) {
      ++j;
    } else {
      complement_.push_back(v);
    }
  }
  KIKUCHI_REQUIRE(add <= complement_.size(), ParameterError,
                  "cannot add more elements than |[n] \\ S|");
  target_.resize(s.size() - drop + add);
  difference_.resize(drop + add);
}

namespace {

// Advances a k-combination of {0..m-1} held in `pos`; false when it wraps.
bool next_combination(std::vector<std::uint32_t>& pos, std::uint32_t m) {
  const std::size_t k = pos.size();
  for (std::size_t i = k; i-- > 0;) {
    if (pos[i] < m - k + i) {
      ++pos[i];
      for (std::size_t j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

bool ExchangeEnumerator::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    for (std::uint32_t i = 0; i < drop_pos_.size(); ++i) drop_pos_[i] = i;
    for (std::uint32_t i = 0; i < add_pos_.size(); ++i) add_pos_[i] = i;
  } else if (!next_combination(add_pos_, static_cast<std::uint32_t>(complement_.size()))) {
    if (!next_combination(drop_pos_, static_cast<std::uint32_t>(s_.size()))) {
      done_ = true;
      return false;
    }
    for (std::uint32_t i = 0; i < add_pos_.size(); ++i) add_pos_[i] = i;
  }
  materialize();
  return true;
}

void ExchangeEnumerator::materialize() {
  // T = (S \ D) u A and E = D u A, both as sorted merges.
  std::size_t di = 0, ai = 0, ti = 0, ei = 0;
  const std::size_t nd = drop_pos_.size(), na = add_pos_.size();
  std::size_t si = 0;
  while (si < s_.size() || ai < na) {
    const bool take_s =
        ai >= na || (si < s_.size() && s_[si] < complement_[add_pos_[ai]]);
    if (take_s) {
      if (di < nd && drop_pos_[di] == si) {
        difference_[ei++] = s_[si];
        ++di;
      } else {
        target_[ti++] = s_[si];
      }
      ++si;
    } else {
      const std::uint32_t v = complement_[add_pos_[ai++]];
      target_[ti++] = v;
      difference_[ei++] = v;
    }
  }
}

std::uint64_t d_ell(std::uint32_t n, std::uint32_t ell, std::uint32_t p) {
  KIKUCHI_REQUIRE(p % 2 == 0, ParameterError, "d_ell needs an even order p");
  KIKUCHI_REQUIRE(ell <= n, ParameterError, "level exceeds n");
  const std::uint32_t h = p / 2;
  KIKUCHI_REQUIRE(h <= ell && h <= n - ell, ParameterError,
                  "d_ell needs p/2 <= min(l, n - l)");
  const std::uint64_t a = binom(static_cast<int>(n - ell), static_cast<int>(h));
  const std::uint64_t b = binom(static_cast<int>(ell), static_cast<int>(h));
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw CapacityError("d_ell overflows 64 bits");
  return out;
}

std::vector<std::pair<Subset, Subset>> neighbors(const SubsetIndexer& indexer,
                                                 std::span<const std::uint32_t> s,
                                                 std::uint32_t p) {
  validate_subset(indexer.n(), indexer.ell(), s);
  KIKUCHI_REQUIRE(p % 2 == 0, ParameterError, "neighbors needs an even p");
  const std::uint32_t h = p / 2;
  KIKUCHI_REQUIRE(h <= indexer.ell() && h <= indexer.n() - indexer.ell(), ParameterError,
                  "neighbors needs p/2 <= min(l, n - l)");
  std::vector<std::pair<Subset, Subset>> out;
  for (ExchangeEnumerator it(indexer.n(), s, h, h); it.next();) {
    out.emplace_back(Subset(it.target().begin(), it.target().end()),
                     Subset(it.difference().begin(), it.difference().end()));
  }
  return out;
}

}  // namespace kikuchi::combinat

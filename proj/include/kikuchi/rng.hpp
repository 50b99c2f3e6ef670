#pragma once

#include <cstdint>
#include <string_view>

namespace kikuchi {

/// Counter-based random stream.
///
/// Every draw is a pure function of (key, counter), so entries of a tensor or
/// a trial in a sweep can be generated in any order, on any thread, and still
/// reproduce bit-for-bit. Streams for different purposes are separated by
/// deriving a new key from (parent key, tag, index).
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  /// Child stream for a named component, optionally indexed (trial, cell...).
  CounterRng derive(std::string_view tag, std::uint64_t index = 0) const;

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal via Box-Muller; counters 2k and 2k+1 share one pair of
  /// uniforms (cosine and sine branches).
  double normal(std::uint64_t counter) const;
  /// +1 or -1 with equal probability.
  int sign(std::uint64_t counter) const;
  /// Uniform integer in [0, bound). Rejection-free multiply-shift; the bias is
  /// below 2^-64 * bound and irrelevant at the sizes used here.
  std::uint64_t below(std::uint64_t counter, std::uint64_t bound) const;

private:
  std::uint64_t key_;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);
std::uint64_t hash_string(std::string_view s);

}  // namespace kikuchi

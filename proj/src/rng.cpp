#include "kikuchi/rng.hpp"

#include <cmath>
#include <numbers>

namespace kikuchi {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ (mix64(value) + 0x632be59bd9b4e019ULL + (seed << 6) + (seed >> 2)));
}

std::uint64_t hash_string(std::string_view s) {
  // FNV-1a, then mixed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

CounterRng CounterRng::derive(std::string_view tag, std::uint64_t index) const {
  return CounterRng(hash_combine(hash_combine(key_, hash_string(tag)), index));
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix64(mix64(key_ ^ 0xd1b54a32d192ed03ULL) + counter * 0x9e3779b97f4a7c15ULL);
}

double CounterRng::uniform(std::uint64_t counter) const {
  // 53 random bits mapped to the midpoints of a 2^-53 grid: never 0 or 1.
  const std::uint64_t b = bits(counter) >> 11;
  return (static_cast<double>(b) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
  const std::uint64_t pair = counter >> 1;
  const double u1 = uniform(2 * pair);
  const double u2 = uniform(2 * pair + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (counter & 1U) ? r * std::sin(angle) : r * std::cos(angle);
}

int CounterRng::sign(std::uint64_t counter) const {
  return (bits(counter) >> 63) ? 1 : -1;
}

std::uint64_t CounterRng::below(std::uint64_t counter, std::uint64_t bound) const {
  __extension__ using u128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<u128>(bits(counter)) * bound) >> 64);
}

}  // namespace kikuchi

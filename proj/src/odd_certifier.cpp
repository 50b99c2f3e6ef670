#include "kikuchi/odd_certifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "kikuchi/combinat.hpp"
#include "kikuchi/error.hpp"
#include "kikuchi/linalg.hpp"
#include "kikuchi/rng.hpp"

namespace kikuchi::odd {
namespace {

constexpr std::uint64_t kWeightCap = 100'000'000;

// n^e, or 0 if it exceeds `cap`.
std::uint64_t capped_pow(std::uint64_t n, std::uint32_t e, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < e; ++i) {
    if (__builtin_mul_overflow(r, n, &r) || r > cap) return 0;
  }
  return r;
}

void decode(std::uint64_t v, std::uint32_t n, std::span<std::uint32_t> digits) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    digits[i] = static_cast<std::uint32_t>(v % n);
    v /= n;
  }
}

}  // namespace

std::uint64_t LiftedOperator::flat(std::span<const std::uint32_t> digits) const {
  std::uint64_t v = 0;
  for (std::uint32_t d : digits) v = v * n_ + d;
  return v;
}

LiftedOperator::LiftedOperator(const model::DenseTensor& y, std::uint32_t ell,
                               std::uint64_t dim_cap)
    : n_(y.n()), q_((y.p() - 1) / 2), ell_(ell) {
  KIKUCHI_REQUIRE(y.p() >= 3 && y.p() % 2 == 1, ParameterError,
                  "the certifier needs an odd order p >= 3");
  KIKUCHI_REQUIRE(ell >= 2 * q_, ParameterError, "the certifier needs l >= p - 1");
  dim_ = capped_pow(n_, ell, dim_cap);
  if (dim_ == 0) {
    throw CapacityError("lifted dimension n^l exceeds the cap of " + std::to_string(dim_cap));
  }
  half_ = capped_pow(n_, 2 * q_, kWeightCap);
  const std::uint64_t quarter = capped_pow(n_, q_, kWeightCap);
  const std::uint64_t full = half_ ? capped_pow(half_, 2, kWeightCap) : 0;
  if (full == 0) throw CapacityError("n^{4q} coefficient table exceeds the cap");

  ttilde_.assign(full, 0.0);
  weight_.assign(full, 0.0);
  const auto values = y.values();
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(full); ++k) {
    std::vector<std::uint32_t> d(4 * q_);
    decode(static_cast<std::uint64_t>(k), n_, d);
    const std::uint64_t a = flat(std::span(d).subspan(0, q_));
    const std::uint64_t b = flat(std::span(d).subspan(q_, q_));
    const std::uint64_t c = flat(std::span(d).subspan(2 * q_, q_));
    const std::uint64_t e = flat(std::span(d).subspan(3 * q_, q_));
    if (a == b && c == e) continue;  // ac == bd: the mean term, removed
    const std::uint64_t ace = (a * quarter + c) * n_;
    const std::uint64_t bde = (b * quarter + e) * n_;
    double t = 0.0;
    for (std::uint32_t z = 0; z < n_; ++z) t += values[ace + z] * values[bde + z];
    ttilde_[k] = t;
    const std::uint64_t count = pair_count(d);
    weight_[k] = count ? t / static_cast<double>(count) : 0.0;
  }

  std::vector<std::uint32_t> tuple(2 * q_, 0);
  const std::uint64_t total = capped_pow(ell, 2 * q_, ~0ULL);
  for (std::uint64_t t = 0; t < total; ++t) {
    decode(t, ell, tuple);
    auto sorted = tuple;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) {
      positions_.push_back(tuple);
    }
  }
}

double LiftedOperator::ttilde(std::span<const std::uint32_t> abcd) const {
  KIKUCHI_REQUIRE(abcd.size() == 4 * q_, ParameterError, "abcd needs 4q indices");
  for (std::uint32_t v : abcd) KIKUCHI_REQUIRE(v < n_, IndexError, "abcd index out of range");
  return ttilde_[flat(abcd)];
}

std::uint64_t LiftedOperator::pair_count(std::span<const std::uint32_t> abcd) const {
  KIKUCHI_REQUIRE(abcd.size() == 4 * q_, ParameterError, "abcd needs 4q indices");
  const std::uint32_t w = 2 * q_;
  std::vector<std::uint32_t> vals(abcd.begin(), abcd.end());
  std::sort(vals.begin(), vals.end());
  const auto distinct = static_cast<std::uint32_t>(
      std::unique(vals.begin(), vals.end()) - vals.begin());

  std::vector<std::pair<std::uint32_t, std::uint32_t>> cols(w), swapped(w);
  for (std::uint32_t j = 0; j < w; ++j) {
    cols[j] = {abcd[j], abcd[w + j]};
    swapped[j] = {abcd[w + j], abcd[j]};
  }
  std::sort(cols.begin(), cols.end());
  std::sort(swapped.begin(), swapped.end());

  // Distinct arrangements of the column multiset over the 2q positions.
  std::uint64_t orbit = 1;
  for (std::uint32_t j = 2; j <= w; ++j) orbit *= j;
  for (std::size_t i = 0; i < cols.size();) {
    std::size_t k = i;
    while (k < cols.size() && cols[k] == cols[i]) ++k;
    for (std::uint64_t f = 2; f <= k - i; ++f) orbit /= f;
    i = k;
  }
  const std::uint64_t cases = cols == swapped ? 1 : 2;

  std::uint64_t count = combinat::binom(static_cast<int>(ell_), static_cast<int>(w));
  const std::uint64_t free_values = n_ - distinct;
  for (std::uint32_t i = w; i < ell_; ++i) {
    if (__builtin_mul_overflow(count, free_values, &count)) {
      throw CapacityError("pair count overflows 64 bits");
    }
  }
  if (__builtin_mul_overflow(count, orbit * cases, &count)) {
    throw CapacityError("pair count overflows 64 bits");
  }
  return count;
}

template <class Visit>
void LiftedOperator::for_each_entry(std::uint64_t row, std::vector<std::uint64_t>& scratch,
                                    Visit&& visit) const {
  const std::uint32_t w = 2 * q_;
  const std::uint64_t full = half_ * half_;
  std::vector<std::uint32_t> s(ell_), t(ell_), fixed(w), free_digits(w);
  std::vector<char> off(n_), in_p(ell_);
  decode(row, n_, s);
  scratch.clear();

  for (const auto& pos : positions_) {
    std::fill(in_p.begin(), in_p.end(), 0);
    for (std::uint32_t j = 0; j < w; ++j) {
      in_p[pos[j]] = 1;
      fixed[j] = s[pos[j]];
    }
    std::fill(off.begin(), off.end(), 0);
    for (std::uint32_t i = 0; i < ell_; ++i) {
      if (!in_p[i]) off[s[i]] = 1;
    }
    bool clash = false;
    for (std::uint32_t v : fixed) clash = clash || off[v];
    if (clash) continue;
    const std::uint64_t fixed_flat = flat(fixed);

    t = s;
    for (std::uint64_t f = 0; f < half_; ++f) {
      decode(f, n_, free_digits);
      bool ok = true;
      for (std::uint32_t v : free_digits) ok = ok && !off[v];
      if (!ok) continue;
      for (std::uint32_t j = 0; j < w; ++j) t[pos[j]] = free_digits[j];
      const std::uint64_t col = flat(t);
      // (i): S carries ab = fixed, T carries cd = free. (ii): the reverse.
      scratch.push_back(col * full + fixed_flat * half_ + f);
      scratch.push_back(col * full + f * half_ + fixed_flat);
    }
  }
  // The same (T, abcd) can arise from several orderings and from both cases;
  // the indicator counts it once.
  std::sort(scratch.begin(), scratch.end());
  scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
  for (std::uint64_t key : scratch) visit(key / full, key % full);
}

void LiftedOperator::matvec(std::span<const double> x, std::span<double> y) const {
  KIKUCHI_REQUIRE(x.size() == dim_ && y.size() == dim_, ParameterError,
                  "lifted matvec: dimension mismatch");
#pragma omp parallel
  {
    std::vector<std::uint64_t> scratch;
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(dim_); ++r) {
      linalg::BlockedSum sum;
      for_each_entry(static_cast<std::uint64_t>(r), scratch,
                     [&](std::uint64_t col, std::uint64_t key) { sum.add(weight_[key] * x[col]); });
      y[r] = sum.total();
    }
  }
}

SymmetricOperator LiftedOperator::as_operator() const {
  return {dim_, [this](std::span<const double> x, std::span<double> y) { matvec(x, y); }};
}

double LiftedOperator::max_abs_row_sum() const {
  double best = 0.0;
  std::vector<std::uint64_t> scratch;
  for (std::uint64_t r = 0; r < dim_; ++r) {
    double row = 0.0, entry = 0.0;
    std::uint64_t current = ~0ULL;
    for_each_entry(r, scratch, [&](std::uint64_t col, std::uint64_t key) {
      if (col != current) {
        row += std::abs(entry);
        entry = 0.0;
        current = col;
      }
      entry += weight_[key];
    });
    best = std::max(best, row + std::abs(entry));
  }
  return best;
}

OddCertificate certify_rademacher_norm(const model::DenseTensor& y, std::uint32_t ell,
                                       const spectral::EigOptions& opts, std::uint64_t dim_cap) {
  const LiftedOperator m(y, ell, dim_cap);
  spectral::EigOptions o = opts;
  o.want = spectral::Want::LeadingByMagnitude;
  const auto eig = spectral::leading_eig(m.as_operator(), o);
  const double row_sum = m.max_abs_row_sum();

  OddCertificate c;
  c.norm_estimate = eig.value;
  c.residual = eig.residual;
  c.converged = eig.converged;
  c.matvecs = eig.matvecs;
  const double solved = std::abs(eig.value) + eig.residual;
  if (eig.converged && solved < row_sum) {
    c.norm_upper = solved;
  } else {
    c.norm_upper = row_sum;
    c.used_row_sum = true;
  }
  const double n = y.n();
  c.bound = std::sqrt(n) +
            std::pow(n, static_cast<double>(ell) / 2.0 - m.q()) * std::sqrt(c.norm_upper);
  return c;
}

double brute_force_rademacher_norm(const model::DenseTensor& y) {
  const std::uint32_t n = y.n(), p = y.p();
  KIKUCHI_REQUIRE(n <= 24, CapacityError, "exhaustive search needs n <= 24");
  KIKUCHI_REQUIRE(p >= 1, ParameterError, "tensor order must be positive");
  const auto values = y.values();
  double best = 0.0;
  // Odd or even p: flipping every sign leaves |<Y, x^p>| unchanged, so fix x_0 = +1.
  const std::uint64_t count = n == 0 ? 1 : (1ULL << (n - 1));
#pragma omp parallel
  {
    std::vector<double> sigma(n), buf(values.begin(), values.end()), next;
    double local = 0.0;
#pragma omp for schedule(static)
    for (std::int64_t mask = 0; mask < static_cast<std::int64_t>(count); ++mask) {
      sigma[0] = 1.0;
      for (std::uint32_t i = 1; i < n; ++i) sigma[i] = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
      std::copy(values.begin(), values.end(), buf.begin());
      std::size_t len = buf.size();
      for (std::uint32_t axis = 0; axis < p; ++axis) {
        len /= n;
        for (std::size_t i = 0; i < len; ++i) {
          double acc = 0.0;
          for (std::uint32_t j = 0; j < n; ++j) acc += buf[i * n + j] * sigma[j];
          buf[i] = acc;
        }
      }
      local = std::max(local, std::abs(buf[0]));
    }
#pragma omp critical
    best = std::max(best, local);
  }
  return best / std::pow(static_cast<double>(n), p / 2.0);
}

model::DenseTensor random_rademacher_tensor(std::uint32_t n, std::uint32_t p, std::uint64_t seed) {
  model::DenseTensor y(n, p);
  const CounterRng rng = CounterRng(seed).derive("rademacher-tensor");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = rng.sign(i);
  return y;
}

}  // namespace kikuchi::odd

#include "kikuchi/tensor_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "kikuchi/error.hpp"
#include "kikuchi/linalg.hpp"
#include "kikuchi/rng.hpp"

namespace kikuchi::model {
namespace {

std::uint64_t checked_power(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t out = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(out, base, &out)) {
      throw CapacityError("dense tensor size overflows 64 bits");
    }
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> all_permutations(std::uint32_t p) {
  std::vector<std::uint32_t> perm(p);
  std::iota(perm.begin(), perm.end(), 0U);
  std::vector<std::vector<std::uint32_t>> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

SubsetTensor SubsetTensor::zeros(std::uint32_t n, std::uint32_t p) {
  KIKUCHI_REQUIRE(p >= 1 && p <= n, ParameterError, "subset tensor needs 1 <= p <= n");
  SubsetTensor t;
  t.n = n;
  t.p = p;
  t.entries.assign(combinat::binom(static_cast<int>(n), static_cast<int>(p)), 0.0);
  return t;
}

double SubsetTensor::at(std::span<const std::uint32_t> e) const {
  return entries[combinat::SubsetIndexer(n, p).rank(e)];
}

DenseTensor::DenseTensor(std::uint32_t n, std::uint32_t p, std::uint64_t cap_bytes)
    : n_(n), p_(p) {
  KIKUCHI_REQUIRE(n > 0 && p > 0, ParameterError, "dense tensor needs n, p > 0");
  const std::uint64_t count = checked_power(n, p);
  if (count > cap_bytes / sizeof(double)) {
    throw CapacityError("dense tensor with " + std::to_string(count) +
                        " entries exceeds the memory cap of " + std::to_string(cap_bytes) +
                        " bytes");
  }
  values_.assign(count, 0.0);
}

std::size_t DenseTensor::flat_index(std::span<const std::uint32_t> index) const {
  KIKUCHI_REQUIRE(index.size() == p_, ParameterError, "dense tensor index has wrong order");
  std::size_t flat = 0;
  for (std::uint32_t i : index) {
    KIKUCHI_REQUIRE(i < n_, ParameterError, "dense tensor index out of range");
    flat = flat * n_ + i;
  }
  return flat;
}

double DenseTensor::at(std::span<const std::uint32_t> index) const {
  return values_[flat_index(index)];
}

SpikePrior SpikePrior::rademacher() { return SpikePrior(Kind::Rademacher, {-1.0, 1.0}, {0.5, 0.5}); }

SpikePrior SpikePrior::sphere_uniform() { return SpikePrior(Kind::SphereUniform, {}, {}); }

SpikePrior SpikePrior::iid_scaled(std::vector<double> support, std::vector<double> probabilities) {
  KIKUCHI_REQUIRE(!support.empty() && support.size() == probabilities.size(), ParameterError,
                  "prior support and probabilities must be nonempty and of equal length");
  double total = 0.0;
  for (double q : probabilities) {
    KIKUCHI_REQUIRE(q >= 0.0, ParameterError, "prior probabilities must be nonnegative");
    total += q;
  }
  KIKUCHI_REQUIRE(std::abs(total - 1.0) <= 1e-12, ParameterError,
                  "prior probabilities must sum to 1");
  SpikePrior prior(Kind::IidScaled, std::move(support), std::move(probabilities));
  KIKUCHI_REQUIRE(std::abs(prior.second_moment() - 1.0) <= 1e-12, ParameterError,
                  "prior must have unit second moment");
  return prior;
}

SpikePrior SpikePrior::iid_normalized(std::vector<double> support,
                                      std::vector<double> probabilities) {
  KIKUCHI_REQUIRE(support.size() == probabilities.size(), ParameterError,
                  "prior support and probabilities must have equal length");
  double m2 = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m2 += probabilities[i] * support[i] * support[i];
  KIKUCHI_REQUIRE(m2 > 0.0, ParameterError, "prior has zero second moment");
  const double s = 1.0 / std::sqrt(m2);
  for (double& v : support) v *= s;
  return iid_scaled(std::move(support), std::move(probabilities));
}

double SpikePrior::second_moment() const {
  if (kind_ != Kind::IidScaled) return 1.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    m2 += probabilities_[i] * support_[i] * support_[i];
  }
  return m2;
}

std::vector<double> SpikePrior::sample(std::uint32_t n, std::uint64_t seed) const {
  const CounterRng rng(seed);
  std::vector<double> x(n);
  switch (kind_) {
    case Kind::Rademacher:
      for (std::uint32_t i = 0; i < n; ++i) x[i] = rng.sign(i);
      break;
    case Kind::SphereUniform: {
      for (std::uint32_t i = 0; i < n; ++i) x[i] = rng.normal(i);
      linalg::scale(x, std::sqrt(static_cast<double>(n)) / linalg::norm(x));
      break;
    }
    case Kind::IidScaled:
      for (std::uint32_t i = 0; i < n; ++i) {
        const double u = rng.uniform(i);
        double acc = 0.0;
        std::size_t k = 0;
        for (; k + 1 < support_.size(); ++k) {
          acc += probabilities_[k];
          if (u < acc) break;
        }
        x[i] = support_[k];
      }
      break;
  }
  return x;
}

Instance generate(std::uint32_t n, std::uint32_t p, double lambda, const SpikePrior& prior,
                  std::uint64_t seed, const GenerateOptions& options) {
  KIKUCHI_REQUIRE(p >= 2, ParameterError, "tensor order must be at least 2");
  KIKUCHI_REQUIRE(n >= p, ParameterError,
                  "n = " + std::to_string(n) + " is smaller than p = " + std::to_string(p));
  KIKUCHI_REQUIRE(lambda >= 0.0 && std::isfinite(lambda), ParameterError,
                  "lambda must be finite and nonnegative");

  const CounterRng root(seed);
  Instance inst;
  inst.lambda = lambda;
  inst.seed = seed;
  inst.prior = prior.kind();
  inst.spike = prior.sample(n, root.derive("spike").key());
  inst.tensor = SubsetTensor::zeros(n, p);
  const combinat::SubsetIndexer index(n, p);
  std::vector<std::uint32_t> e(p);

  if (!options.dense) {
    const CounterRng noise = root.derive("noise");
    for (std::uint64_t r = 0; r < inst.tensor.size(); ++r) {
      index.unrank_into(r, e);
      double xe = 1.0;
      for (std::uint32_t i : e) xe *= inst.spike[i];
      inst.tensor.entries[r] = lambda * xe + noise.normal(r);
    }
    return inst;
  }

  const CounterRng noise = root.derive("dense-noise");
  DenseTensor raw(n, p, options.dense_cap_bytes);
  DenseTensor y(n, p, options.dense_cap_bytes);
  for (std::size_t f = 0; f < raw.size(); ++f) raw[f] = noise.normal(f);

  const auto perms = all_permutations(p);
  const double norm = 1.0 / std::sqrt(static_cast<double>(perms.size()));
  std::vector<std::uint32_t> digits(p), permuted(p);
  for (std::size_t f = 0; f < y.size(); ++f) {
    std::size_t rest = f;
    for (std::uint32_t k = p; k-- > 0;) {
      digits[k] = static_cast<std::uint32_t>(rest % n);
      rest /= n;
    }
    double g = 0.0;
    double xe = 1.0;
    for (std::uint32_t k = 0; k < p; ++k) xe *= inst.spike[digits[k]];
    for (const auto& perm : perms) {
      for (std::uint32_t k = 0; k < p; ++k) permuted[k] = digits[perm[k]];
      g += raw[raw.flat_index(permuted)];
    }
    y[f] = lambda * xe + norm * g;
  }
  for (std::uint64_t r = 0; r < inst.tensor.size(); ++r) {
    index.unrank_into(r, e);
    inst.tensor.entries[r] = y.at(e);
  }
  inst.dense = std::move(y);
  return inst;
}

double correlation(std::span<const double> a, std::span<const double> b) {
  KIKUCHI_REQUIRE(a.size() == b.size(), ParameterError, "correlation: length mismatch");
  const double na = linalg::norm(a), nb = linalg::norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw UndefinedCorrelationError("correlation with a zero vector is undefined");
  }
  return std::min(1.0, std::abs(linalg::dot(a, b)) / (na * nb));
}

std::vector<double> contract(const DenseTensor& y, std::span<const double> u) {
  const std::uint32_t n = y.n();
  KIKUCHI_REQUIRE(u.size() == n, ParameterError, "contract: vector length must equal n");
  // Contract the trailing index p - 1 times; row-major layout makes each
  // step a matrix-vector product with an (n^{k-1} x n) view.
  std::vector<double> cur(y.values().begin(), y.values().end());
  for (std::uint32_t k = y.p(); k > 1; --k) {
    std::vector<double> next(cur.size() / n, 0.0);
    for (std::size_t r = 0; r < next.size(); ++r) {
      double s = 0.0;
      const double* row = cur.data() + r * n;
      for (std::uint32_t j = 0; j < n; ++j) s += row[j] * u[j];
      next[r] = s;
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<double> boost(const Instance& instance, std::span<const double> u) {
  if (!instance.dense) throw CapabilityError("boost needs the dense tensor of the instance");
  KIKUCHI_REQUIRE(linalg::norm(u) > 0.0, ParameterError, "boost needs a nonzero warm start");
  return contract(*instance.dense, u);
}

std::vector<double> tensor_power_method(const DenseTensor& y, std::span<const double> u0,
                                        unsigned iters) {
  KIKUCHI_REQUIRE(u0.size() == y.n(), ParameterError, "power method: start has wrong length");
  std::vector<double> u(u0.begin(), u0.end());
  double nu = linalg::norm(u);
  KIKUCHI_REQUIRE(nu > 0.0, ParameterError, "power method needs a nonzero start");
  linalg::scale(u, 1.0 / nu);
  for (unsigned t = 0; t < iters; ++t) {
    u = contract(y, u);
    nu = linalg::norm(u);
    if (nu == 0.0) return u;
    linalg::scale(u, 1.0 / nu);
  }
  return u;
}

std::vector<double> tensor_unfold(const DenseTensor& y, const spectral::EigOptions& opts) {
  KIKUCHI_REQUIRE(y.p() == 3, ParameterError, "tensor unfolding is defined for p = 3");
  const std::uint32_t n = y.n();
  const std::size_t width = static_cast<std::size_t>(n) * n;
  linalg::DenseMatrix gram(n, n);
  const auto v = y.values();
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a; b < n; ++b) {
      double s = 0.0;
      for (std::size_t jk = 0; jk < width; ++jk) s += v[a * width + jk] * v[b * width + jk];
      gram(a, b) = gram(b, a) = s;
    }
  }
  SymmetricOperator op{n, [&](std::span<const double> x, std::span<double> out) {
                         gram.multiply(x, out);
                       }};
  auto eig = spectral::leading_eig(op, opts);
  canonicalize_sign(eig.vector);
  return eig.vector;
}

DenseTensor rank_one(std::span<const double> x, std::uint32_t p) {
  const auto n = static_cast<std::uint32_t>(x.size());
  DenseTensor t(n, p);
  for (std::size_t f = 0; f < t.size(); ++f) {
    std::size_t rest = f;
    double v = 1.0;
    for (std::uint32_t k = 0; k < p; ++k) {
      v *= x[rest % n];
      rest /= n;
    }
    t[f] = v;
  }
  return t;
}

void canonicalize_sign(std::span<double> v) {
  if (v.empty()) return;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  }
  if (v[arg] < 0.0) linalg::scale(v, -1.0);
}

// --- binary I/O -------------------------------------------------------------

namespace {

template <class T>
void put(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  const U bits = std::bit_cast<U>(value);
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(buf, sizeof(U));
}

template <class T>
T get(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  unsigned char buf[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(U))) {
    throw FormatError("unexpected end of file");
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

void expect_magic(std::istream& in, const char (&magic)[5]) {
  char buf[4];
  if (!in.read(buf, 4) || std::string(buf, 4) != std::string(magic, 4)) {
    throw FormatError(std::string("bad magic, expected ") + magic);
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kFormatVersion) {
    throw FormatError("unsupported format version " + std::to_string(version));
  }
}

}  // namespace

void write_instance(std::ostream& out, const Instance& instance, bool with_spike) {
  out.write("KIKT", 4);
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, instance.tensor.n);
  put<std::uint32_t>(out, instance.tensor.p);
  put<double>(out, instance.lambda);
  put<std::uint64_t>(out, instance.seed);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(instance.prior));
  put<std::uint8_t>(out, with_spike ? 1 : 0);
  for (double v : instance.tensor.entries) put<double>(out, v);
  if (with_spike) {
    KIKUCHI_REQUIRE(instance.spike.size() == instance.tensor.n, ParameterError,
                    "spike length does not match n");
    for (double v : instance.spike) put<double>(out, v);
  }
  if (!out) throw FormatError("write failed");
}

Instance read_instance(std::istream& in) {
  expect_magic(in, "KIKT");
  Instance inst;
  const auto n = get<std::uint32_t>(in);
  const auto p = get<std::uint32_t>(in);
  inst.lambda = get<double>(in);
  inst.seed = get<std::uint64_t>(in);
  const auto tag = get<std::uint8_t>(in);
  if (tag > 2) throw FormatError("unknown prior tag " + std::to_string(tag));
  inst.prior = static_cast<SpikePrior::Kind>(tag);
  const auto flags = get<std::uint8_t>(in);
  if (p < 1 || n < p) throw FormatError("header has invalid n/p");
  inst.tensor = SubsetTensor::zeros(n, p);
  for (double& v : inst.tensor.entries) v = get<double>(in);
  if (flags & 1U) {
    inst.spike.resize(n);
    for (double& v : inst.spike) v = get<double>(in);
  }
  return inst;
}

void write_instance_file(const std::filesystem::path& path, const Instance& instance,
                         bool with_spike) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_instance(out, instance, with_spike);
}

Instance read_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_instance(in);
}

void write_dense(std::ostream& out, const DenseTensor& tensor) {
  out.write("KIKD", 4);
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, tensor.n());
  put<std::uint32_t>(out, tensor.p());
  for (double v : tensor.values()) put<double>(out, v);
  if (!out) throw FormatError("write failed");
}

DenseTensor read_dense(std::istream& in) {
  expect_magic(in, "KIKD");
  const auto n = get<std::uint32_t>(in);
  const auto p = get<std::uint32_t>(in);
  if (n == 0 || p == 0) throw FormatError("header has invalid n/p");
  DenseTensor t(n, p);
  for (double& v : t.values()) v = get<double>(in);
  return t;
}

void write_dense_file(const std::filesystem::path& path, const DenseTensor& tensor) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_dense(out, tensor);
}

DenseTensor read_dense_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_dense(in);
}

}  // namespace kikuchi::model

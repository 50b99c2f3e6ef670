#include <cmath>
#include <sstream>

#include "doctest.h"
#include "kikuchi/combinat.hpp"
#include "kikuchi/error.hpp"
#include "kikuchi/linalg.hpp"
#include "kikuchi/rng.hpp"
#include "kikuchi/tensor_model.hpp"
#include "oracles.hpp"

using namespace kikuchi;
using namespace kikuchi::model;

TEST_CASE("null instances have standard normal entries") {
  const auto inst = generate(30, 3, 0.0, SpikePrior::rademacher(), 1);
  double mean = 0, sq = 0;
  for (double v : inst.tensor.entries) mean += v, sq += v * v;
  const double k = static_cast<double>(inst.tensor.size());
  mean /= k;
  const double var = sq / k - mean * mean;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(k));
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / k));
}

TEST_CASE("huge signal: entry signs are the spike monomials") {
  const auto inst = generate(6, 4, 1e6, SpikePrior::rademacher(), 2);
  const combinat::SubsetIndexer ix(6, 4);
  for (std::uint64_t r = 0; r < ix.size(); ++r) {
    double mono = 1.0;
    for (auto i : ix.unrank(r)) mono *= inst.spike[i];
    CHECK((inst.tensor.entries[r] > 0) == (mono > 0));
  }
}

TEST_CASE("generation is deterministic in the seed") {
  GenerateOptions o;
  o.dense = true;
  const auto a = generate(7, 3, 0.5, SpikePrior::sphere_uniform(), 99, o);
  const auto b = generate(7, 3, 0.5, SpikePrior::sphere_uniform(), 99, o);
  CHECK(a.spike == b.spike);
  CHECK(a.tensor.entries == b.tensor.entries);
  CHECK(std::equal(a.dense->values().begin(), a.dense->values().end(), b.dense->values().begin()));
  const auto c = generate(7, 3, 0.5, SpikePrior::sphere_uniform(), 100, o);
  CHECK(a.tensor.entries != c.tensor.entries);
}

TEST_CASE("priors") {
  const auto r = SpikePrior::rademacher().sample(50, 4);
  for (double v : r) CHECK(std::abs(v) == 1.0);
  const auto s = SpikePrior::sphere_uniform().sample(50, 4);
  CHECK(linalg::norm(s) == doctest::Approx(std::sqrt(50.0)).epsilon(1e-12));
  CHECK_THROWS_AS(SpikePrior::iid_scaled({1.0, 2.0}, {0.5, 0.5}), ParameterError);
  CHECK_THROWS_AS(SpikePrior::iid_scaled({1.0, -1.0}, {0.5, 0.6}), ParameterError);
  const auto sparse = SpikePrior::iid_normalized({0.0, 1.0, -1.0}, {0.5, 0.25, 0.25});
  CHECK(sparse.second_moment() == doctest::Approx(1.0).epsilon(1e-12));
  const auto x = sparse.sample(2000, 1);
  double m2 = 0;
  for (double v : x) m2 += v * v;
  CHECK(m2 / 2000.0 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("dense and subset views agree; symmetrized noise is symmetric with unit variance") {
  GenerateOptions o;
  o.dense = true;
  const std::uint32_t n = 12, p = 3;
  const auto inst = generate(n, p, 0.0, SpikePrior::rademacher(), 5, o);
  const auto& d = *inst.dense;
  const combinat::SubsetIndexer ix(n, p);
  for (std::uint64_t r = 0; r < ix.size(); ++r) {
    const auto e = ix.unrank(r);
    CHECK(d.at(e) == inst.tensor.entries[r]);
    std::vector<std::uint32_t> perm{e[2], e[0], e[1]};
    CHECK(d.at(perm) == doctest::Approx(d.at(e)).epsilon(1e-14));
  }
  double sq = 0;
  for (double v : inst.tensor.entries) sq += v * v;
  const double k = static_cast<double>(ix.size());
  CHECK(std::abs(sq / k - 1.0) <= 5.0 / std::sqrt(k));
}

TEST_CASE("dense generation honours the memory cap") {
  GenerateOptions o;
  o.dense = true;
  o.dense_cap_bytes = 1000;
  CHECK_THROWS_AS(generate(10, 3, 1.0, SpikePrior::rademacher(), 1, o), CapacityError);
  CHECK_THROWS_AS(generate(3, 4, 1.0, SpikePrior::rademacher(), 1), ParameterError);
}

TEST_CASE("correlation") {
  std::vector<double> x{1, -2, 3}, y{-1, 2, -3}, z{2, 1, 0};
  CHECK(correlation(x, x) == doctest::Approx(1.0));
  CHECK(correlation(x, y) == doctest::Approx(1.0));
  CHECK(correlation(x, z) == doctest::Approx(0.0));
  std::vector<double> w{0.3, 7, -1};
  std::vector<double> w5{1.5, 35, -5};
  CHECK(correlation(x, w) == doctest::Approx(correlation(x, w5)).epsilon(1e-14));
  CHECK_THROWS_AS(correlation(x, std::vector<double>(3, 0.0)), UndefinedCorrelationError);
}

TEST_CASE("contraction against the naive loop, and the rank-one identity") {
  const CounterRng rng(7);
  const std::uint32_t n = 5, p = 4;
  DenseTensor y(n, p);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = rng.normal(i);
  std::vector<double> u(n);
  for (std::uint32_t i = 0; i < n; ++i) u[i] = rng.derive("u").normal(i);
  const auto got = contract(y, u);
  for (std::uint32_t i = 0; i < n; ++i) {
    double s = 0;
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b)
        for (std::uint32_t c = 0; c < n; ++c) s += y[((i * n + a) * n + b) * n + c] * u[a] * u[b] * u[c];
    CHECK(got[i] == doctest::Approx(s).epsilon(1e-12));
  }
  std::vector<double> x{1, -1, 2, 0.5, 1};
  const auto r1 = contract(rank_one(x, 3), u);
  const double ip = linalg::dot(x, u);
  for (std::uint32_t i = 0; i < n; ++i) CHECK(r1[i] == doctest::Approx(ip * ip * x[i]).epsilon(1e-12));
  const auto zero = contract(y, std::vector<double>(n, 0.0));
  for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("boost needs a dense tensor; noiseless boost is exact") {
  auto inst = generate(8, 3, 2.0, SpikePrior::rademacher(), 3);
  CHECK_THROWS_AS(boost(inst, std::vector<double>(8, 1.0)), CapabilityError);
  inst.dense = rank_one(inst.spike, 3);
  std::vector<double> u(8, 0.0);
  u[0] = 1.0;
  u[1] = 0.3;
  const auto xh = boost(inst, u);
  CHECK(correlation(xh, inst.spike) == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<double> perp(8, 0.0);
  perp[0] = inst.spike[1];
  perp[1] = -inst.spike[0];
  const auto z = boost(inst, perp);
  for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("power method and unfolding on rank-one tensors") {
  std::vector<double> x{1, -1, 1, 1, -1, 1, -1, -1};
  const auto y = rank_one(x, 3);
  std::vector<double> u0(8, 0.1);
  u0[0] = 1.0;
  const auto pm = tensor_power_method(y, u0, 5);
  CHECK(correlation(pm, x) == doctest::Approx(1.0).epsilon(1e-14));
  const auto uf = tensor_unfold(y);
  CHECK(correlation(uf, x) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(tensor_unfold(rank_one(x, 4)), ParameterError);
}

TEST_CASE("unfolding recovers the spike well above n^{-3/4}") {
  GenerateOptions o;
  o.dense = true;
  const std::uint32_t n = 20;
  double total = 0;
  for (int t = 0; t < 5; ++t) {
    const auto inst = generate(n, 3, 3.0 * std::pow(n, -0.75), SpikePrior::rademacher(), 40 + t, o);
    total += correlation(tensor_unfold(*inst.dense), inst.spike);
  }
  CHECK(total / 5 >= 0.9);
}

TEST_CASE("instance and dense files round-trip") {
  GenerateOptions o;
  o.dense = true;
  const auto inst = generate(6, 3, 1.5, SpikePrior::rademacher(), 12, o);
  std::stringstream ss;
  write_instance(ss, inst, true);
  const auto back = read_instance(ss);
  CHECK(back.tensor.n == 6);
  CHECK(back.tensor.p == 3);
  CHECK(back.lambda == 1.5);
  CHECK(back.seed == 12);
  CHECK(back.tensor.entries == inst.tensor.entries);
  CHECK(back.spike == inst.spike);

  std::stringstream hidden;
  write_instance(hidden, inst, false);
  CHECK(read_instance(hidden).spike.empty());

  std::stringstream ds;
  write_dense(ds, *inst.dense);
  const auto d = read_dense(ds);
  CHECK(std::equal(d.values().begin(), d.values().end(), inst.dense->values().begin()));

  std::stringstream bad("KIKX0000");
  CHECK_THROWS_AS(read_instance(bad), FormatError);
}

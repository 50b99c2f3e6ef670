#include <cmath>
#include <sstream>

#include "doctest.h"
#include "kikuchi/combinat.hpp"
#include "kikuchi/error.hpp"
#include "kikuchi/xor_refute.hpp"
#include "oracles.hpp"

using namespace kikuchi;
using namespace kikuchi::xor_sat;

namespace {

std::uint64_t brute(const XorFormula& f) {
  std::vector<std::vector<std::uint32_t>> vars;
  std::vector<int> rhs;
  for (const auto& c : f.clauses) {
    vars.push_back(c.vars);
    rhs.push_back(c.rhs);
  }
  return oracle::xor_max_satisfied(static_cast<int>(f.n), vars, rhs);
}

}  // namespace

TEST_CASE("certificate is sound against brute force") {
  int cases = 0;
  for (std::uint32_t n : {8U, 12U}) {
    for (std::uint32_t ell : {1U, 2U}) {
      for (std::uint64_t m : {10ULL, 100ULL}) {
        for (std::uint64_t seed = 0; seed < 6; ++seed, ++cases) {
          const auto f = random_formula(n, 2, m, seed * 31 + n + ell);
          const auto cert = refute(f, ell);
          CHECK(cert.bound >= static_cast<double>(brute(f)) - 1e-9);
          CHECK(cert.bound >= m / 2.0);
          CHECK(cert.m == m);
        }
      }
    }
  }
  CHECK(cases == 48);
  const auto f4 = random_formula(8, 4, 60, 2);
  CHECK(refute(f4, 2).bound >= static_cast<double>(brute(f4)) - 1e-9);
}

TEST_CASE("satisfied count is the quadratic form of the clause tensor") {
  const auto f = random_formula(7, 2, 40, 9);
  const auto y = clause_tensor(f);
  const combinat::SubsetIndexer ix(7, 2);
  for (oracle::Mask mask = 0; mask < 128; ++mask) {
    std::vector<double> x(7);
    for (int i = 0; i < 7; ++i) x[i] = (mask >> i) & 1 ? -1.0 : 1.0;
    double form = 0;
    for (std::uint64_t r = 0; r < ix.size(); ++r) {
      const auto e = ix.unrank(r);
      form += y.entries[r] * x[e[0]] * x[e[1]];
    }
    CHECK(static_cast<double>(count_satisfied(f, x)) == doctest::Approx(40 / 2.0 + form / 2.0));
  }
}

TEST_CASE("flipping every sign leaves the bound unchanged") {
  auto f = random_formula(10, 2, 50, 4);
  const auto a = refute(f, 2);
  for (auto& c : f.clauses) c.rhs = -c.rhs;
  CHECK(refute(f, 2).bound == doctest::Approx(a.bound).epsilon(1e-8));
}

TEST_CASE("file round trip") {
  const auto f = random_formula(9, 4, 25, 1);
  std::stringstream ss;
  write_formula(ss, f);
  CHECK(ss.str().rfind("p kxor 9 25 4\n", 0) == 0);
  const auto g = read_formula(ss);
  REQUIRE(g.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(g.clauses[i].vars == f.clauses[i].vars);
    CHECK(g.clauses[i].rhs == f.clauses[i].rhs);
  }
  std::stringstream bad("p kxor 4 1 2\n1 1 +1\n");
  CHECK_THROWS_AS(read_formula(bad), FormatError);
  std::stringstream junk("hello\n");
  CHECK_THROWS_AS(read_formula(junk), FormatError);
}

TEST_CASE("clauses are uniform over pairs and signs") {
  const std::uint64_t m = 100000;
  const auto f = random_formula(6, 2, m, 123);
  const combinat::SubsetIndexer ix(6, 2);
  std::vector<double> counts(ix.size(), 0.0);
  double plus = 0;
  for (const auto& c : f.clauses) {
    counts[ix.rank(c.vars)] += 1;
    plus += c.rhs == 1;
  }
  const double expect = static_cast<double>(m) / counts.size();
  double chi2 = 0;
  for (double c : counts) chi2 += (c - expect) * (c - expect) / expect;
  // 14 degrees of freedom; 36.1 is the 0.999 quantile.
  CHECK(chi2 < 36.1);
  CHECK(std::abs(plus - m / 2.0) < 4 * std::sqrt(m / 4.0));
}

TEST_CASE("clause budget formula") {
  const double d = static_cast<double>(combinat::d_ell(20, 1, 2));
  const double want = 4 * std::exp(2.0) * 190 * std::log(20.0) / (0.25 * d);
  CHECK(clauses_for_refutation(20, 2, 1, 0.5) == static_cast<std::uint64_t>(std::ceil(want)));
}

TEST_CASE("parameter errors") {
  CHECK_THROWS_AS(random_formula(5, 3, 10, 0), ParameterError);
  CHECK_THROWS_AS(refute(random_formula(5, 2, 10, 0), 0), ParameterError);
  XorFormula f{4, 2, {{{1, 1}, 1}}};
  CHECK_THROWS_AS(f.validate(), ParameterError);
  XorFormula g{4, 2, {{{0, 1}, 0}}};
  CHECK_THROWS_AS(g.validate(), ParameterError);
}

#include <cmath>

#include "doctest.h"
#include "kikuchi/johnson.hpp"
#include "kikuchi/linalg.hpp"
#include "kikuchi/rng.hpp"
#include "kikuchi/spectral.hpp"
#include "oracles.hpp"

using namespace kikuchi;
using spectral::Want;

namespace {

SymmetricOperator diagonal(std::vector<double> d) {
  return {d.size(), [d](std::span<const double> x, std::span<double> y) {
            for (std::size_t i = 0; i < d.size(); ++i) y[i] = d[i] * x[i];
          }};
}

SymmetricOperator dense_op(const linalg::DenseMatrix& a) {
  return {a.rows(), [&a](std::span<const double> x, std::span<double> y) { a.multiply(x, y); }};
}

double residual_of(const SymmetricOperator& op, const spectral::EigResult& r) {
  std::vector<double> y(op.dim);
  op.apply(r.vector, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= r.value * r.vector[i];
  return linalg::norm(y);
}

}  // namespace

TEST_CASE("diagonal operator, by value and by magnitude") {
  auto op = diagonal({3, 1, -5});
  spectral::EigOptions o;
  auto r = spectral::leading_eig(op, o);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));
  o.want = Want::LeadingByMagnitude;
  r = spectral::leading_eig(op, o);
  CHECK(r.value == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("leading by value equals the largest diagonal entry on random diagonals") {
  const CounterRng rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(3 * t, 60);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = rng.derive("d", t).normal(i);
    auto r = spectral::leading_eig(diagonal(d), {});
    REQUIRE(r.converged);
    CHECK(r.value == doctest::Approx(*std::max_element(d.begin(), d.end())).epsilon(1e-8));
  }
}

TEST_CASE("Johnson graph J(6,2,4) has top eigenvalue 6 with constant eigenvector") {
  const auto x = johnson::adjacency_dense(6, 2, 4);
  auto r = spectral::leading_eig(dense_op(x), {});
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(6.0).epsilon(1e-10));
  const double c = r.vector[0];
  for (double v : r.vector) CHECK(v == doctest::Approx(c).epsilon(1e-6));
}

TEST_CASE("residual contract on random symmetric matrices") {
  const CounterRng rng(5);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 10 + 7 * t;
    linalg::DenseMatrix a(n, n);
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.derive("m", t).normal(c++);
    for (auto want : {Want::LeadingByValue, Want::LeadingByMagnitude}) {
      spectral::EigOptions o;
      o.want = want;
      const auto op = dense_op(a);
      const auto r = spectral::leading_eig(op, o);
      REQUIRE(r.converged);
      CHECK(residual_of(op, r) <= o.tol * std::max(std::abs(r.value), r.radius_estimate) * 1.0001);
      oracle::Matrix m(n, std::vector<double>(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = a(i, j);
      const auto vals = oracle::symmetric_eigen(m).first;
      const double expect = want == Want::LeadingByValue
                                ? vals.back()
                                : (std::abs(vals.front()) > std::abs(vals.back()) ? vals.front()
                                                                                  : vals.back());
      CHECK(r.value == doctest::Approx(expect).epsilon(1e-7));
    }
  }
}

TEST_CASE("identical options give bit-identical output") {
  const auto x = johnson::adjacency_dense(8, 3, 4);
  const auto a = spectral::leading_eig(dense_op(x), {});
  const auto b = spectral::leading_eig(dense_op(x), {});
  CHECK(a.value == b.value);
  CHECK(a.vector == b.vector);
}

TEST_CASE("degenerate top eigenvalue: result lies in the top eigenspace") {
  auto op = diagonal({2, 2, 1, 0, -1});
  const auto r = spectral::leading_eig(op, {});
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(std::hypot(r.vector[0], r.vector[1]) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("budget exhaustion returns the best iterate unconverged") {
  const CounterRng rng(3);
  std::vector<double> d(500);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = 1.0 + 1e-9 * static_cast<double>(i);
  spectral::EigOptions o;
  o.max_iters = 3;
  o.tol = 1e-15;
  const auto r = spectral::leading_eig(diagonal(d), o);
  CHECK_FALSE(r.converged);
  CHECK(r.vector.size() == d.size());
  CHECK(r.matvecs <= 4);
}

TEST_CASE("singular triple of a rank-one operator") {
  std::vector<double> a{1, 2, 3}, b{4, 0, -1, 2};
  RectangularOperator op{3, 4,
                         [&](std::span<const double> x, std::span<double> y) {
                           const double s = linalg::dot(b, x);
                           for (int i = 0; i < 3; ++i) y[i] = a[i] * s;
                         },
                         [&](std::span<const double> x, std::span<double> y) {
                           const double s = linalg::dot(a, x);
                           for (int i = 0; i < 4; ++i) y[i] = b[i] * s;
                         }};
  const auto r = spectral::leading_singular(op);
  CHECK(r.sigma == doctest::Approx(linalg::norm(a) * linalg::norm(b)).epsilon(1e-10));
  CHECK(std::abs(linalg::dot(r.left, a)) == doctest::Approx(linalg::norm(a)).epsilon(1e-10));
}

TEST_CASE("zero operator gives sigma 0") {
  RectangularOperator op{3, 5, [](std::span<const double>, std::span<double> y) {
                           std::fill(y.begin(), y.end(), 0.0);
                         },
                         [](std::span<const double>, std::span<double> y) {
                           std::fill(y.begin(), y.end(), 0.0);
                         }};
  const auto r = spectral::leading_singular(op);
  CHECK(r.sigma == 0.0);
  CHECK(linalg::norm(r.left) == doctest::Approx(1.0));
}

TEST_CASE("random 20x35 matrix against one-sided Jacobi SVD") {
  const CounterRng rng(21);
  linalg::DenseMatrix a(20, 35);
  oracle::Matrix m(20, std::vector<double>(35));
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 35; ++j) m[i][j] = a(i, j) = rng.normal(i * 35 + j);
  RectangularOperator op{20, 35,
                         [&](std::span<const double> x, std::span<double> y) { a.multiply(x, y); },
                         [&](std::span<const double> x, std::span<double> y) {
                           a.multiply_transpose(x, y);
                         }};
  const auto r = spectral::leading_singular(op);
  CHECK(r.converged);
  CHECK(r.sigma == doctest::Approx(oracle::singular_values(m)[0]).epsilon(1e-8));
}

TEST_CASE("dense Jacobi eigensolver agrees with the oracle") {
  const CounterRng rng(8);
  const std::size_t n = 30;
  linalg::DenseMatrix a(n, n);
  oracle::Matrix m(n, std::vector<double>(n));
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m[i][j] = m[j][i] = a(i, j) = a(j, i) = rng.normal(c++);
  const auto got = linalg::jacobi_eigen(a);
  const auto want = oracle::symmetric_eigen(m).first;
  for (std::size_t k = 0; k < n; ++k) CHECK(got.values[k] == doctest::Approx(want[k]).epsilon(1e-10));
  std::vector<double> col(n), img(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) col[i] = got.vectors(i, k);
    a.multiply(col, img);
    for (std::size_t i = 0; i < n; ++i) CHECK(img[i] == doctest::Approx(got.values[k] * col[i]).epsilon(1e-8).scale(1.0));
  }
}

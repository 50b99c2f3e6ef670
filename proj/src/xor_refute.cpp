#include "kikuchi/xor_refute.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "kikuchi/error.hpp"
#include "kikuchi/kikuchi_matrix.hpp"
#include "kikuchi/rng.hpp"

namespace kikuchi::xor_sat {

void XorFormula::validate() const {
  KIKUCHI_REQUIRE(k >= 1 && k <= n, ParameterError, "clause arity must satisfy 1 <= k <= n");
  for (const auto& c : clauses) {
    combinat::validate_subset(n, k, c.vars);
    KIKUCHI_REQUIRE(c.rhs == 1 || c.rhs == -1, ParameterError, "clause sign must be +-1");
  }
}

XorFormula random_formula(std::uint32_t n, std::uint32_t k, std::uint64_t m, std::uint64_t seed) {
  KIKUCHI_REQUIRE(k >= 2 && k % 2 == 0 && k <= n, ParameterError,
                  "random k-XOR needs even k with 2 <= k <= n");
  const combinat::SubsetIndexer index(n, k);
  const CounterRng rng = CounterRng(seed).derive("xor-formula");
  XorFormula f{n, k, {}};
  f.clauses.resize(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    f.clauses[i].vars = index.unrank(rng.below(2 * i, index.size()));
    f.clauses[i].rhs = rng.sign(2 * i + 1);
  }
  return f;
}

std::uint64_t count_satisfied(const XorFormula& f, std::span<const double> x) {
  KIKUCHI_REQUIRE(x.size() == f.n, ParameterError, "assignment has the wrong length");
  for (double v : x) KIKUCHI_REQUIRE(v == 1.0 || v == -1.0, ParameterError, "assignment must be +-1");
  std::uint64_t sat = 0;
  for (const auto& c : f.clauses) {
    double prod = 1.0;
    for (std::uint32_t i : c.vars) prod *= x[i];
    if (prod == c.rhs) ++sat;
  }
  return sat;
}

model::SubsetTensor clause_tensor(const XorFormula& f) {
  f.validate();
  auto y = model::SubsetTensor::zeros(f.n, f.k);
  const combinat::SubsetIndexer index(f.n, f.k);
  for (const auto& c : f.clauses) y.entries[index.rank_unchecked(c.vars)] += c.rhs;
  return y;
}

RefutationCertificate refute(const XorFormula& f, std::uint32_t ell,
                             const spectral::EigOptions& opts) {
  KIKUCHI_REQUIRE(f.k % 2 == 0, ParameterError, "refutation needs an even clause arity");
  const auto m = KikuchiMatrix::build(clause_tensor(f), ell);
  spectral::EigOptions o = opts;
  o.want = spectral::Want::LeadingByMagnitude;
  const auto eig = spectral::leading_eig(m.as_symmetric_operator(), o);
  const double row_sum = m.max_abs_row_sum();

  RefutationCertificate c;
  c.m = f.size();
  c.ell = ell;
  c.norm_estimate = eig.value;
  c.residual = eig.residual;
  c.converged = eig.converged;
  const double solved = std::abs(eig.value) + eig.residual;
  if (eig.converged && solved < row_sum) {
    c.norm_upper = solved;
  } else {
    c.norm_upper = row_sum;
    c.used_row_sum = true;
  }
  const double cnk = static_cast<double>(combinat::binom(static_cast<int>(f.n), static_cast<int>(f.k)));
  c.bound = static_cast<double>(c.m) / 2.0 +
            cnk / (2.0 * static_cast<double>(m.row_degree())) * c.norm_upper;
  return c;
}

std::uint64_t clauses_for_refutation(std::uint32_t n, std::uint32_t k, std::uint32_t ell,
                                     double beta) {
  KIKUCHI_REQUIRE(beta > 0.0, ParameterError, "beta must be positive");
  const double e2 = std::exp(2.0);
  const double cnk = static_cast<double>(combinat::binom(static_cast<int>(n), static_cast<int>(k)));
  const double cnl = static_cast<double>(combinat::binom(static_cast<int>(n), static_cast<int>(ell)));
  const double d = static_cast<double>(combinat::d_ell(n, ell, k));
  return static_cast<std::uint64_t>(std::ceil(4.0 * e2 * cnk * std::log(cnl) / (beta * beta * d)));
}

void write_formula(std::ostream& out, const XorFormula& f) {
  out << "p kxor " << f.n << ' ' << f.size() << ' ' << f.k << '\n';
  for (const auto& c : f.clauses) {
    for (std::uint32_t v : c.vars) out << v + 1 << ' ';
    out << (c.rhs > 0 ? "+1" : "-1") << '\n';
  }
}

XorFormula read_formula(std::istream& in) {
  std::string line;
  XorFormula f;
  std::uint64_t m = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    if (!header) {
      std::string p, kind;
      if (!(ls >> p >> kind >> f.n >> m >> f.k) || p != "p" || kind != "kxor") {
        throw FormatError("expected header 'p kxor n m k'");
      }
      header = true;
      f.clauses.reserve(m);
      continue;
    }
    Clause c;
    c.vars.resize(f.k);
    for (auto& v : c.vars) {
      long long idx = 0;
      if (!(ls >> idx) || idx < 1 || idx > static_cast<long long>(f.n)) {
        throw FormatError("bad variable index in clause " + std::to_string(f.size() + 1));
      }
      v = static_cast<std::uint32_t>(idx - 1);
    }
    std::string sign;
    if (!(ls >> sign) || (sign != "+1" && sign != "-1" && sign != "1")) {
      throw FormatError("clause " + std::to_string(f.size() + 1) + " needs a +1/-1 right-hand side");
    }
    c.rhs = sign == "-1" ? -1 : 1;
    std::sort(c.vars.begin(), c.vars.end());
    if (std::adjacent_find(c.vars.begin(), c.vars.end()) != c.vars.end()) {
      throw FormatError("repeated variable in clause " + std::to_string(f.size() + 1));
    }
    f.clauses.push_back(std::move(c));
  }
  if (!header) throw FormatError("missing 'p kxor' header");
  if (f.size() != m) {
    throw FormatError("header announces " + std::to_string(m) + " clauses, found " +
                      std::to_string(f.size()));
  }
  return f;
}

void write_formula_file(const std::filesystem::path& path, const XorFormula& f) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_formula(out, f);
}

XorFormula read_formula_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_formula(in);
}

}  // namespace kikuchi::xor_sat

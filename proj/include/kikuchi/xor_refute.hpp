#pragma once

// Strong refutation of random k-XOR formulas (even k) through the norm of
// the symmetric-difference matrix built from the clauses.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "kikuchi/combinat.hpp"
#include "kikuchi/spectral.hpp"
#include "kikuchi/tensor_model.hpp"

namespace kikuchi::xor_sat {

struct Clause {
  combinat::Subset vars;  // sorted, 0-based
  int rhs = 1;            // +1 or -1
};

struct XorFormula {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::vector<Clause> clauses;

  std::size_t size() const { return clauses.size(); }
  /// Throws ParameterError on malformed clauses.
  void validate() const;
};

struct RefutationCertificate {
  std::uint64_t m = 0;
  std::uint32_t ell = 0;
  /// Eigenvalue of largest magnitude found by the solver, and its residual.
  double norm_estimate = 0.0;
  double residual = 0.0;
  /// The norm bound actually used in `bound`.
  double norm_upper = 0.0;
  /// m/2 + C(n,k) / (2 d_l) * norm_upper. Never below m/2.
  double bound = 0.0;
  bool converged = false;
  /// The row-sum bound max_S sum_T |M_ST| was tighter or the solve failed.
  bool used_row_sum = false;
};

/// m clauses with i.i.d. uniform k-subsets (with replacement) and signs.
XorFormula random_formula(std::uint32_t n, std::uint32_t k, std::uint64_t m, std::uint64_t seed);

/// Number of clauses with x^{U_i} = b_i; x must be +-1.
std::uint64_t count_satisfied(const XorFormula& f, std::span<const double> x);

/// Y_U = sum of b_i over clauses with U_i = U.
model::SubsetTensor clause_tensor(const XorFormula& f);

/// Sound upper bound on max_x count_satisfied(f, x). The norm used is
/// min(|theta| + residual, row-sum bound) when the solve converges, and the
/// row-sum bound otherwise.
RefutationCertificate refute(const XorFormula& f, std::uint32_t ell,
                             const spectral::EigOptions& opts = {});

/// m needed for B <= (m/2)(1 + beta) w.h.p.: 4 e^2 C(n,k) log C(n,l) / (beta^2 d_l).
std::uint64_t clauses_for_refutation(std::uint32_t n, std::uint32_t k, std::uint32_t ell,
                                     double beta);

// "p kxor n m k" header, then one line per clause: k 1-based indices, then +1 or -1.
void write_formula(std::ostream& out, const XorFormula& f);
XorFormula read_formula(std::istream& in);
void write_formula_file(const std::filesystem::path& path, const XorFormula& f);
XorFormula read_formula_file(const std::filesystem::path& path);

}  // namespace kikuchi::xor_sat

// kikuchi: command-line front end for generation, detection, recovery,
// refutation, certification, exact spectra and seeded sweeps.
//
// Exit codes: 0 success, 2 invalid parameters or config, 3 capacity, 1 other.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kikuchi/detect_recover.hpp"
#include "kikuchi/error.hpp"
#include "kikuchi/harness.hpp"
#include "kikuchi/johnson.hpp"
#include "kikuchi/odd_certifier.hpp"
#include "kikuchi/tensor_model.hpp"
#include "kikuchi/xor_refute.hpp"

using namespace kikuchi;
using nlohmann::json;

namespace {

struct SolverFlags {
  double tol = 1e-8;
  std::uint64_t max_iters = 0;
  std::uint64_t seed = spectral::EigOptions{}.seed;
  bool magnitude = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tol", tol, "relative residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", max_iters, "matvec budget (0: automatic)");
    cmd->add_option("--seed", seed, "solver start-vector seed");
  }
  spectral::EigOptions options() const {
    spectral::EigOptions o;
    o.tol = tol;
    o.max_iters = max_iters;
    o.seed = seed;
    o.want = magnitude ? spectral::Want::LeadingByMagnitude : spectral::Want::LeadingByValue;
    return o;
  }
};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

model::SpikePrior prior_from(const std::string& name) {
  if (name == "rademacher") return model::SpikePrior::rademacher();
  if (name == "sphere") return model::SpikePrior::sphere_uniform();
  throw ParameterError("unknown prior '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral algorithms for tensor PCA built on symmetric-difference matrices"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a random instance");
  std::string gen_type = "spiked", gen_out, gen_dense_out, gen_prior = "rademacher";
  std::uint32_t gen_n = 16, gen_p = 4, gen_k = 2;
  std::uint64_t gen_m = 0, gen_seed = 0;
  double gen_lambda = 1.0;
  bool gen_hide_spike = false;
  gen->add_option("--type", gen_type, "spiked | xor | rademacher-tensor")
      ->check(CLI::IsMember({"spiked", "xor", "rademacher-tensor"}));
  gen->add_option("--n", gen_n, "dimension");
  gen->add_option("--p", gen_p, "tensor order");
  gen->add_option("--lambda", gen_lambda, "signal strength (spiked)");
  gen->add_option("--prior", gen_prior, "rademacher | sphere");
  gen->add_option("--k", gen_k, "clause arity (xor)");
  gen->add_option("--m", gen_m, "clause count (xor)");
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--out", gen_out, "output file")->required();
  gen->add_option("--dense-out", gen_dense_out, "also write the dense symmetric tensor (spiked)");
  gen->add_flag("--hide-spike", gen_hide_spike, "omit the planted vector from the instance file");

  // detect
  auto* det = app.add_subcommand("detect", "threshold test on the top eigenvalue");
  std::string det_in;
  std::uint32_t det_ell = 0;
  double det_lambda = 0.0;
  SolverFlags det_solver;
  det->add_option("--instance", det_in, "instance file")->required();
  det->add_option("--ell", det_ell, "level l")->required();
  det->add_option("--lambda", det_lambda, "tested signal strength (default: the instance's)");
  det_solver.attach(det);

  // recover
  auto* rec = app.add_subcommand("recover", "estimate the planted vector");
  std::string rec_in;
  std::uint32_t rec_ell = 0;
  SolverFlags rec_solver;
  rec->add_option("--instance", rec_in, "instance file")->required();
  rec->add_option("--ell", rec_ell, "level l")->required();
  rec->add_flag("--by-magnitude", rec_solver.magnitude, "use the eigenvalue of largest magnitude");
  rec_solver.attach(rec);

  // refute-xor
  auto* ref = app.add_subcommand("refute-xor", "certify an upper bound on satisfiable clauses");
  std::string ref_in;
  std::uint32_t ref_ell = 1;
  double ref_beta = 0.0;
  SolverFlags ref_solver;
  ref->add_option("--formula", ref_in, "formula file")->required();
  ref->add_option("--ell", ref_ell, "level l");
  ref->add_option("--beta", ref_beta, "report whether bound <= (m/2)(1 + beta)");
  ref_solver.attach(ref);

  // certify-odd
  auto* cert = app.add_subcommand("certify-odd", "bound the Rademacher injective norm");
  std::string cert_in;
  std::uint32_t cert_ell = 2;
  std::uint64_t cert_cap = odd::LiftedOperator::kDefaultDimCap;
  bool cert_brute = false;
  SolverFlags cert_solver;
  cert->add_option("--tensor", cert_in, "dense tensor file")->required();
  cert->add_option("--ell", cert_ell, "level l");
  cert->add_option("--dim-cap", cert_cap, "largest n^l accepted");
  cert->add_flag("--brute-force", cert_brute, "also compute the exact norm (n <= 24)");
  cert_solver.attach(cert);

  // spectrum
  auto* spec = app.add_subcommand("spectrum", "exact eigenvalues of the Johnson-scheme graph");
  std::uint32_t spec_n = 0, spec_ell = 0, spec_p = 0;
  spec->add_option("--n", spec_n, "dimension")->required();
  spec->add_option("--ell", spec_ell, "level l")->required();
  spec->add_option("--p", spec_p, "even order")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a seeded experiment grid");
  std::string sweep_config, sweep_out;
  std::uint64_t sweep_seed = 0;
  sweep->add_option("--config", sweep_config, "JSON config")->required();
  auto* seed_opt = sweep->add_option("--seed", sweep_seed, "override the master seed");
  sweep->add_option("--out", sweep_out, "override the CSV path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      if (gen_type == "spiked") {
        model::GenerateOptions go;
        go.dense = !gen_dense_out.empty();
        const auto inst = model::generate(gen_n, gen_p, gen_lambda, prior_from(gen_prior), gen_seed, go);
        model::write_instance_file(gen_out, inst, !gen_hide_spike);
        if (go.dense) model::write_dense_file(gen_dense_out, *inst.dense);
      } else if (gen_type == "xor") {
        xor_sat::write_formula_file(gen_out, xor_sat::random_formula(gen_n, gen_k, gen_m, gen_seed));
      } else {
        model::write_dense_file(gen_out, odd::random_rademacher_tensor(gen_n, gen_p, gen_seed));
      }
    } else if (det->parsed()) {
      const auto inst = model::read_instance_file(det_in);
      const double lambda = det_lambda > 0.0 ? det_lambda : inst.lambda;
      const auto r = detect(inst.tensor, det_ell, lambda, det_solver.options());
      json j = {{"lambda_max", r.lambda_max}, {"threshold", r.threshold},
                {"verdict", r.planted ? "planted" : "null"}, {"residual", r.residual},
                {"converged", r.converged}, {"inconclusive", r.inconclusive},
                {"matvecs", r.matvecs}};
      std::cout << j.dump() << '\n';
    } else if (rec->parsed()) {
      const auto inst = model::read_instance_file(rec_in);
      const auto r = recover(inst.tensor, rec_ell, rec_solver.options(), inst.spike);
      json j = {{"estimate", r.estimate}, {"corr", optional_json(r.corr)},
                {"spectral_value", r.spectral_value}, {"residual", r.residual},
                {"converged", r.converged}, {"degenerate", r.degenerate}};
      std::cout << j.dump() << '\n';
    } else if (ref->parsed()) {
      const auto f = xor_sat::read_formula_file(ref_in);
      const auto c = xor_sat::refute(f, ref_ell, ref_solver.options());
      const double m = static_cast<double>(c.m);
      json j = {{"m", c.m}, {"bound", c.bound},
                {"ratio", c.m ? c.bound / m : std::numeric_limits<double>::quiet_NaN()},
                {"converged", c.converged}, {"used_row_sum", c.used_row_sum}};
      if (ref_beta > 0.0) j["refuted"] = c.bound <= m / 2.0 * (1.0 + ref_beta);
      std::cout << j.dump() << '\n';
    } else if (cert->parsed()) {
      const auto y = model::read_dense_file(cert_in);
      const auto c = odd::certify_rademacher_norm(y, cert_ell, cert_solver.options(), cert_cap);
      json j = {{"bound", c.bound}, {"norm_estimate", c.norm_estimate}, {"residual", c.residual},
                {"converged", c.converged}, {"used_row_sum", c.used_row_sum}};
      if (cert_brute) j["brute_force"] = odd::brute_force_rademacher_norm(y);
      std::cout << j.dump() << '\n';
    } else if (spec->parsed()) {
      const auto s = johnson::spectrum(spec_n, spec_ell, spec_p);
      std::cout << "m,mu,dim\n";
      for (std::size_t m = 0; m < s.eigenvalues.size(); ++m) {
        std::cout << m << ',' << s.eigenvalues[m] << ',' << s.dims[m] << '\n';
      }
    } else if (sweep->parsed()) {
      auto config = harness::load_config(sweep_config);
      if (seed_opt->count()) config.seed = sweep_seed;
      if (!sweep_out.empty()) config.output = sweep_out;
      harness::validate(config);
      std::vector<harness::TrialRecord> records;
      if (config.output.empty() || config.output == "-") {
        records = harness::run_sweep(config, &std::cout);
      } else {
        std::ofstream out(config.output);
        if (!out) throw FormatError("cannot open " + config.output + " for writing");
        records = harness::run_sweep(config, &out);
      }
      for (const auto& s : harness::summarize(records)) {
        json j = {{"task", harness::task_name(s.cell.task)}, {"n", s.cell.n}, {"p", s.cell.p},
                  {"k", s.cell.k}, {"ell", s.cell.ell}, {"lambda", s.cell.lambda},
                  {"m", s.cell.m}, {"planted", s.cell.planted}, {"trials", s.trials},
                  {"errors", s.errors}, {"success_rate", s.success_rate}};
        if (!std::isnan(s.mean_corr)) j["mean_corr"] = s.mean_corr;
        if (!std::isnan(s.q50)) j["quantiles"] = {s.q10, s.q50, s.q90};
        std::cerr << j.dump() << '\n';
      }
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return 3;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "kikuchi/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "kikuchi/combinat.hpp"
#include "kikuchi/detect_recover.hpp"
#include "kikuchi/error.hpp"
#include "kikuchi/johnson.hpp"
#include "kikuchi/odd_certifier.hpp"
#include "kikuchi/rng.hpp"
#include "kikuchi/tensor_model.hpp"
#include "kikuchi/xor_refute.hpp"

namespace kikuchi::harness {
namespace {

using nlohmann::json;

constexpr std::uint64_t kMaxMatrixDim = 50'000'000;

struct TaskEntry {
  Task task;
  std::string_view name;
};
constexpr TaskEntry kTasks[] = {
    {Task::Detect, "detect"},         {Task::Recover, "recover"},
    {Task::RefuteXor, "refute-xor"},  {Task::CertifyOdd, "certify-odd"},
    {Task::Spectrum, "spectrum"},     {Task::BaselineCompare, "baseline-compare"},
};

template <class T>
std::vector<T> read_list(const json& grid, const char* key) {
  if (!grid.contains(key)) return {};
  const json& v = grid.at(key);
  if (!v.is_array()) throw FormatError(std::string("grid.") + key + " must be a list");
  try {
    return v.get<std::vector<T>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("grid.") + key + ": " + e.what());
  }
}

template <class T>
std::vector<T> or_default(const std::vector<T>& v, T fallback) {
  return v.empty() ? std::vector<T>{fallback} : v;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

bool same_cell(const Cell& a, const Cell& b) {
  return a.task == b.task && a.n == b.n && a.p == b.p && a.k == b.k && a.ell == b.ell &&
         a.lambda == b.lambda && a.m == b.m && a.beta == b.beta && a.planted == b.planted;
}

model::SpikePrior make_prior(const std::string& name) {
  if (name == "rademacher") return model::SpikePrior::rademacher();
  if (name == "sphere") return model::SpikePrior::sphere_uniform();
  throw ParameterError("unknown prior '" + name + "' (expected rademacher or sphere)");
}

void require_level(const Cell& c, std::uint32_t order) {
  KIKUCHI_REQUIRE(order >= 1 && order <= c.n, ParameterError,
                  "order " + std::to_string(order) + " must lie in [1, n]");
  const std::uint32_t lo = order / 2, hi = (order + 1) / 2;
  KIKUCHI_REQUIRE(c.ell >= lo && c.ell + hi <= c.n, ParameterError,
                  "l = " + std::to_string(c.ell) + " outside the valid range for n = " +
                      std::to_string(c.n) + ", order " + std::to_string(order));
  if (!combinat::binom_fits(static_cast<int>(c.n), static_cast<int>(c.ell + 1)) ||
      combinat::binom(static_cast<int>(c.n), static_cast<int>(c.ell)) > kMaxMatrixDim ||
      combinat::binom(static_cast<int>(c.n), static_cast<int>(order)) > kMaxMatrixDim) {
    throw CapacityError("cell n = " + std::to_string(c.n) + ", l = " + std::to_string(c.ell) +
                        " is beyond the supported matrix size");
  }
}

// max_x P(x) by enumeration; n <= 20.
std::uint64_t brute_force_xor(const xor_sat::XorFormula& f) {
  std::vector<std::uint32_t> masks;
  masks.reserve(f.size());
  for (const auto& c : f.clauses) {
    std::uint32_t m = 0;
    for (std::uint32_t v : c.vars) m |= 1U << v;
    masks.push_back(m);
  }
  std::uint64_t best = 0;
  for (std::uint32_t x = 0; x < (1U << f.n); ++x) {
    std::uint64_t sat = 0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
      const int parity = __builtin_popcount(x & masks[i]) & 1;
      sat += (parity ? -1 : 1) == f.clauses[i].rhs;
    }
    best = std::max(best, sat);
  }
  return best;
}

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

}  // namespace

std::string_view task_name(Task t) {
  for (const auto& e : kTasks) {
    if (e.task == t) return e.name;
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  for (const auto& e : kTasks) {
    if (e.name == name) return e.task;
  }
  throw ParameterError("unknown task '" + std::string(name) + "'");
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  static const std::vector<std::string> known = {"schema", "task", "grid",           "trials", "seed",
                                                 "eig",    "prior", "corr_threshold", "output"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw FormatError("unknown config key '" + key + "'");
    }
  }
  ExperimentConfig c;
  try {
    c.schema = j.value("schema", 0);
    if (!j.contains("task")) throw FormatError("config needs a 'task'");
    c.task = parse_task(j.at("task").get<std::string>());
    c.trials = j.value("trials", 1U);
    c.seed = j.value("seed", std::uint64_t{0});
    c.prior = j.value("prior", std::string("rademacher"));
    c.corr_threshold = j.value("corr_threshold", 0.9);
    c.output = j.value("output", std::string());
    if (j.contains("eig")) {
      const json& e = j.at("eig");
      c.eig.tol = e.value("tol", c.eig.tol);
      c.eig.max_iters = e.value("max_iters", c.eig.max_iters);
      c.eig.seed = e.value("seed", c.eig.seed);
      const std::string want = e.value("want", std::string("value"));
      if (want == "value") {
        c.eig.want = spectral::Want::LeadingByValue;
      } else if (want == "magnitude") {
        c.eig.want = spectral::Want::LeadingByMagnitude;
      } else {
        throw FormatError("eig.want must be 'value' or 'magnitude'");
      }
    }
    const json grid = j.value("grid", json::object());
    static const std::vector<std::string> grid_keys = {"n", "p", "ell",  "lambda",
                                                       "planted", "k", "m", "beta"};
    for (const auto& [key, _] : grid.items()) {
      if (std::find(grid_keys.begin(), grid_keys.end(), key) == grid_keys.end()) {
        throw FormatError("unknown grid key '" + key + "'");
      }
    }
    c.grid.n = read_list<std::uint32_t>(grid, "n");
    c.grid.p = read_list<std::uint32_t>(grid, "p");
    c.grid.ell = read_list<std::uint32_t>(grid, "ell");
    c.grid.lambda = read_list<double>(grid, "lambda");
    c.grid.planted = read_list<bool>(grid, "planted");
    c.grid.k = read_list<std::uint32_t>(grid, "k");
    c.grid.m = read_list<std::uint64_t>(grid, "m");
    c.grid.beta = read_list<double>(grid, "beta");
  } catch (const json::exception& e) {
    throw FormatError(std::string("config field has the wrong type: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = c.schema;
  j["task"] = task_name(c.task);
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["prior"] = c.prior;
  j["corr_threshold"] = c.corr_threshold;
  j["eig"] = {{"tol", c.eig.tol},
              {"max_iters", c.eig.max_iters},
              {"seed", c.eig.seed},
              {"want", c.eig.want == spectral::Want::LeadingByValue ? "value" : "magnitude"}};
  json g = json::object();
  if (!c.grid.n.empty()) g["n"] = c.grid.n;
  if (!c.grid.p.empty()) g["p"] = c.grid.p;
  if (!c.grid.ell.empty()) g["ell"] = c.grid.ell;
  if (!c.grid.lambda.empty()) g["lambda"] = c.grid.lambda;
  if (!c.grid.planted.empty()) g["planted"] = c.grid.planted;
  if (!c.grid.k.empty()) g["k"] = c.grid.k;
  if (!c.grid.m.empty()) g["m"] = c.grid.m;
  if (!c.grid.beta.empty()) g["beta"] = c.grid.beta;
  j["grid"] = g;
  return j.dump();
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + 16, hash_string(canonical_json(config)), 16);
  std::string hex(buf, res.ptr);
  return std::string(16 - hex.size(), '0') + hex;
}

std::vector<Cell> expand(const ExperimentConfig& config) {
  const Grid& g = config.grid;
  std::vector<Cell> cells;
  for (auto n : or_default<std::uint32_t>(g.n, 0))
    for (auto p : or_default<std::uint32_t>(g.p, 0))
      for (auto k : or_default<std::uint32_t>(g.k, 0))
        for (auto ell : or_default<std::uint32_t>(g.ell, 0))
          for (auto lambda : or_default<double>(g.lambda, 0.0))
            for (auto m : or_default<std::uint64_t>(g.m, 0))
              for (auto beta : or_default<double>(g.beta, 0.0))
                for (bool planted : or_default<bool>(g.planted, true)) {
                  Cell c{config.task, n, p, k, ell, lambda, m, beta, planted};
                  if (c.task == Task::RefuteXor && c.m == 0 && beta > 0.0 && k >= 2 &&
                      k % 2 == 0 && ell >= k / 2 && ell + k / 2 <= n) {
                    c.m = xor_sat::clauses_for_refutation(n, k, ell, beta);
                  }
                  cells.push_back(c);
                }
  return cells;
}

void validate(const ExperimentConfig& config) {
  KIKUCHI_REQUIRE(config.schema == 1, ParameterError,
                  "unsupported config schema " + std::to_string(config.schema));
  KIKUCHI_REQUIRE(config.trials >= 1, ParameterError, "trials must be at least 1");
  KIKUCHI_REQUIRE(config.eig.tol > 0.0, ParameterError, "eig.tol must be positive");
  KIKUCHI_REQUIRE(config.corr_threshold >= 0.0 && config.corr_threshold <= 1.0, ParameterError,
                  "corr_threshold must lie in [0, 1]");
  KIKUCHI_REQUIRE(!config.grid.n.empty(), ParameterError, "grid.n is required");
  make_prior(config.prior);

  const Grid& g = config.grid;
  auto unused = [&](bool present, const char* key) {
    KIKUCHI_REQUIRE(!present, ParameterError,
                    std::string("grid.") + key + " is not used by task " +
                        std::string(task_name(config.task)));
  };
  const bool xor_task = config.task == Task::RefuteXor;
  unused(xor_task && !g.p.empty(), "p");
  unused(!xor_task && !g.k.empty(), "k");
  unused(!xor_task && !g.m.empty(), "m");
  unused(!xor_task && !g.beta.empty(), "beta");
  unused(config.task != Task::Detect && !g.planted.empty(), "planted");
  unused((xor_task || config.task == Task::CertifyOdd || config.task == Task::Spectrum) &&
             !g.lambda.empty(),
         "lambda");

  for (const Cell& c : expand(config)) {
    switch (c.task) {
      case Task::Detect:
        KIKUCHI_REQUIRE(c.p >= 2 && c.p % 2 == 0, ParameterError, "detect needs an even p");
        require_level(c, c.p);
        KIKUCHI_REQUIRE(c.lambda > 0.0, ParameterError, "detect needs a positive lambda");
        break;
      case Task::Recover:
        KIKUCHI_REQUIRE(c.p >= 2, ParameterError, "recover needs p >= 2");
        require_level(c, c.p);
        KIKUCHI_REQUIRE(c.lambda >= 0.0, ParameterError, "lambda must be nonnegative");
        break;
      case Task::RefuteXor:
        KIKUCHI_REQUIRE(c.k >= 2 && c.k % 2 == 0, ParameterError, "refute-xor needs an even k");
        require_level(c, c.k);
        KIKUCHI_REQUIRE(c.beta >= 0.0, ParameterError, "beta must be nonnegative");
        KIKUCHI_REQUIRE(c.m > 0, ParameterError, "refute-xor needs m > 0 or beta > 0");
        break;
      case Task::CertifyOdd: {
        KIKUCHI_REQUIRE(c.p >= 3 && c.p % 2 == 1, ParameterError, "certify-odd needs an odd p >= 3");
        KIKUCHI_REQUIRE(c.ell >= c.p - 1, ParameterError, "certify-odd needs l >= p - 1");
        double dim = std::pow(static_cast<double>(c.n), c.ell);
        if (dim > static_cast<double>(odd::LiftedOperator::kDefaultDimCap)) {
          throw CapacityError("certify-odd cell has n^l above the dimension cap");
        }
        break;
      }
      case Task::Spectrum:
        KIKUCHI_REQUIRE(c.p >= 2 && c.p % 2 == 0, ParameterError, "spectrum needs an even p");
        require_level(c, c.p);
        break;
      case Task::BaselineCompare:
        KIKUCHI_REQUIRE(c.p == 3, ParameterError, "baseline-compare is defined for p = 3");
        require_level(c, c.p);
        KIKUCHI_REQUIRE(c.lambda >= 0.0, ParameterError, "lambda must be nonnegative");
        break;
    }
  }
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell_index, std::uint32_t trial) {
  return CounterRng(master).derive("cell", cell_index).derive("trial", trial).key();
}

TrialRecord run_trial(const ExperimentConfig& config, const Cell& cell, std::uint64_t cell_index,
                      std::uint32_t trial) {
  TrialRecord r;
  r.cell = cell;
  r.trial = trial;
  r.seed = trial_seed(config.seed, cell_index, trial);
  spectral::EigOptions eig = config.eig;
  eig.seed = hash_combine(config.eig.seed, r.seed);

  const auto start = std::chrono::steady_clock::now();
  try {
    switch (cell.task) {
      case Task::Detect: {
        const double generated = cell.planted ? cell.lambda : 0.0;
        const auto inst = model::generate(cell.n, cell.p, generated, make_prior(config.prior), r.seed);
        const auto rep = detect(inst.tensor, cell.ell, cell.lambda, eig);
        r.verdict = rep.planted ? "planted" : "null";
        r.lambda_max = rep.lambda_max;
        r.threshold = rep.threshold;
        r.residual = rep.residual;
        r.converged = rep.converged;
        r.success = rep.planted == cell.planted;
        break;
      }
      case Task::Recover: {
        const auto inst = model::generate(cell.n, cell.p, cell.lambda, make_prior(config.prior), r.seed);
        const auto rep = recover(inst.tensor, cell.ell, eig, inst.spike);
        r.lambda_max = rep.spectral_value;
        r.corr = rep.corr;
        r.residual = rep.residual;
        r.converged = rep.converged;
        r.success = rep.corr && *rep.corr >= config.corr_threshold;
        break;
      }
      case Task::RefuteXor: {
        const auto f = xor_sat::random_formula(cell.n, cell.k, cell.m, r.seed);
        const auto cert = xor_sat::refute(f, cell.ell, eig);
        r.lambda_max = cert.norm_estimate;
        r.bound = cert.bound;
        r.ratio = cert.bound / static_cast<double>(cell.m);
        r.residual = cert.residual;
        r.converged = cert.converged;
        if (cell.n <= 16) r.brute = static_cast<double>(brute_force_xor(f));
        if (cell.beta > 0.0) {
          r.success = cert.bound <= static_cast<double>(cell.m) / 2.0 * (1.0 + cell.beta);
        } else {
          r.success = !r.brute || cert.bound >= *r.brute;
        }
        break;
      }
      case Task::CertifyOdd: {
        const auto y = odd::random_rademacher_tensor(cell.n, cell.p, r.seed);
        const auto cert = odd::certify_rademacher_norm(y, cell.ell, eig);
        r.lambda_max = cert.norm_estimate;
        r.bound = cert.bound;
        r.residual = cert.residual;
        r.converged = cert.converged;
        if (cell.n <= 16) r.brute = odd::brute_force_rademacher_norm(y);
        r.success = r.brute ? cert.bound >= *r.brute : true;
        break;
      }
      case Task::Spectrum: {
        const auto s = johnson::spectrum(cell.n, cell.ell, cell.p);
        auto ones = model::SubsetTensor::zeros(cell.n, cell.p);
        std::fill(ones.entries.begin(), ones.entries.end(), 1.0);
        const auto top =
            spectral::leading_eig(KikuchiMatrix::build(ones, cell.ell).as_symmetric_operator(), eig);
        const double mu0 = static_cast<double>(s.eigenvalues[0]);
        double second = 0.0;
        for (std::size_t m = 1; m < s.eigenvalues.size(); ++m) {
          second = std::max(second, std::abs(static_cast<double>(s.eigenvalues[m])));
        }
        r.lambda_max = top.value;
        r.threshold = mu0;
        r.ratio = second / mu0;
        r.residual = top.residual;
        r.converged = top.converged;
        r.success = std::abs(top.value - mu0) <= 1e-6 * mu0;
        break;
      }
      case Task::BaselineCompare: {
        model::GenerateOptions gen;
        gen.dense = true;
        const auto inst =
            model::generate(cell.n, cell.p, cell.lambda, make_prior(config.prior), r.seed, gen);
        const auto rep = recover(inst.tensor, cell.ell, eig, inst.spike);
        const auto unfolded = model::tensor_unfold(*inst.dense, eig);
        r.lambda_max = rep.spectral_value;
        r.corr = rep.corr;
        r.corr_baseline = model::correlation(unfolded, inst.spike);
        r.residual = rep.residual;
        r.converged = rep.converged;
        r.success = rep.corr && *rep.corr >= config.corr_threshold;
        break;
      }
    }
    if (!r.converged) r.status = "unconverged";
  } catch (const std::exception& e) {
    r.status = "error: " + sanitize(e.what());
    r.success = false;
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<TrialRecord> run_sweep(const ExperimentConfig& config, std::ostream* csv) {
  validate(config);
  const auto cells = expand(config);
  std::vector<TrialRecord> all;
  all.reserve(cells.size() * config.trials);
  if (csv) write_csv_header(*csv, config);
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    std::vector<TrialRecord> batch(config.trials);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(config.trials); ++t) {
      batch[t] = run_trial(config, cells[ci], ci, static_cast<std::uint32_t>(t));
    }
    for (auto& rec : batch) {
      if (csv) write_csv_row(*csv, rec);
      all.push_back(std::move(rec));
    }
    if (csv) csv->flush();
  }
  return all;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "task",  "n",         "p",      "k",      "ell",           "lambda",   "m",
      "beta",  "planted",   "trial",  "seed",   "status",        "verdict",  "lambda_max",
      "threshold", "corr",  "corr_baseline",    "bound",         "ratio",    "brute",
      "residual",  "converged", "success",      "wall_ms"};
  return cols;
}

void write_csv_header(std::ostream& out, const ExperimentConfig& config) {
  out << "# config-hash: " << config_hash(config) << '\n';
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const TrialRecord& r) {
  const Cell& c = r.cell;
  out << task_name(c.task) << ',' << c.n << ',' << c.p << ',' << c.k << ',' << c.ell << ','
      << format_double(c.lambda) << ',' << c.m << ',' << format_double(c.beta) << ','
      << (c.planted ? 1 : 0) << ',' << r.trial << ',' << r.seed << ',' << r.status << ','
      << r.verdict << ',' << format_optional(r.lambda_max) << ',' << format_optional(r.threshold)
      << ',' << format_optional(r.corr) << ',' << format_optional(r.corr_baseline) << ','
      << format_optional(r.bound) << ',' << format_optional(r.ratio) << ','
      << format_optional(r.brute) << ',' << format_optional(r.residual) << ','
      << (r.converged ? 1 : 0) << ',' << (r.success ? 1 : 0) << ',' << format_double(r.wall_ms)
      << '\n';
}

double quantile(std::vector<double> values, double q) {
  KIKUCHI_REQUIRE(!values.empty(), ParameterError, "quantile of an empty sample");
  KIKUCHI_REQUIRE(q >= 0.0 && q <= 1.0, ParameterError, "quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records) {
  KIKUCHI_REQUIRE(!records.empty(), ParameterError, "nothing to summarize");
  std::vector<CellSummary> out;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    while (j < records.size() && same_cell(records[j].cell, records[i].cell)) ++j;
    CellSummary s;
    s.cell = records[i].cell;
    s.trials = j - i;
    std::size_t wins = 0;
    double corr_sum = 0.0;
    std::size_t corr_count = 0;
    std::vector<double> headline;
    for (std::size_t t = i; t < j; ++t) {
      const auto& r = records[t];
      if (r.status.rfind("error", 0) == 0) ++s.errors;
      wins += r.success;
      if (r.corr) {
        corr_sum += *r.corr;
        ++corr_count;
      }
      std::optional<double> v;
      switch (s.cell.task) {
        case Task::Detect:
        case Task::Spectrum: v = r.lambda_max; break;
        case Task::Recover:
        case Task::BaselineCompare: v = r.corr; break;
        case Task::RefuteXor: v = r.ratio; break;
        case Task::CertifyOdd: v = r.bound; break;
      }
      if (v) headline.push_back(*v);
    }
    s.success_rate = static_cast<double>(wins) / static_cast<double>(s.trials);
    s.mean_corr = corr_count ? corr_sum / static_cast<double>(corr_count)
                             : std::numeric_limits<double>::quiet_NaN();
    if (headline.empty()) {
      s.q10 = s.q50 = s.q90 = std::numeric_limits<double>::quiet_NaN();
    } else {
      s.q10 = quantile(headline, 0.1);
      s.q50 = quantile(headline, 0.5);
      s.q90 = quantile(headline, 0.9);
    }
    out.push_back(s);
    i = j;
  }
  return out;
}

}  // namespace kikuchi::harness

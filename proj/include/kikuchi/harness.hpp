#pragma once

// Seeded parameter sweeps over the library's algorithms, CSV output, and
// per-cell aggregation.
//
// A config is JSON:
//   {"schema": 1, "task": "detect",
//    "grid": {"n": [24], "p": [4], "ell": [2], "lambda": [0.6], "planted": [true, false]},
//    "trials": 50, "seed": 7, "prior": "rademacher", "corr_threshold": 0.9,
//    "eig": {"tol": 1e-8, "max_iters": 0, "want": "value"}, "output": "out.csv"}
// Grid keys: n, p, ell, lambda, planted, k, m, beta. Missing keys take one
// default value. Cells are the Cartesian product in that key order.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kikuchi/spectral.hpp"

namespace kikuchi::harness {

enum class Task { Detect, Recover, RefuteXor, CertifyOdd, Spectrum, BaselineCompare };

std::string_view task_name(Task t);
Task parse_task(std::string_view name);

struct Grid {
  std::vector<std::uint32_t> n;
  std::vector<std::uint32_t> p;
  std::vector<std::uint32_t> ell;
  std::vector<double> lambda;
  std::vector<bool> planted;
  std::vector<std::uint32_t> k;
  /// Clause counts for refute-xor; 0 means "derive from beta".
  std::vector<std::uint64_t> m;
  std::vector<double> beta;
};

struct ExperimentConfig {
  int schema = 1;
  Task task = Task::Detect;
  Grid grid;
  std::uint32_t trials = 1;
  std::uint64_t seed = 0;
  spectral::EigOptions eig;
  /// "rademacher" or "sphere".
  std::string prior = "rademacher";
  double corr_threshold = 0.9;
  std::string output;
};

/// Throws FormatError on malformed JSON or unknown keys.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Sorted-key JSON of everything except `output`.
std::string canonical_json(const ExperimentConfig& config);
/// 16 hex digits of a hash of canonical_json.
std::string config_hash(const ExperimentConfig& config);

struct Cell {
  Task task = Task::Detect;
  std::uint32_t n = 0, p = 0, k = 0, ell = 0;
  double lambda = 0.0;
  std::uint64_t m = 0;
  double beta = 0.0;
  bool planted = true;
};

/// Cells in output order. `m` is already resolved from beta where needed.
std::vector<Cell> expand(const ExperimentConfig& config);

/// Checks every cell against the preconditions of its task. Throws
/// ParameterError, or CapacityError when a cell is too large to run.
void validate(const ExperimentConfig& config);

struct TrialRecord {
  Cell cell;
  std::uint32_t trial = 0;
  std::uint64_t seed = 0;
  /// "ok", "unconverged", or "error: <message>".
  std::string status = "ok";
  /// Detection verdict ("planted" / "null") or empty.
  std::string verdict;
  std::optional<double> lambda_max, threshold, corr, corr_baseline, bound, ratio, brute, residual;
  bool converged = false;
  /// Task-specific success: correct verdict, corr >= threshold, bound <= (m/2)(1 + beta),
  /// or bound >= brute force.
  bool success = false;
  double wall_ms = 0.0;
};

/// Derived seed for (cell index, trial); a pure function of the master seed.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell_index, std::uint32_t trial);

TrialRecord run_trial(const ExperimentConfig& config, const Cell& cell, std::uint64_t cell_index,
                      std::uint32_t trial);

/// Validates, then runs every (cell, trial); trials of a cell in parallel.
/// When `csv` is given, rows are written in (cell, trial) order as each cell
/// finishes. Per-trial exceptions become error rows.
std::vector<TrialRecord> run_sweep(const ExperimentConfig& config, std::ostream* csv = nullptr);

/// Fixed column order; wall_ms is last.
const std::vector<std::string>& csv_columns();
void write_csv_header(std::ostream& out, const ExperimentConfig& config);
void write_csv_row(std::ostream& out, const TrialRecord& record);

struct CellSummary {
  Cell cell;
  std::size_t trials = 0;
  std::size_t errors = 0;
  double success_rate = 0.0;
  /// Over records carrying the value; NaN when none do.
  double mean_corr = 0.0;
  /// Quantiles of the task's headline value: lambda_max (detect, spectrum),
  /// corr (recover, baseline-compare), ratio (refute-xor), bound (certify-odd).
  double q10 = 0.0, q50 = 0.0, q90 = 0.0;
};

/// Groups consecutive records by cell. Throws ParameterError on empty input.
std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records);

/// Linear interpolation between order statistics (type 7). Throws on empty input.
double quantile(std::vector<double> values, double q);

}  // namespace kikuchi::harness

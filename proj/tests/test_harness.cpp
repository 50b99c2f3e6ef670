#include <cmath>
#include <sstream>

#include "doctest.h"
#include "kikuchi/error.hpp"
#include "kikuchi/harness.hpp"

using namespace kikuchi;
using namespace kikuchi::harness;

namespace {

const char* kDetect = R"({"schema": 1, "task": "detect",
  "grid": {"n": [10], "p": [4], "ell": [2], "lambda": [1.5], "planted": [true, false]},
  "trials": 4, "seed": 11})";

std::string sweep_csv(const ExperimentConfig& c) {
  std::ostringstream out;
  run_sweep(c, &out);
  return out.str();
}

// Drops the trailing wall_ms column, which is the only nondeterministic one.
std::string strip_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      out += line + '\n';
      continue;
    }
    out += line.substr(0, line.rfind(',')) + '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing and defaults") {
  const auto c = parse_config(kDetect);
  CHECK(c.task == Task::Detect);
  CHECK(c.trials == 4);
  CHECK(c.grid.planted == std::vector<bool>{true, false});
  CHECK(c.eig.want == spectral::Want::LeadingByValue);
  CHECK(expand(c).size() == 2);
  CHECK(config_hash(c).size() == 16);
  auto d = c;
  d.output = "elsewhere.csv";
  CHECK(config_hash(d) == config_hash(c));
  d.seed = 12;
  CHECK(config_hash(d) != config_hash(c));
}

TEST_CASE("malformed configs") {
  CHECK_THROWS_AS(parse_config("{"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"task": "detect", "colour": 1})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"task": "detect", "grid": {"q": [1]}})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"task": "detect", "trials": "many"})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"task": "detect", "eig": {"want": "smallest"}})"), FormatError);
  CHECK_THROWS_AS(parse_config(R"({"task": "dance"})"), ParameterError);
}

TEST_CASE("validation rejects bad cells") {
  auto bad = [](const char* text) { validate(parse_config(text)); };
  CHECK_THROWS_AS(bad(R"({"schema": 2, "task": "detect", "grid": {"n": [8], "p": [4], "ell": [2], "lambda": [1]}})"),
                  ParameterError);
  CHECK_THROWS_AS(bad(R"({"schema": 1, "task": "detect", "grid": {"n": [8], "p": [3], "ell": [2], "lambda": [1]}})"),
                  ParameterError);
  CHECK_THROWS_AS(bad(R"({"schema": 1, "task": "detect", "grid": {"n": [8], "p": [4], "ell": [7], "lambda": [1]}})"),
                  ParameterError);
  CHECK_THROWS_AS(bad(R"({"schema": 1, "task": "recover", "grid": {"n": [8], "p": [4], "ell": [2], "k": [2]}})"),
                  ParameterError);
  CHECK_THROWS_AS(bad(R"({"schema": 1, "task": "refute-xor", "grid": {"n": [8], "k": [2], "ell": [1]}})"),
                  ParameterError);
  CHECK_THROWS_AS(bad(R"({"schema": 1, "task": "certify-odd", "grid": {"n": [40], "p": [3], "ell": [4]}})"),
                  CapacityError);
  CHECK_NOTHROW(bad(kDetect));
}

TEST_CASE("one-cell sweep writes one row per trial") {
  const auto c = parse_config(kDetect);
  const auto csv = sweep_csv(c);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# config-hash: " + config_hash(c));
  std::getline(in, line);
  CHECK(line.rfind("task,n,p,k,ell,lambda,", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("detect,10,4,", 0) == 0);
  }
  CHECK(rows == 8);
}

TEST_CASE("sweeps are deterministic") {
  const auto c = parse_config(kDetect);
  CHECK(strip_timing(sweep_csv(c)) == strip_timing(sweep_csv(c)));
  CHECK(trial_seed(1, 0, 0) != trial_seed(1, 0, 1));
  CHECK(trial_seed(1, 0, 1) != trial_seed(1, 1, 0));
  CHECK(trial_seed(1, 2, 3) == trial_seed(1, 2, 3));
}

TEST_CASE("every task runs") {
  const char* configs[] = {
      R"({"schema": 1, "task": "recover", "grid": {"n": [8], "p": [4], "ell": [2], "lambda": [5]}, "trials": 2})",
      R"({"schema": 1, "task": "refute-xor", "grid": {"n": [8], "k": [2], "ell": [1], "m": [30]}, "trials": 2})",
      R"({"schema": 1, "task": "certify-odd", "grid": {"n": [5], "p": [3], "ell": [2]}, "trials": 2})",
      R"({"schema": 1, "task": "spectrum", "grid": {"n": [8], "p": [4], "ell": [2]}, "trials": 1})",
      R"({"schema": 1, "task": "baseline-compare", "grid": {"n": [8], "p": [3], "ell": [1], "lambda": [3]}, "trials": 2})",
  };
  for (const char* text : configs) {
    const auto records = run_sweep(parse_config(text));
    REQUIRE_FALSE(records.empty());
    for (const auto& r : records) {
      CHECK(r.status.rfind("error", 0) != 0);
      CHECK(r.success);
    }
  }
}

TEST_CASE("quantiles") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({1, 2, 3, 4}, 0.1) == doctest::Approx(1.3));
  CHECK(quantile({5}, 0.9) == 5.0);
  CHECK(quantile({3, 1, 2}, 1.0) == 3.0);
  CHECK_THROWS_AS(quantile({}, 0.5), ParameterError);
}

TEST_CASE("summaries group consecutive cells") {
  Cell a{Task::Recover, 8, 4, 0, 2, 1.0, 0, 0.0, true};
  Cell b = a;
  b.lambda = 2.0;
  std::vector<TrialRecord> records;
  for (int t = 0; t < 4; ++t) {
    TrialRecord r;
    r.cell = a;
    r.corr = 0.25 * (t + 1);
    r.success = t >= 2;
    records.push_back(r);
  }
  TrialRecord err;
  err.cell = b;
  err.status = "error: boom";
  records.push_back(err);
  const auto s = summarize(records);
  REQUIRE(s.size() == 2);
  CHECK(s[0].trials == 4);
  CHECK(s[0].success_rate == doctest::Approx(0.5));
  CHECK(s[0].mean_corr == doctest::Approx(0.625));
  CHECK(s[0].q50 == doctest::Approx(0.625));
  CHECK(s[1].errors == 1);
  CHECK(std::isnan(s[1].mean_corr));
  CHECK_THROWS_AS(summarize({}), ParameterError);
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ail/algorithms.hpp"
#include "ail/config.hpp"

namespace ail {

// Where a failing run first broke.
struct Violation {
  std::string series;  // "bound", "recursion" or the name of an extra series
  Verdict verdict;
};

struct RunOutcome {
  std::string id;
  RunResult result;  // rate and verify runs fill trace, monitored, bound and verdicts only
  KvReport report;
  std::vector<std::string> files;  // relative to the run directory

  bool pass() const { return !violation().has_value(); }
  // Earliest failing check across the bound, the recursion and the extra series.
  std::optional<Violation> violation() const;
  // "PASS" or "FAIL k=<first violation>"
  std::string verdict_line() const;
};

struct Report {
  std::vector<RunOutcome> runs;
  KvReport kv;
  std::vector<std::string> files;
  bool pass() const;
};

// Component seeds derived from the experiment root seed.
struct SeedPlan {
  std::uint64_t problem = 0;
  std::uint64_t delay = 0;
  std::uint64_t algorithm = 0;
  std::uint64_t oracle = 0;
  static SeedPlan from_root(std::uint64_t root);
};

// Runs a rate, run or verify experiment in memory.
RunOutcome run_single(const RunConfig& c, const std::string& id = "run");

// Runs the experiment and writes trace.csv, bound.csv, monitored.csv and report.kv
// (per sweep point under run-NNN/, plus sweep.csv) into out_dir.
Report execute(const RunConfig& c, const std::string& out_dir);

// experiment.output, else $ASYNC_ITER_LAB_OUT, else "out".
std::string default_output_dir(const RunConfig& c);

std::string bound_to_csv(const std::vector<double>& bound);
std::string series_to_csv(const std::string& name, const std::vector<double>& values);

}  // namespace ail

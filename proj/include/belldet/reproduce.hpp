#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "belldet/io.hpp"

namespace belldet {

// One registry comparison: |got - want| <= tol, or got <= want when bound.
struct Comparison {
  std::string name;
  double got = 0, want = 0, tol = 0;
  bool bound = false;
  bool pass = false;
};

struct ReproduceOptions {
  std::uint64_t seed = 1;
  int threads = 0;
};

struct ReproduceOutcome {
  std::string target;
  std::vector<Comparison> checks;
  // filename -> contents, written by the CLI next to the JSON report
  std::map<std::string, std::string> artifacts;
  json report;

  // raw results for callers that apply their own gates
  std::optional<ThresholdReport> profile_report;
  std::optional<std::vector<Table1Row>> table;
  std::optional<ThresholdSearchResult> bisection;
  std::optional<GilbertOutcome> gilbert;
  std::optional<ThresholdReport> witness_profile;  // rationalized Gilbert witness
  double witness_threshold = 0;
  double sampled_max_overlap = 0;  // gilbert-n4 vertex sampling
  double target_value = 0;
  long long sampled_vertices = 0;

  bool ok() const;
};

extern const std::vector<std::string> kReproduceTargets;

// Runs one pinned-seed pipeline and compares against the expected-values
// registry. Known targets: chsh, table1, lp-n2-sym, lp-n2-asym, lp-n2-extra,
// gilbert-n2, gilbert-n3, gilbert-n4.
ReproduceOutcome reproduce_target(const std::string& target, const ReproduceOptions& opts);

std::string format_table1(const std::vector<Table1Row>& rows);

// Scale so the largest |entry| is 1, then round onto a rational grid; the
// Gilbert witness direction is scale-free, so this only conditions the
// rounding.
BellFunctional rationalize_witness(const BellFunctional& c, RationalizeInfo* info = nullptr);

}  // namespace belldet

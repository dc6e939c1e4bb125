#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "belldet/chshn.hpp"
#include "belldet/efficiency.hpp"
#include "belldet/functional.hpp"
#include "belldet/gilbert.hpp"
#include "belldet/separation.hpp"
#include "belldet/thresholds.hpp"

namespace belldet {

using json = nlohmann::ordered_json;

// ---- Bell functionals: whitespace block text ----
// Header line:  m o jointwidth marg   with marg in {none, A, B, AB}.
// Then optional "A" / "B" marker lines, each followed by m rows of o
// coefficients (full output width), and a "C" marker followed by the
// (m*jointwidth) x (m*jointwidth) joint matrix laid out so that element (a,b)
// of the jointwidth x jointwidth submatrix at block coordinate (x,y) is
// C(a,b|x,y). jointwidth is o (full) or o-1 (reduced form; the dropped
// outcome's joint coefficients are zero).
BellFunctional parse_functional(std::istream& in);
BellFunctional parse_functional_file(const std::string& path);
std::string emit_functional(const BellFunctional& c, int jointwidth = -1);

// ---- Distributions: JSON {n, m, o, entries row-major (x,y,a,b)} ----
json distribution_json(const MultiCopyDistribution& dist,
                       const std::optional<EfficiencyModel>& model = std::nullopt);
struct LoadedDistribution {
  int n = 0;
  Behavior table;
  std::optional<EfficiencyModel> model;
};
// Validates invariants at 1e-10.
LoadedDistribution load_distribution_json(std::istream& in);

// ---- Collins-Gisin matrices: whitespace text with one header line ----
std::string emit_collins_gisin(const CollinsGisinPoint& cg);
CollinsGisinPoint parse_collins_gisin(std::istream& in);

// ---- Report JSON ----
// Every report embeds the run configuration (seed, parallelism degree,
// tolerance set) and bound provenance, with stable key order.
json config_json(std::uint64_t seed, int threads_requested);
json threshold_report_json(const ThresholdReport& report, std::uint64_t seed, int threads);
json separation_result_json(const SeparationResult& result, const SeparationOptions& opts);
json bisection_result_json(const ThresholdSearchResult& result, EfficiencyMode mode,
                           NoClickPolicy policy, const BisectionOptions& opts);
json gilbert_outcome_json(const GilbertOutcome& outcome, const GilbertConfig& config);
json table1_json(const std::vector<Table1Row>& rows);

// ---- Expected values registry ----
// Closed forms stored symbolically and evaluated at load, so printed decimals
// never truncate the comparison baselines.
struct ExpectedValue {
  std::string expr;
  double value = 0;
  double tol = 0;
};
const std::map<std::string, ExpectedValue>& expected_values();

// Arithmetic expression evaluator: numbers, + - * / ( ), unary minus,
// sqrt(x), pow(a,b).
double eval_expression(const std::string& expr);

}  // namespace belldet

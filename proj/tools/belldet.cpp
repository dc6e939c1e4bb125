#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "belldet/chshn.hpp"
#include "belldet/correlation.hpp"
#include "belldet/efficiency.hpp"
#include "belldet/gilbert.hpp"
#include "belldet/io.hpp"
#include "belldet/local_bound.hpp"
#include "belldet/reproduce.hpp"
#include "belldet/separation.hpp"
#include "belldet/strategies.hpp"
#include "belldet/thresholds.hpp"

namespace {

using namespace belldet;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << text;
}

MultiCopyDistribution ideal(int n) {
  return tensor_power(chsh_optimal_single_copy(), n);
}

EfficiencyMode mode_from(const std::string& s) {
  if (s == "sym") return EfficiencyMode::kSymmetric;
  if (s == "asym") return EfficiencyMode::kAsymmetric;
  throw InputError("mode must be 'sym' or 'asym'");
}

NoClickPolicy policy_from(const std::string& s) {
  if (s == "last") return NoClickPolicy::kLastOutcome;
  if (s == "extra") return NoClickPolicy::kExtraOutcome;
  throw InputError("policy must be 'last' or 'extra'");
}

// "1..8,10,13" -> {1,...,8,10,13}
std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> ns;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    pos = comma == std::string::npos ? text.size() : comma + 1;
    try {
      std::size_t dots = tok.find("..");
      if (dots != std::string::npos) {
        int lo = std::stoi(tok.substr(0, dots));
        int hi = std::stoi(tok.substr(dots + 2));
        if (lo < 1 || hi < lo) throw InputError("bad range '" + tok + "'");
        for (int n = lo; n <= hi; ++n) ns.push_back(n);
      } else {
        int n = std::stoi(tok);
        if (n < 1) throw InputError("bad row '" + tok + "'");
        ns.push_back(n);
      }
    } catch (const std::logic_error&) {
      throw InputError("cannot parse table rows '" + tok + "'");
    }
  }
  if (ns.empty()) throw InputError("empty table row list");
  return ns;
}

void print_checks(const std::vector<Comparison>& checks) {
  for (const auto& c : checks) {
    std::printf("[%s] %-44s got=%-22.16g %s=%.16g", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.got, c.bound ? "max" : "want", c.want);
    if (!c.bound && c.tol > 0) std::printf("  tol=%g", c.tol);
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"detection-efficiency thresholds for multi-copy Bell tests"};
  app.require_subcommand(1);
  int rc = 0;

  // ---- distribution ----
  auto* dist_cmd = app.add_subcommand(
      "distribution", "emit the ideal or deflated n-copy table as JSON");
  int dist_n = 1;
  double dist_eta = -1, dist_eta_a = -1, dist_eta_b = -1;
  std::string dist_policy = "last", dist_out;
  dist_cmd->add_option("--n", dist_n, "number of copies")->required()->check(CLI::Range(1, 4));
  dist_cmd->add_option("--eta", dist_eta, "detector efficiency, both parties");
  dist_cmd->add_option("--eta-a", dist_eta_a, "Alice's efficiency (overrides --eta)");
  dist_cmd->add_option("--eta-b", dist_eta_b, "Bob's efficiency (overrides --eta)");
  dist_cmd->add_option("--policy", dist_policy, "no-click assignment: last|extra")
      ->check(CLI::IsMember({"last", "extra"}));
  dist_cmd->add_option("--out", dist_out, "output file (default stdout)");
  dist_cmd->callback([&] {
    MultiCopyDistribution d = ideal(dist_n);
    std::optional<EfficiencyModel> model;
    if (dist_eta >= 0 || dist_eta_a >= 0 || dist_eta_b >= 0) {
      EfficiencyModel m;
      m.policy = policy_from(dist_policy);
      m.eta_a = dist_eta_a >= 0 ? dist_eta_a : (dist_eta >= 0 ? dist_eta : 1.0);
      m.eta_b = dist_eta_b >= 0 ? dist_eta_b : (dist_eta >= 0 ? dist_eta : 1.0);
      DeflatedPoint p = deflate(d, m);
      d = MultiCopyDistribution{p.copies, std::move(p.table)};
      model = m;
    }
    write_output(dist_out, distribution_json(d, model).dump(2) + "\n");
  });

  // ---- chshn ----
  auto* chshn_cmd =
      app.add_subcommand("chshn", "threshold table for the iterated CHSH functionals");
  std::string chshn_rows = "1..8,10,11,13,20,50,100", chshn_out;
  chshn_cmd->add_option("--table", chshn_rows, "rows, e.g. '1..13' or '2,5,20'");
  chshn_cmd->add_option("--out", chshn_out, "JSON output file (text table goes to stdout)");
  chshn_cmd->callback([&] {
    auto rows = chshn_table1(parse_n_list(chshn_rows));
    std::cout << format_table1(rows);
    json j = table1_json(rows);
    if (chshn_out.empty())
      std::cout << j.dump(2) << "\n";
    else
      write_output(chshn_out, j.dump(2) + "\n");
  });

  // ---- local-bound ----
  auto* lb_cmd = app.add_subcommand("local-bound", "local bound of a functional from file");
  std::string lb_file, lb_mode = "auto", lb_out;
  int lb_restarts = 200, lb_threads = 0;
  std::uint64_t lb_seed = 1;
  lb_cmd->add_option("--functional", lb_file, "block text file")->required();
  lb_cmd->add_option("--mode", lb_mode, "auto|exact|heuristic")
      ->check(CLI::IsMember({"auto", "exact", "heuristic"}));
  lb_cmd->add_option("--restarts", lb_restarts, "see-saw restarts (heuristic)");
  lb_cmd->add_option("--seed", lb_seed, "RNG seed");
  lb_cmd->add_option("--threads", lb_threads, "worker threads (0 = auto)");
  lb_cmd->add_option("--out", lb_out, "output file (default stdout)");
  lb_cmd->callback([&] {
    BellFunctional c = parse_functional_file(lb_file);
    LocalBoundOptions o;
    o.restarts = lb_restarts;
    o.seed = lb_seed;
    o.threads = lb_threads;
    LocalBoundResult r;
    if (lb_mode == "exact")
      r = local_bound_exact(c, o);
    else if (lb_mode == "heuristic")
      r = local_bound_heuristic(c, o);
    else
      r = strategy_count(c.m, c.o) <= o.exact_cap ? local_bound_exact(c, o)
                                                  : local_bound_heuristic(c, o);
    json j;
    j["config"] = config_json(lb_seed, lb_threads);
    j["value"] = r.value;
    j["provenance"] = r.exact ? "exact" : "heuristic";
    j["witness"] = json{{"alice", r.witness.alice}, {"bob", r.witness.bob}};
    write_output(lb_out, j.dump(2) + "\n");
  });

  // ---- lp-separate ----
  auto* lp_cmd = app.add_subcommand(
      "lp-separate", "LP membership test for the deflated point, emitting a witness");
  int lp_n = 2, lp_restarts = 50, lp_threads = 0;
  std::string lp_mode = "sym", lp_policy = "last", lp_out, lp_fun_out;
  double lp_eta = 1.0;
  bool lp_full = false;
  std::uint64_t lp_seed = 1;
  lp_cmd->add_option("--n", lp_n, "number of copies")->check(CLI::Range(1, 3));
  lp_cmd->add_option("--mode", lp_mode, "sym|asym")->check(CLI::IsMember({"sym", "asym"}));
  lp_cmd->add_option("--policy", lp_policy, "last|extra")
      ->check(CLI::IsMember({"last", "extra"}));
  lp_cmd->add_option("--eta", lp_eta, "detector efficiency")->required();
  lp_cmd->add_flag("--full-enum", lp_full, "materialize every vertex constraint");
  lp_cmd->add_option("--restarts", lp_restarts, "see-saw restarts per oracle call");
  lp_cmd->add_option("--seed", lp_seed, "RNG seed");
  lp_cmd->add_option("--threads", lp_threads, "worker threads (0 = auto)");
  lp_cmd->add_option("--out", lp_out, "JSON output file");
  lp_cmd->add_option("--functional-out", lp_fun_out, "witness functional file");
  lp_cmd->callback([&] {
    DeflatedPoint point =
        deflate_for_mode(ideal(lp_n), lp_eta, mode_from(lp_mode), policy_from(lp_policy));
    SeparationOptions so;
    so.source = lp_full ? ConstraintSource::kFullEnumeration : ConstraintSource::kRowGeneration;
    so.oracle_restarts = lp_restarts;
    so.seed = lp_seed;
    so.threads = lp_threads;
    SeparationResult r = separate(point, so);
    write_output(lp_out, separation_result_json(r, so).dump(2) + "\n");
    if (!lp_fun_out.empty()) write_output(lp_fun_out, emit_functional(r.functional));
  });

  // ---- gilbert ----
  auto* gil_cmd = app.add_subcommand(
      "gilbert", "distance from the deflated point to the local polytope");
  int gil_n = 3, gil_memory = 50, gil_restarts = 50, gil_max_iter = 20000, gil_threads = 0;
  std::string gil_mode = "sym", gil_policy = "last", gil_out, gil_fun_out;
  double gil_eta = 1.0, gil_epsilon = 1e-3;
  bool gil_sym = true, gil_party = false, gil_exact = false;
  std::uint64_t gil_seed = 1;
  gil_cmd->add_option("--n", gil_n, "number of copies")->check(CLI::Range(1, 4));
  gil_cmd->add_option("--mode", gil_mode, "sym|asym")->check(CLI::IsMember({"sym", "asym"}));
  gil_cmd->add_option("--policy", gil_policy, "last|extra")
      ->check(CLI::IsMember({"last", "extra"}));
  gil_cmd->add_option("--eta", gil_eta, "detector efficiency")->required();
  gil_cmd->add_option("--epsilon", gil_epsilon, "distance below which the point counts as inside");
  gil_cmd->add_option("--memory", gil_memory, "active vertex atoms kept")->check(CLI::Range(1, 200));
  gil_cmd->add_option("--restarts", gil_restarts, "see-saw restarts per oracle call");
  gil_cmd->add_option("--max-iterations", gil_max_iter, "iteration cap");
  gil_cmd->add_option("--seed", gil_seed, "RNG seed");
  gil_cmd->add_option("--threads", gil_threads, "worker threads (0 = auto)");
  gil_cmd->add_flag("--symmetrize,!--no-symmetrize", gil_sym,
                    "average over copy permutations (default on)");
  gil_cmd->add_flag("--party-symmetrize", gil_party, "also average over the party swap");
  gil_cmd->add_flag("--exact-oracle", gil_exact, "enumerate instead of see-saw (small n only)");
  gil_cmd->add_option("--out", gil_out, "JSON output file");
  gil_cmd->add_option("--functional-out", gil_fun_out, "witness functional file");
  gil_cmd->callback([&] {
    DeflatedPoint point = deflate_for_mode(ideal(gil_n), gil_eta, mode_from(gil_mode),
                                           policy_from(gil_policy));
    GilbertConfig g;
    g.epsilon = gil_epsilon;
    g.memory = gil_memory;
    g.max_iterations = gil_max_iter;
    g.symmetrize = gil_sym;
    g.party_symmetrize = gil_party;
    g.exact_oracle = gil_exact;
    g.restarts = gil_restarts;
    g.seed = gil_seed;
    g.threads = gil_threads;
    GilbertOutcome outcome = gilbert_distance(point, g);
    write_output(gil_out, gilbert_outcome_json(outcome, g).dump(2) + "\n");
    if (!gil_fun_out.empty())
      write_output(gil_fun_out, emit_functional(outcome.witness.functional));
  });

  // ---- threshold ----
  auto* thr_cmd = app.add_subcommand(
      "threshold", "profile a functional against the n-copy ideal point");
  std::string thr_file, thr_mode = "sym", thr_policy = "last", thr_out;
  int thr_n = 1, thr_restarts = 200, thr_threads = 0;
  std::uint64_t thr_seed = 1;
  thr_cmd->add_option("--functional", thr_file, "block text file")->required();
  thr_cmd->add_option("--n", thr_n, "number of copies")->required()->check(CLI::Range(1, 4));
  thr_cmd->add_option("--mode", thr_mode, "sym|asym (headline eta)")
      ->check(CLI::IsMember({"sym", "asym"}));
  thr_cmd->add_option("--policy", thr_policy, "last|extra")
      ->check(CLI::IsMember({"last", "extra"}));
  thr_cmd->add_option("--restarts", thr_restarts, "see-saw restarts if L is heuristic");
  thr_cmd->add_option("--seed", thr_seed, "RNG seed");
  thr_cmd->add_option("--threads", thr_threads, "worker threads (0 = auto)");
  thr_cmd->add_option("--out", thr_out, "output file (default stdout)");
  thr_cmd->callback([&] {
    BellFunctional c = parse_functional_file(thr_file);
    LocalBoundOptions o;
    o.restarts = thr_restarts;
    o.seed = thr_seed;
    o.threads = thr_threads;
    ThresholdReport rep = profile(c, ideal(thr_n), policy_from(thr_policy), o);
    try {
      eta_sym(rep);
    } catch (const InputError&) {
    }
    try {
      eta_asym(rep);
    } catch (const InputError&) {
    }
    json j = threshold_report_json(rep, thr_seed, thr_threads);
    j["mode"] = thr_mode;
    write_output(thr_out, j.dump(2) + "\n");
  });

  // ---- reproduce ----
  auto* rep_cmd = app.add_subcommand("reproduce", "pinned-seed reference pipelines");
  std::vector<std::string> rep_choices = kReproduceTargets;
  rep_choices.push_back("all");
  std::string rep_target;
  std::string rep_dir = ".";
  int rep_threads = 0;
  std::uint64_t rep_seed = 1;
  rep_cmd->add_option("target", rep_target, "one of the pinned targets, or 'all'")
      ->required()
      ->check(CLI::IsMember(rep_choices));
  rep_cmd->add_option("--seed", rep_seed, "RNG seed");
  rep_cmd->add_option("--threads", rep_threads, "worker threads (0 = auto)");
  rep_cmd->add_option("--out-dir", rep_dir, "artifact directory");
  rep_cmd->callback([&] {
    std::vector<std::string> targets =
        rep_target == "all" ? kReproduceTargets : std::vector<std::string>{rep_target};
    std::filesystem::create_directories(rep_dir);
    bool all_ok = true;
    for (const auto& t : targets) {
      ReproduceOptions opts;
      opts.seed = rep_seed;
      opts.threads = rep_threads;
      ReproduceOutcome r = reproduce_target(t, opts);
      for (const auto& [name, text] : r.artifacts)
        write_output((std::filesystem::path(rep_dir) / name).string(), text);
      write_output((std::filesystem::path(rep_dir) / (t + "-summary.json")).string(),
                   r.report.dump(2) + "\n");
      print_checks(r.checks);
      std::printf("reproduce %s: %s\n", t.c_str(), r.ok() ? "OK" : "MISS");
      all_ok = all_ok && r.ok();
    }
    rc = all_ok ? 0 : 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return rc;
}

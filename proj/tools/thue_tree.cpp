#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thue_tree.hpp"

namespace {

using namespace thue;
using nlohmann::json;

// Exit codes: 0 success/verified, 1 input or configuration error,
// 2 step budget exhausted, 3 malformed log, 5 violations found.
constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBudget = 2;
constexpr int kExitMalformed = 3;
constexpr int kExitViolations = 5;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::MalformedLog: return kExitMalformed;
    case Errc::BudgetExhausted: return kExitBudget;
    default: return kExitInput;
  }
}

const char* kind_name(StepKind k) {
  switch (k) {
    case StepKind::Positive: return "positive";
    case StepKind::VerticalNegative: return "verticalNegative";
    default: return "squareNegative";
  }
}

json outcomes_to_json(const RootedTree& t, const std::vector<StepOutcome>& outs) {
  json arr = json::array();
  for (const auto& o : outs)
    arr.push_back(json{{"kind", kind_name(o.kind)},
                       {"recolored", t.original_label(o.recolored)},
                       {"chosen", o.chosen},
                       {"l", o.l},
                       {"m", o.m},
                       {"k", o.k}});
  return arr;
}

void emit(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-")
    std::cout << data << "\n";
  else
    write_file(path, data + "\n");
}

json load_json(const std::string& path) { return json::parse(read_file(path)); }

json load_coloring_json(const std::string& path) {
  json j = load_json(path);
  if (j.is_object() && j.contains("coloring")) return j.at("coloring");
  return j;
}

struct SolveArgs {
  std::string tree_file, lists_file, out_file, log_file, lists_out;
  std::vector<int> random_lists;  // size palette
  std::string mode = "vertical", epsilon = "1";
  std::int64_t budget = 0;
  std::uint64_t seed = 0;
};

int cmd_solve(const SolveArgs& a) {
  RootedTree t = load_tree(a.tree_file);
  ListAssignment lists;
  if (!a.lists_file.empty()) {
    lists = lists_from_json(t, load_json(a.lists_file));
  } else if (a.random_lists.size() == 2) {
    Rng rng(mix_seed({a.seed, 0xa11ce5}));
    lists = ListAssignment::random(t, a.random_lists[0], a.random_lists[1], rng);
  } else {
    throw Error(Errc::InvalidParameter, "provide --lists FILE or --random-lists SIZE PALETTE");
  }
  if (!a.lists_out.empty()) write_file(a.lists_out, lists_to_json(t, lists).dump(2) + "\n");

  SolverConfig cfg;
  cfg.mode = mode_from_string(a.mode);
  cfg.epsilon = Rational::parse(a.epsilon);
  cfg.step_budget = a.budget;
  SolveResult r = solve(t, lists, cfg, a.seed);

  if (r.status == SolveStatus::Solved) {
    json artifact{{"status", "solved"},
                  {"seed", r.seed.entries},
                  {"outcomes", outcomes_to_json(t, r.outcomes)},
                  {"coloring", coloring_to_json(t, r.state.colors())},
                  {"steps", r.stats.steps}};
    emit(a.out_file, artifact.dump(2));
    if (!a.log_file.empty()) {
      RunLog log = encode(r.outcomes, r.state, cfg.finalized(t, lists));
      write_file(a.log_file, log_to_json(log).dump(2) + "\n");
    }
    return kExitOk;
  }
  json stats{{"status", "budgetExhausted"},
             {"steps", r.stats.steps},
             {"maxDepth", r.stats.max_depth},
             {"positives", r.stats.positives},
             {"verticalNegatives", r.stats.vertical_negs},
             {"squareNegatives", r.stats.square_negs}};
  emit(a.out_file, stats.dump(2));
  return kExitBudget;
}

struct VerifyArgs {
  std::string tree_file, coloring_file;
  std::string r = "2", mode = "vertical";
};

int cmd_verify(const VerifyArgs& a) {
  RootedTree t = load_tree(a.tree_file);
  std::vector<Color> colors = coloring_from_json(t, load_coloring_json(a.coloring_file));
  PowerSpec spec(Rational::parse(a.r));
  VerifyMode mode;
  if (a.mode == "vertical")
    mode = VerifyMode::Vertical;
  else if (a.mode == "paths")
    mode = VerifyMode::AllSimplePaths;
  else
    throw Error(Errc::InvalidParameter, "verify mode must be \"vertical\" or \"paths\"");
  auto violations = verify_coloring(t, colors, spec, mode);
  json arr = json::array();
  for (const auto& v : violations)
    arr.push_back(json{{"a", t.original_label(v.endpoint_a)},
                       {"b", t.original_label(v.endpoint_b)},
                       {"start", v.start},
                       {"l", v.l}});
  std::cout << json{{"ok", violations.empty()}, {"violations", arr}}.dump(2) << "\n";
  return violations.empty() ? kExitOk : kExitViolations;
}

struct DecodeArgs {
  std::string log_file, tree_file, lists_file;
  std::string mode, epsilon;
};

int cmd_decode(const DecodeArgs& a) {
  RootedTree t = load_tree(a.tree_file);
  ListAssignment lists = lists_from_json(t, load_json(a.lists_file));
  RunLog log;
  try {
    log = log_from_json(json::parse(read_file(a.log_file)));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::MalformedLog, std::string("log file: ") + e.what());
  }
  SolverConfig cfg;
  cfg.mode = a.mode.empty() ? log.mode : mode_from_string(a.mode);
  cfg.epsilon = a.epsilon.empty() ? log.epsilon : Rational::parse(a.epsilon);
  Seed seed = decode(log, t, lists, cfg);
  std::cout << json{{"seed", seed.entries}}.dump(2) << "\n";
  return kExitOk;
}

int cmd_experiment(const std::string& spec_file, const std::string& out_override) {
  ExperimentSpec spec = ExperimentSpec::from_json(load_json(spec_file));
  std::string csv = run_experiment(spec);
  std::string out = !out_override.empty() ? out_override : spec.output;
  if (out.empty())
    std::cout << csv;
  else
    write_file(out, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"erase-and-retry list coloring of rooted trees"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve_cmd = app.add_subcommand("solve", "run the randomized coloring procedure");
  solve_cmd->add_option("--tree", sa.tree_file, "tree file (json or dot)")->required();
  solve_cmd->add_option("--lists", sa.lists_file, "list assignment json");
  solve_cmd->add_option("--random-lists", sa.random_lists, "SIZE PALETTE: draw random lists")
      ->expected(2);
  solve_cmd->add_option("--mode", sa.mode, "vertical | full");
  solve_cmd->add_option("--epsilon", sa.epsilon, "exponent offset as an exact fraction p/q");
  solve_cmd->add_option("--budget", sa.budget, "step budget (0 = 100n)");
  solve_cmd->add_option("--seed", sa.seed, "rng seed");
  solve_cmd->add_option("--out", sa.out_file, "result json ('-' = stdout)");
  solve_cmd->add_option("--log", sa.log_file, "also write the run log json here");
  solve_cmd->add_option("--lists-out", sa.lists_out, "persist the list assignment json here");

  VerifyArgs va;
  CLI::App* verify_cmd = app.add_subcommand("verify", "check a total coloring");
  verify_cmd->add_option("--tree", va.tree_file)->required();
  verify_cmd->add_option("--coloring", va.coloring_file, "coloring json (or a solve artifact)")
      ->required();
  verify_cmd->add_option("--r", va.r, "forbidden exponent as an exact fraction p/q");
  verify_cmd->add_option("--mode", va.mode, "vertical | paths");

  DecodeArgs da;
  CLI::App* decode_cmd = app.add_subcommand("decode", "reconstruct the seed from a run log");
  decode_cmd->add_option("--log", da.log_file)->required();
  decode_cmd->add_option("--tree", da.tree_file)->required();
  decode_cmd->add_option("--lists", da.lists_file)->required();
  decode_cmd->add_option("--mode", da.mode, "must match the log header if given");
  decode_cmd->add_option("--epsilon", da.epsilon, "must match the log header if given");

  std::string spec_file, exp_out;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "sweep list sizes, emit csv");
  exp_cmd->add_option("spec", spec_file, "experiment spec json")->required();
  exp_cmd->add_option("--out", exp_out, "csv output path (overrides the spec)");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "ground-truth utilities");
  oracle_cmd->require_subcommand(1);

  struct {
    std::string tree_file, lists_file;
    std::string r = "2", mode = "vertical";
    std::int64_t node_bound = 100'000'000;
  } ca;
  CLI::App* choosable_cmd = oracle_cmd->add_subcommand("choosable", "exhaustive search");
  choosable_cmd->add_option("--tree", ca.tree_file)->required();
  choosable_cmd->add_option("--lists", ca.lists_file)->required();
  choosable_cmd->add_option("--r", ca.r, "forbidden exponent p/q");
  choosable_cmd->add_option("--mode", ca.mode, "vertical | paths");
  choosable_cmd->add_option("--node-bound", ca.node_bound, "search node limit");

  std::int64_t thue_len = 0;
  CLI::App* thue_cmd = oracle_cmd->add_subcommand("thue", "square-free ternary word");
  thue_cmd->add_option("length", thue_len)->required();

  struct {
    std::string lists_file;
    std::uint64_t seed = 0;
  } qa;
  CLI::App* seq_cmd = oracle_cmd->add_subcommand("sequence", "square-free sequence from lists");
  seq_cmd->add_option("--lists", qa.lists_file, "json array of color lists")->required();
  seq_cmd->add_option("--seed", qa.seed, "rng seed");

  struct {
    std::string tree_file, coloring_file, epsilon = "1";
  } ra;
  CLI::App* red_cmd = oracle_cmd->add_subcommand("reduction", "long-power-to-vertical check");
  red_cmd->add_option("--tree", ra.tree_file)->required();
  red_cmd->add_option("--coloring", ra.coloring_file)->required();
  red_cmd->add_option("--epsilon", ra.epsilon, "exact fraction p/q");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(sa);
    if (verify_cmd->parsed()) return cmd_verify(va);
    if (decode_cmd->parsed()) return cmd_decode(da);
    if (exp_cmd->parsed()) return cmd_experiment(spec_file, exp_out);
    if (choosable_cmd->parsed()) {
      RootedTree t = load_tree(ca.tree_file);
      ListAssignment lists = lists_from_json(t, load_json(ca.lists_file));
      VerifyMode mode;
      if (ca.mode == "vertical")
        mode = VerifyMode::Vertical;
      else if (ca.mode == "paths")
        mode = VerifyMode::AllSimplePaths;
      else
        throw Error(Errc::InvalidParameter, "choosable mode must be \"vertical\" or \"paths\"");
      Verdict v = exhaustive_choosable(t, lists, PowerSpec(Rational::parse(ca.r)), mode,
                                       ca.node_bound);
      json out{{"colorable", v.colorable}, {"nodesExplored", v.nodes_explored}};
      if (v.witness) out["witness"] = coloring_to_json(t, *v.witness);
      std::cout << out.dump(2) << "\n";
      return kExitOk;
    }
    if (thue_cmd->parsed()) {
      for (Color c : thue_ternary(thue_len)) std::cout << c << " ";
      std::cout << "\n";
      return kExitOk;
    }
    if (seq_cmd->parsed()) {
      auto lists = load_json(qa.lists_file).get<std::vector<std::vector<Color>>>();
      Rng rng(qa.seed);
      for (Color c : list_sequence_solve(lists, rng)) std::cout << c << " ";
      std::cout << "\n";
      return kExitOk;
    }
    if (red_cmd->parsed()) {
      RootedTree t = load_tree(ra.tree_file);
      std::vector<Color> colors = coloring_from_json(t, load_coloring_json(ra.coloring_file));
      bool ok = check_reduction(t, colors, Rational::parse(ra.epsilon));
      std::cout << (ok ? "true" : "false") << "\n";
      return ok ? kExitOk : kExitViolations;
    }
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

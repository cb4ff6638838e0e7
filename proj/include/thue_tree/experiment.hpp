#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "entropy_log.hpp"
#include "solver.hpp"

namespace thue {

struct TreeModel {
  enum class Kind { Path, Dary, Random };
  Kind kind = Kind::Path;
  int n = 1;           // Path, Random
  int d = 2, h = 1;    // Dary
  int max_degree = 3;  // Random

  static TreeModel from_json(const nlohmann::json& j) {
    TreeModel m;
    std::string kind = j.at("model").get<std::string>();
    if (kind == "path") {
      m.kind = Kind::Path;
      m.n = j.at("n").get<int>();
    } else if (kind == "dary") {
      m.kind = Kind::Dary;
      m.d = j.at("d").get<int>();
      m.h = j.at("h").get<int>();
    } else if (kind == "random") {
      m.kind = Kind::Random;
      m.n = j.at("n").get<int>();
      m.max_degree = j.at("maxDegree").get<int>();
    } else {
      throw Error(Errc::SpecParseError, "tree model must be path, dary or random");
    }
    return m;
  }

  RootedTree generate(std::uint64_t rng_seed) const {
    switch (kind) {
      case Kind::Path: return RootedTree::path(n);
      case Kind::Dary: return RootedTree::complete_dary(d, h);
      case Kind::Random: {
        Rng rng(rng_seed);
        return RootedTree::random_attachment(n, max_degree, rng);
      }
    }
    throw Error(Errc::InternalInvariant, "unreachable");
  }
};

inline RootedTree generate_tree(const TreeModel& model, std::uint64_t rng_seed) {
  return model.generate(rng_seed);
}

struct ExperimentSpec {
  Mode mode = Mode::Vertical;
  Rational epsilon = Rational::from_int(1);
  TreeModel tree;
  std::vector<int> list_sizes;
  int palette = 0;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::int64_t step_budget = 0;  // 0: solver default
  std::string output;            // optional CSV path

  static ExperimentSpec from_json(const nlohmann::json& j) {
    try {
      ExperimentSpec s;
      s.mode = mode_from_string(j.at("mode").get<std::string>());
      s.epsilon = Rational::parse(j.at("epsilon").get<std::string>());
      s.tree = TreeModel::from_json(j.at("tree"));
      s.list_sizes = j.at("listSizes").get<std::vector<int>>();
      s.palette = j.at("palette").get<int>();
      s.trials = j.at("trials").get<int>();
      s.master_seed = j.at("masterSeed").get<std::uint64_t>();
      if (j.contains("stepBudget")) s.step_budget = j.at("stepBudget").get<std::int64_t>();
      if (j.contains("output")) s.output = j.at("output").get<std::string>();
      s.validate();
      return s;
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(Errc::SpecParseError, std::string("experiment spec: ") + e.what());
    }
  }

  void validate() const {
    if (trials < 1) throw Error(Errc::SpecParseError, "trials must be >= 1");
    if (list_sizes.empty()) throw Error(Errc::SpecParseError, "listSizes must be nonempty");
    for (int c : list_sizes)
      if (c < 1) throw Error(Errc::SpecParseError, "list sizes must be >= 1");
    if (palette < 1) throw Error(Errc::SpecParseError, "palette must be >= 1");
  }
};

namespace detail {

struct TrialResult {
  bool success = false;
  std::int64_t steps = 0;
  std::int64_t positives = 0, vertical_negs = 0, square_negs = 0;
};

inline int worker_count(std::size_t tasks) {
  int n = 0;
  if (const char* env = std::getenv("THUE_TREE_THREADS")) n = std::atoi(env);
  if (n < 1) n = (int)std::thread::hardware_concurrency();
  if (n < 1) n = 1;
  if ((std::size_t)n > tasks) n = tasks ? (int)tasks : 1;
  return n;
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace detail

// One CSV row per swept list size. Trials are independent and may run on
// several threads; results land in per-trial slots and are aggregated in a
// fixed order, so the output is byte-identical for any thread count.
inline std::string run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t points = spec.list_sizes.size();
  const std::size_t tasks = points * (std::size_t)spec.trials;
  std::vector<detail::TrialResult> results(tasks);

  auto run_trial = [&](std::size_t point, std::size_t trial) {
    RootedTree t = spec.tree.generate(mix_seed({spec.master_seed, point, trial, 0}));
    Rng list_rng(mix_seed({spec.master_seed, point, trial, 1}));
    ListAssignment lists =
        ListAssignment::random(t, spec.list_sizes[point], spec.palette, list_rng);
    SolverConfig cfg;
    cfg.mode = spec.mode;
    cfg.epsilon = spec.epsilon;
    cfg.step_budget = spec.step_budget;
    SolveResult r = solve(t, lists, cfg, mix_seed({spec.master_seed, point, trial, 2}));
    detail::TrialResult& out = results[point * spec.trials + trial];
    out.success = r.status == SolveStatus::Solved;
    out.steps = r.stats.steps;
    out.positives = r.stats.positives;
    out.vertical_negs = r.stats.vertical_negs;
    out.square_negs = r.stats.square_negs;
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks) return;
      try {
        run_trial(i / spec.trials, i % spec.trials);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  int workers = detail::worker_count(tasks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::string csv =
      "listSize,trials,successes,successRate,meanSteps,p95Steps,"
      "fracPositive,fracVerticalNeg,fracSquareNeg,countLeftBits,countRightBits,crossoverLog2M\n";
  for (std::size_t p = 0; p < points; ++p) {
    std::int64_t successes = 0, step_sum = 0, pos = 0, vneg = 0, sneg = 0;
    std::vector<std::int64_t> steps;
    for (int tr = 0; tr < spec.trials; ++tr) {
      const auto& r = results[p * spec.trials + tr];
      successes += r.success ? 1 : 0;
      step_sum += r.steps;
      pos += r.positives;
      vneg += r.vertical_negs;
      sneg += r.square_negs;
      steps.push_back(r.steps);
    }
    std::sort(steps.begin(), steps.end());
    std::int64_t p95 = steps[(95 * steps.size() + 99) / 100 - 1];  // nearest rank
    double total = (double)std::max<std::int64_t>(pos + vneg + sneg, 1);

    // The counting side, instantiated on the first trial's tree.
    RootedTree sample = spec.tree.generate(mix_seed({spec.master_seed, p, 0, 0}));
    SolverConfig cfg;
    cfg.mode = spec.mode;
    cfg.epsilon = spec.epsilon;
    cfg.list_size = spec.list_sizes[p];
    std::int64_t m = spec.step_budget > 0 ? spec.step_budget : 100LL * sample.n();
    CountingReport rep = counting_report(cfg, sample.n(), m, sample.max_degree());

    csv += std::to_string(spec.list_sizes[p]) + "," + std::to_string(spec.trials) + "," +
           std::to_string(successes) + "," +
           detail::fmt("%.4f", (double)successes / spec.trials) + "," +
           detail::fmt("%.2f", (double)step_sum / spec.trials) + "," + std::to_string(p95) + "," +
           detail::fmt("%.4f", pos / total) + "," + detail::fmt("%.4f", vneg / total) + "," +
           detail::fmt("%.4f", sneg / total) + "," + detail::fmt("%.2f", rep.left_bits) + "," +
           detail::fmt("%.2f", rep.right_bits) + "," +
           (rep.crossover_log2_m ? detail::fmt("%.2f", *rep.crossover_log2_m) : std::string()) +
           "\n";
  }
  return csv;
}

}  // namespace thue

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "coloring.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "power.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace thue {

// Vertical: keep every root-downward path x^{1+eps}-free.
// Full: keep every simple path square-free and every root-downward path
// x^{1+delta}-free, delta = eps/(2+eps).
enum class Mode { Vertical, Full };

struct SolverConfig {
  Mode mode = Mode::Vertical;
  Rational epsilon = Rational::from_int(1);
  int list_size = 0;             // 0: adopt the list assignment's size
  std::int64_t step_budget = 0;  // 0:100 * n

  // From 1 + eps = (1 + d) / (1 - d).
  Rational delta() const { return epsilon / (Rational::from_int(2) + epsilon); }

  // Exponent of the vertical scan performed each step.
  PowerSpec vertical_spec() const {
    return PowerSpec(Rational::from_int(1) + (mode == Mode::Vertical ? epsilon : delta()));
  }

  void validate() const {
    if (!(Rational::from_int(0) < epsilon))
      throw Error(Errc::InvalidParameter, "epsilon must be positive");
    if (mode == Mode::Full && !(epsilon < Rational::from_int(2)))
      throw Error(Errc::InvalidParameter,
                  "full mode needs epsilon < 2 so that delta = eps/(2+eps) stays below 1/2");
  }

  // List sizes at which the procedures are guaranteed to terminate with
  // probability 1: 4*ceil(1/eps) for the vertical goal, and
  // ceil(12*(ceil(1/delta)+1)*maxDegree^{1+eps}) for the full goal.
  static int guaranteed_list_size_vertical(const Rational& eps) {
    std::int64_t c = 4 * Rational(eps.den(), eps.num()).ceil_value();
    if (c > 1'000'000'000) throw Error(Errc::InfeasibleParameters, "list size out of range");
    return (int)c;
  }
  static int guaranteed_list_size_full(const Rational& eps, int max_degree) {
    Rational d = eps / (Rational::from_int(2) + eps);
    std::int64_t base = 12 * (Rational(d.den(), d.num()).ceil_value() + 1);
    // ceil(base * D^{(p+q)/q}) = least z with z^q >= base^q * D^{p+q}
    std::int64_t p = eps.num(), q = eps.den();
    unsigned __int128 target = 1;
    auto mul = [&](unsigned __int128 a, unsigned __int128 b) -> unsigned __int128 {
      if (b != 0 && a > (unsigned __int128)-1 / b)
        throw Error(Errc::InfeasibleParameters, "list size too large to compute exactly");
      return a * b;
    };
    for (std::int64_t i = 0; i < q; ++i) target = mul(target, (unsigned __int128)base);
    for (std::int64_t i = 0; i < p + q; ++i) target = mul(target, (unsigned __int128)max_degree);
    std::int64_t lo = 0, hi = 1'000'000'000;
    auto pow_ge = [&](std::int64_t z) {  // z^q >= target, saturating
      unsigned __int128 acc = 1;
      for (std::int64_t i = 0; i < q; ++i) {
        if (z != 0 && acc > (unsigned __int128)-1 / (unsigned __int128)z) return true;
        acc *= (unsigned __int128)z;
        if (acc >= target) return true;
      }
      return acc >= target;
    };
    while (lo < hi) {
      std::int64_t mid = lo + (hi - lo) / 2;
      if (pow_ge(mid)) hi = mid; else lo = mid + 1;
    }
    if (lo >= 1'000'000'000) throw Error(Errc::InfeasibleParameters, "list size out of range");
    return (int)std::max<std::int64_t>(lo, 1);
  }

  SolverConfig finalized(const RootedTree& t, const ListAssignment& lists) const {
    validate();
    SolverConfig c = *this;
    if (c.list_size == 0) c.list_size = lists.list_size;
    if (c.list_size != lists.list_size)
      throw Error(Errc::ListSizeMismatch, "config wants lists of size " + std::to_string(c.list_size) +
                                              ", got " + std::to_string(lists.list_size));
    if (c.step_budget == 0) c.step_budget = 100LL * t.n();
    return c;
  }
};

// List-index decisions driving a run; entries are 1-based, in [1, listSize].
struct Seed {
  std::vector<int> entries;
};

enum class StepKind { Positive, VerticalNegative, SquareNegative };

// What the next seed entry will do, as a function of the state alone. The
// vertex receiving the entry's color never depends on the entry itself; the
// decoder leans on exactly this.
struct StepPlan {
  StepKind kind = StepKind::Positive;
  VertexId target = -1;
  std::int64_t l = 0, m = 0, k = 0;
  std::vector<VertexId> square_path;  // (v_2l, ..., v_1) for SquareNegative
};

// nullopt means the state is finished: everything colored and no occurrence
// anchored at the last vertex. A finished state consumes no further entries.
inline std::optional<StepPlan> step_target(const PartialColoring& f, const SolverConfig& cfg) {
  const RootedTree& t = f.tree();
  if (f.empty()) {
    StepPlan p;
    p.kind = StepKind::Positive;
    p.target = t.root();
    return p;
  }
  VertexId v = f.current();
  PowerSpec vs = cfg.vertical_spec();
  if (auto hit = find_vertical_power(f, v, vs)) {
    StepPlan p;
    p.kind = StepKind::VerticalNegative;
    p.l = hit->l;
    p.m = hit->m;
    // Recolor the topmost vertex of the repeated block, m-1 steps above v.
    p.target = hit->vertices[p.m - 1];
    return p;
  }
  if (cfg.mode == Mode::Full) {
    if (auto sq = find_square_from(f, v)) {
      StepPlan p;
      p.kind = StepKind::SquareNegative;
      p.l = sq->l;
      p.k = sq->k;
      // The path climbs from v, so its second vertex is v's parent and the
      // tip index k never reaches 2l.
      THUE_CHECK(p.k < 2 * p.l, "square tip at the query vertex");
      p.m = std::min(p.l, 2 * p.l - p.k);
      p.target = sq->vertices[p.m - 1];
      p.square_path = std::move(sq->vertices);
      return p;
    }
  }
  if (f.complete()) return std::nullopt;
  StepPlan p;
  p.kind = StepKind::Positive;
  p.target = v + 1;
  return p;
}

struct StepOutcome {
  StepKind kind = StepKind::Positive;
  VertexId recolored = -1;
  Color chosen = kUncolored;
  VertexId prev_current = -1;
  std::int64_t l = 0, m = 0, k = 0;
  std::vector<VertexId> square_path;
  // Colors wiped from erased vertices that are not on the ancestor chain
  // between the recolored vertex and prev_current, in preorder order. The
  // chain colors are recomputable from the repetition; these are not.
  std::vector<Color> erased_off_path;
};

inline StepOutcome apply_planned(PartialColoring& f, const ListAssignment& lists, StepPlan plan,
                                 int n) {
  StepOutcome out;
  out.kind = plan.kind;
  out.prev_current = f.current();
  out.l = plan.l;
  out.m = plan.m;
  out.k = plan.k;
  out.square_path = std::move(plan.square_path);
  Color c = lists.nth(plan.target, n);
  if (plan.kind == StepKind::Positive) {
    THUE_CHECK(plan.target == f.current() + 1, "positive step must color the next preorder vertex");
    f.extend(c);
  } else {
    VertexId v = f.current();
    for (VertexId x = plan.target; x <= v; ++x)
      if (!f.tree().is_ancestor_or_self(x, v)) out.erased_off_path.push_back(f.color(x));
    f.erase_down_and_recolor(plan.target, c);
  }
  out.recolored = plan.target;
  out.chosen = c;
  return out;
}

inline StepOutcome apply_step(PartialColoring& f, const ListAssignment& lists,
                              const SolverConfig& cfg, int n) {
  auto plan = step_target(f, cfg);
  THUE_CHECK(plan.has_value(), "step applied to a finished state");
  return apply_planned(f, lists, std::move(*plan), n);
}

inline StepOutcome next_v(PartialColoring& f, const ListAssignment& lists, const SolverConfig& cfg,
                          int n) {
  if (cfg.mode != Mode::Vertical)
    throw Error(Errc::ConfigMismatch, "next_v requires a Vertical-mode config");
  return apply_step(f, lists, cfg, n);
}

inline StepOutcome next_t(PartialColoring& f, const ListAssignment& lists, const SolverConfig& cfg,
                          int n) {
  if (cfg.mode != Mode::Full)
    throw Error(Errc::ConfigMismatch, "next_t requires a Full-mode config");
  return apply_step(f, lists, cfg, n);
}

enum class RunStatus { Completed, SeedExhausted };

struct RunResult {
  PartialColoring state;
  std::vector<StepOutcome> outcomes;
  RunStatus status = RunStatus::SeedExhausted;
  int consumed() const { return (int)outcomes.size(); }
};

// Deterministic replay of a seed. A finished state stops the run without
// consuming the remaining entries.
inline RunResult run(const RootedTree& t, const ListAssignment& lists, const SolverConfig& cfg0,
                     const Seed& seed) {
  lists.validate(t);
  SolverConfig cfg = cfg0.finalized(t, lists);
  RunResult res{PartialColoring(t), {}, RunStatus::SeedExhausted};
  for (int e : seed.entries) {
    if (e < 1 || e > cfg.list_size)
      throw Error(Errc::SeedIndexOutOfRange, "seed entry " + std::to_string(e) + " outside [1," +
                                                 std::to_string(cfg.list_size) + "]");
    auto plan = step_target(res.state, cfg);
    if (!plan) {
      res.status = RunStatus::Completed;
      return res;
    }
    res.outcomes.push_back(apply_planned(res.state, lists, std::move(*plan), e));
  }
  if (!step_target(res.state, cfg)) res.status = RunStatus::Completed;
  return res;
}

struct SolveStats {
  std::int64_t steps = 0;
  std::int64_t positives = 0;
  std::int64_t vertical_negs = 0;
  std::int64_t square_negs = 0;
  int max_depth = 0;
};

enum class SolveStatus { Solved, BudgetExhausted };

struct SolveResult {
  SolveStatus status = SolveStatus::BudgetExhausted;
  PartialColoring state;
  Seed seed;  // consumed entries
  std::vector<StepOutcome> outcomes;
  SolveStats stats;
};

namespace detail {

inline void reverify_solution(const RootedTree& t, const std::vector<Color>& colors,
                              const SolverConfig& cfg) {
  if (cfg.mode == Mode::Vertical) {
    THUE_CHECK(verify_coloring(t, colors, PowerSpec(Rational::from_int(1) + cfg.epsilon),
                               VerifyMode::Vertical)
                   .empty(),
               "solver output fails vertical verification");
  } else {
    THUE_CHECK(
        verify_coloring(t, colors, PowerSpec(Rational::from_int(2)), VerifyMode::AllSimplePaths)
            .empty(),
        "solver output contains a square on a simple path");
    THUE_CHECK(verify_coloring(t, colors, PowerSpec(Rational::from_int(1) + cfg.delta()),
                               VerifyMode::Vertical)
                   .empty(),
               "solver output fails the vertical sub-goal");
  }
}

}  // namespace detail

// Randomized driver: each entry drawn uniformly from [1, listSize]. Every
// returned success has been re-verified against the independent checker.
inline SolveResult solve(const RootedTree& t, const ListAssignment& lists, const SolverConfig& cfg0,
                         std::uint64_t rng_seed) {
  lists.validate(t);
  SolverConfig cfg = cfg0.finalized(t, lists);
  Rng rng(rng_seed);
  SolveResult res{SolveStatus::BudgetExhausted, PartialColoring(t), {}, {}, {}};
  while (true) {
    auto plan = step_target(res.state, cfg);
    if (!plan) {
      detail::reverify_solution(t, res.state.colors(), cfg);
      res.status = SolveStatus::Solved;
      return res;
    }
    if (res.stats.steps >= cfg.step_budget) return res;
    int e = 1 + (int)rng.uniform_below((std::uint64_t)cfg.list_size);
    res.seed.entries.push_back(e);
    auto out = apply_planned(res.state, lists, std::move(*plan), e);
    ++res.stats.steps;
    switch (out.kind) {
      case StepKind::Positive: ++res.stats.positives; break;
      case StepKind::VerticalNegative: ++res.stats.vertical_negs; break;
      case StepKind::SquareNegative: ++res.stats.square_negs; break;
    }
    res.stats.max_depth = std::max(res.stats.max_depth, t.depth(res.state.current()));
    res.outcomes.push_back(std::move(out));
  }
}

}  // namespace thue

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "solver.hpp"

namespace thue {

inline const char* mode_name(Mode m) { return m == Mode::Vertical ? "vertical" : "full"; }

inline Mode mode_from_string(const std::string& s) {
  if (s == "vertical") return Mode::Vertical;
  if (s == "full") return Mode::Full;
  throw Error(Errc::InvalidParameter, "mode must be \"vertical\" or \"full\", got \"" + s + "\"");
}

// Per negative step: which step it was, where the walk stood, and the erased
// colors that no repetition can reproduce (vertices inside the erased
// interval that hang off the ancestor chain — their colors were seed-driven
// and appear nowhere else).
struct NegRecord {
  std::int64_t step = 0;
  VertexId prev_current = -1;
  std::vector<Color> erased_off_path;
  bool operator==(const NegRecord&) const = default;
};

// Everything needed to reconstruct the seed of a run:
//   W     depth of the current vertex after each step,
//   A     base-length annotation per step (meaningful on vertical-negative
//         steps; -1 marks other steps in full mode),
//   Bstar per square-negative step, a block of m entries over {-1,0,1} whose
//         lone nonzero at position |l-k| carries sign(l-k),
//   Cstar per square-negative step, the k-1 child positions walking the
//         square's path down from its tip,
//   Path  colors on the root path of the final current vertex (top-down),
//   neg   the per-negative-step records above,
//   final colors of the final colored prefix, by preorder index.
struct RunLog {
  Mode mode = Mode::Vertical;
  Rational epsilon = Rational::from_int(1);
  int list_size = 0;
  std::vector<std::int64_t> W;
  std::vector<int> A;
  std::vector<int> Bstar;
  std::vector<int> Cstar;
  std::vector<Color> Path;
  std::vector<NegRecord> neg;
  std::vector<Color> final_colors;
  bool operator==(const RunLog&) const = default;
};

inline RunLog encode(const std::vector<StepOutcome>& outcomes, const PartialColoring& final_state,
                     const SolverConfig& cfg) {
  cfg.validate();
  const RootedTree& t = final_state.tree();
  PowerSpec vs = cfg.vertical_spec();
  std::int64_t alph = vs.annot_alphabet();
  RunLog log;
  log.mode = cfg.mode;
  log.epsilon = cfg.epsilon;
  log.list_size = cfg.list_size;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const StepOutcome& out = outcomes[i];
    log.W.push_back(t.depth(out.recolored));
    if (out.kind == StepKind::VerticalNegative) {
      auto lo = vs.min_base_for(out.m);
      THUE_CHECK(lo.has_value(), "repetition length impossible for this exponent");
      std::int64_t a = out.l - *lo;
      THUE_CHECK(a >= 0 && a < alph, "base-length annotation out of range");
      log.A.push_back((int)a);
    } else {
      log.A.push_back(cfg.mode == Mode::Vertical ? 0 : -1);
    }
    if (out.kind == StepKind::SquareNegative) {
      std::int64_t d = out.l - out.k;
      // |l - k| < m: guaranteed because the state carried no vertical
      // repetition when the square was found (and delta < 1/2).
      THUE_CHECK(std::abs(d) < out.m, "square marker outside its block");
      std::size_t base = log.Bstar.size();
      log.Bstar.insert(log.Bstar.end(), out.m, 0);
      if (d != 0) log.Bstar[base + std::abs(d) - 1] = d > 0 ? 1 : -1;
      // child positions from the tip v_k down to v_1; square_path holds
      // (v_2l, ..., v_1), so v_j sits at index 2l - j.
      for (std::int64_t j = out.k; j >= 2; --j) {
        VertexId parent = out.square_path[2 * out.l - j];
        VertexId child = out.square_path[2 * out.l - j + 1];
        const auto& kids = t.children(parent);
        auto it = std::find(kids.begin(), kids.end(), child);
        THUE_CHECK(it != kids.end(), "square path breaks parent-child structure");
        log.Cstar.push_back((int)(it - kids.begin()) + 1);
      }
    }
    if (out.kind != StepKind::Positive)
      log.neg.push_back(NegRecord{(std::int64_t)i, out.prev_current, out.erased_off_path});
  }
  if (!final_state.empty()) {
    VertexId cur = final_state.current();
    log.final_colors.assign(final_state.colors().begin(),
                            final_state.colors().begin() + cur + 1);
    log.Path = final_state.root_path_colors(cur);  // root-first
  }
  return log;
}

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) {
  throw Error(Errc::MalformedLog, what);
}

inline void require_log(bool cond, const char* what) {
  if (!cond) malformed(what);
}

}  // namespace detail

// Reconstructs the seed by walking the log backward from the final coloring:
// an advance step just uncolors the last vertex; a negative step rebuilds the
// erased interval (chain colors from the repetition it retracted, off-chain
// colors from the neg record). The color each step assigned is read off
// before undoing it; its list index is the seed entry. The candidate seed is
// then replayed and re-encoded — any disagreement with the input log throws.
inline Seed decode(const RunLog& log, const RootedTree& t, const ListAssignment& lists,
                   const SolverConfig& cfg0) {
  using detail::require_log;
  lists.validate(t);
  SolverConfig cfg = cfg0.finalized(t, lists);
  if (cfg.mode != log.mode || !(cfg.epsilon == log.epsilon) || cfg.list_size != log.list_size)
    throw Error(Errc::ConfigMismatch, "log header disagrees with the supplied config");
  PowerSpec vs = cfg.vertical_spec();
  std::int64_t alph = vs.annot_alphabet();

  const std::int64_t M = (std::int64_t)log.W.size();
  require_log((std::int64_t)log.A.size() == M, "W and A must have equal length");
  std::int64_t prev_w = 0;
  for (std::int64_t i = 0; i < M; ++i) {
    require_log(log.W[i] >= 1 && log.W[i] - prev_w <= 1, "walk shape violated");
    require_log(log.A[i] >= (cfg.mode == Mode::Full ? -1 : 0) && log.A[i] < alph,
                "annotation outside its alphabet");
    prev_w = log.W[i];
  }
  std::map<std::int64_t, const NegRecord*> neg_at;
  for (const auto& nr : log.neg) {
    require_log(nr.step >= 1 && nr.step < M, "negative-step index out of range");
    require_log(neg_at.emplace(nr.step, &nr).second, "duplicate negative-step record");
    require_log(nr.prev_current >= 0 && nr.prev_current < t.n(), "negative-step vertex out of range");
  }

  // Final state.
  require_log((std::int64_t)log.final_colors.size() <= t.n(), "final coloring too large");
  std::vector<Color> colors(t.n(), kUncolored);
  VertexId current = (VertexId)log.final_colors.size() - 1;
  for (VertexId v = 0; v <= current; ++v) {
    require_log(log.final_colors[v] != kUncolored, "final coloring has a gap");
    colors[v] = log.final_colors[v];
  }
  {
    std::vector<Color> path;
    for (VertexId x = current; x >= 0; x = t.parent(x)) path.push_back(colors[x]);
    std::reverse(path.begin(), path.end());
    require_log(path == log.Path, "Path does not match the final coloring");
  }
  if (M == 0) {
    require_log(current < 0 && log.Bstar.empty() && log.Cstar.empty() && log.neg.empty(),
                "empty walk with leftover data");
    return Seed{};
  }

  auto anc_at = [&](VertexId v, std::int64_t dist) {
    return t.ancestor_at_depth(v, t.depth(v) - (int)dist);
  };

  std::vector<VertexId> recoloree(M, -1);
  std::vector<Color> chosen(M, kUncolored);
  std::size_t b_cursor = log.Bstar.size(), c_cursor = log.Cstar.size();
  for (std::int64_t i = M - 1; i >= 0; --i) {
    require_log(current >= 0, "walk continues past an empty state");
    require_log(t.depth(current) == (int)log.W[i], "walk height disagrees with the state");
    auto it = neg_at.find(i);
    if (it == neg_at.end()) {
      // Advance (descending or hopping): the step colored the then-next
      // preorder vertex, i.e. the state's last one.
      recoloree[i] = current;
      chosen[i] = colors[current];
      colors[current] = kUncolored;
      --current;
      continue;
    }
    const NegRecord& nr = *it->second;
    VertexId u = current;
    VertexId vprev = nr.prev_current;
    std::int64_t m = log.W[i - 1] - log.W[i] + 1;
    require_log(m >= 1, "negative step must not gain height");
    require_log(t.is_ancestor_or_self(u, vprev), "recolored vertex not above the previous one");
    require_log(t.depth(vprev) == (int)log.W[i - 1], "previous vertex disagrees with the walk");
    recoloree[i] = u;
    chosen[i] = colors[u];

    bool is_square = cfg.mode == Mode::Full && log.A[i] == -1;
    if (!is_square) {
      auto lo = vs.min_base_for(m);
      require_log(lo.has_value(), "erased length impossible for this exponent");
      std::int64_t l = *lo + log.A[i];
      require_log(vs.rep_len(l) == m, "annotation incompatible with the erased length");
      require_log(t.depth(vprev) >= l + m, "vertical repetition would leave the tree");
      // Colors of the erased chain, top-down: vertex l+j of the repetition
      // path copies vertex j. Sources above the chain are intact; sources
      // inside it were rebuilt by an earlier iteration of this loop.
      for (std::int64_t j = 1; j <= m; ++j) {
        Color src = colors[anc_at(vprev, l + m - j)];
        require_log(src != kUncolored, "vertical source vertex uncolored");
        colors[anc_at(vprev, m - j)] = src;
      }
    } else {
      require_log(b_cursor >= (std::size_t)m, "square marker data exhausted");
      b_cursor -= (std::size_t)m;
      std::int64_t d = 0;
      for (std::int64_t p = 0; p < m; ++p) {
        int e = log.Bstar[b_cursor + p];
        require_log(e == -1 || e == 0 || e == 1, "square marker entry outside {-1,0,1}");
        if (e != 0) {
          require_log(d == 0, "square marker block has two nonzero entries");
          d = e * (p + 1);
        }
      }
      std::int64_t l = d >= 0 ? m : m - d;
      std::int64_t k = d >= 0 ? m - d : m - 2 * d;
      require_log(l >= 1 && k >= 1 && k < 2 * l, "square marker decodes to no valid path");
      require_log(m == std::min(l, 2 * l - k), "square marker inconsistent with erased length");
      require_log(t.depth(vprev) >= 2 * l - k + 1, "square path would leave the tree");
      // Walk down from the tip along the recorded child positions to recover
      // (v_{k-1}, ..., v_1).
      require_log(c_cursor >= (std::size_t)(k - 1), "child-position data exhausted");
      c_cursor -= (std::size_t)(k - 1);
      std::vector<VertexId> leg;
      {
        VertexId x = anc_at(vprev, 2 * l - k);
        for (std::int64_t j = 0; j < k - 1; ++j) {
          int pos = log.Cstar[c_cursor + j];
          const auto& kids = t.children(x);
          require_log(pos >= 1 && pos <= (int)kids.size(), "child position out of range");
          x = kids[pos - 1];
          leg.push_back(x);
        }
      }
      for (std::int64_t j = 2 * l - m + 1; j <= 2 * l; ++j) {
        std::int64_t sj = j - l;  // source index; sources all survived the erase
        VertexId src_v = sj >= k ? anc_at(vprev, 2 * l - sj) : leg[(std::size_t)(k - 1 - sj)];
        Color src = colors[src_v];
        require_log(src != kUncolored, "square source vertex uncolored");
        colors[anc_at(vprev, 2 * l - j)] = src;
      }
    }
    // Off-chain erased colors come straight from the record.
    std::size_t idx = 0;
    for (VertexId x = u; x <= vprev; ++x) {
      if (t.is_ancestor_or_self(x, vprev)) continue;
      require_log(idx < nr.erased_off_path.size(), "missing off-chain colors");
      colors[x] = nr.erased_off_path[idx++];
    }
    require_log(idx == nr.erased_off_path.size(), "surplus off-chain colors");
    current = vprev;
  }
  require_log(current == -1, "log does not unwind to the empty state");
  require_log(b_cursor == 0 && c_cursor == 0, "leftover square annotation data");

  Seed seed;
  seed.entries.reserve(M);
  for (std::int64_t i = 0; i < M; ++i) {
    require_log(lists.contains(recoloree[i], chosen[i]),
                "a derived color is outside its vertex's list");
    seed.entries.push_back(lists.index_of(recoloree[i], chosen[i]));
  }

  // Replay and re-encode; every field of the log must be reproduced.
  RunResult rr = run(t, lists, cfg, seed);
  require_log(rr.consumed() == M, "replay of the decoded seed stops early");
  require_log(encode(rr.outcomes, rr.state, cfg) == log, "replay does not reproduce the log");
  return seed;
}

// --- walk utilities ---------------------------------------------------------

// A walk of current-vertex depths becomes a ±1 sequence: each step turns into
// +1 followed by as many -1 as needed to land on its value. Heights stay
// positive and one step never climbs more than 1, so the result has all
// prefix sums >= 1 and length <= 2|W|.
inline std::vector<int> expand_walk(const std::vector<std::int64_t>& w) {
  std::vector<int> out;
  std::int64_t at = 0;
  for (std::int64_t v : w) {
    if (v < 1 || v - at > 1) throw Error(Errc::InvalidWalk, "not a height walk");
    out.push_back(1);
    for (std::int64_t x = at + 1; x > v; --x) out.push_back(-1);
    at = v;
  }
  return out;
}

inline std::vector<std::int64_t> contract_walk(const std::vector<int>& steps) {
  std::vector<std::int64_t> out;
  std::int64_t at = 0;
  std::size_t i = 0;
  while (i < steps.size()) {
    if (steps[i] != 1) throw Error(Errc::InvalidWalk, "block must open with +1");
    ++at;
    ++i;
    while (i < steps.size() && steps[i] == -1) {
      --at;
      ++i;
      if (at < 1) throw Error(Errc::InvalidWalk, "walk dips below 1");
    }
    out.push_back(at);
  }
  return out;
}

// Number of ±1 sequences of the given length whose prefix sums all stay >= 1.
inline std::int64_t count_positive_walks(int length) {
  if (length < 0 || length > 60)
    throw Error(Errc::InputTooLarge, "exact walk counting is limited to length 60");
  if (length == 0) return 1;  // the empty sequence has no prefix sums to violate
  // f[h] = number of prefixes ending at height h.
  std::vector<std::int64_t> f(length + 2, 0), g(length + 2, 0);
  std::int64_t total = 0;
  f[0] = 1;
  for (int step = 1; step <= length; ++step) {
    std::fill(g.begin(), g.end(), 0);
    for (int h = 0; h <= length; ++h) {
      if (!f[h]) continue;
      if (h + 1 <= length + 1) g[h + 1] += f[h];
      if (h - 1 >= 1) g[h - 1] += f[h];
    }
    f.swap(g);
  }
  for (int h = 1; h <= length + 1; ++h) total += f[h];
  return total;
}

// --- the counting inequality ------------------------------------------------

// Bits on each side of the seed-vs-log comparison. If M * log2(listSize)
// (vertical goal; the full goal weighs (1+eps)M * log2(listSize * maxDegree))
// ever exceeds the bits recoverable from a log, seeds of that length cannot
// all survive to non-terminating runs — the termination argument. The right
// side here is an upper bound on log2(#logs) with the final-state term
// included, so the crossover is astronomically large for the guaranteed list
// sizes; it is still computed (in log2 space) to make the shape inspectable.
struct CountingReport {
  std::int64_t M = 0;
  double left_bits = 0;
  double right_bits = 0;
  double walk_bits = 0;
  double annot_bits = 0;
  double square_marker_bits = 0;
  double child_position_bits = 0;
  double path_bits = 0;
  // Exact number of length-2m positive ±1 walks for m = 1..8.
  std::vector<std::int64_t> small_walk_counts;
  // log2 of the least M where left exceeds right, if it exists.
  std::optional<double> crossover_log2_m;
};

namespace detail {

inline double log2_binom(double n, double k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return (std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)) / std::log(2.0);
}

// log2 of the number of positive walks of length at most 2M.
inline double walk_bits_at(double M) {
  if (M <= 0) return 0;
  if (2 * M <= 60) {
    std::int64_t total = 1;  // the empty walk
    for (int L = 1; L <= (int)(2 * M); ++L) total += count_positive_walks(L);
    return std::log2((double)total);
  }
  // Sum bounded by 4 * (#walks of length exactly 2M) = 4 * C(2M-1, M-1).
  return 2.0 + log2_binom(2 * M - 1, M - 1);
}

}  // namespace detail

inline CountingReport counting_report(const SolverConfig& cfg, int tree_size, std::int64_t M,
                                      int max_degree) {
  cfg.validate();
  if (tree_size < 1 || M < 1 || cfg.list_size < 1)
    throw Error(Errc::InvalidParameter, "counting report needs tree_size, M, listSize >= 1");
  PowerSpec vs = cfg.vertical_spec();
  const double alph = (double)vs.annot_alphabet();
  const double c = (double)cfg.list_size;
  const double deg = std::max(max_degree, 1);
  const double one_plus_eps = 1.0 + (double)cfg.epsilon.num() / (double)cfg.epsilon.den();
  const bool full = cfg.mode == Mode::Full;

  auto left_at = [&](double m) {
    return full ? one_plus_eps * m * std::log2(c * deg) : m * std::log2(c);
  };
  const double path_bits = std::log2((double)tree_size) + tree_size * std::log2(c);
  auto right_at = [&](double m) {
    double r = detail::walk_bits_at(m) + m * std::log2(alph) + path_bits;
    if (full) {
      r += m * std::log2(3.0);
      r += one_plus_eps * m * std::log2(std::max(deg - 1, 1.0));
    }
    return r;
  };

  CountingReport rep;
  rep.M = M;
  rep.left_bits = left_at((double)M);
  rep.walk_bits = detail::walk_bits_at((double)M);
  rep.annot_bits = M * std::log2(alph);
  rep.square_marker_bits = full ? M * std::log2(3.0) : 0.0;
  rep.child_position_bits = full ? one_plus_eps * M * std::log2(std::max(deg - 1, 1.0)) : 0.0;
  rep.path_bits = path_bits;
  rep.right_bits = rep.walk_bits + rep.annot_bits + rep.square_marker_bits +
                   rep.child_position_bits + rep.path_bits;
  for (int m = 1; m <= 8; ++m) rep.small_walk_counts.push_back(count_positive_walks(2 * m));

  auto diff = [&](double m) { return left_at(m) - right_at(m); };
  double found = -1;
  for (int j = 0; j <= 50 && found < 0; ++j) {
    double mj = std::ldexp(1.0, j);
    if (diff(mj) > 0) {
      double lo = j == 0 ? 1.0 : std::ldexp(1.0, j - 1), hi = mj;
      while (hi - lo > 1) {
        double mid = std::floor((lo + hi) / 2);
        (diff(mid) > 0 ? hi : lo) = mid;
      }
      found = hi;
    }
  }
  if (found > 0) {
    rep.crossover_log2_m = std::log2(found);
  } else {
    // Per-step rates cancel (or not) up to the 0.5*log2(pi*M) walk deficit;
    // solve the tail in closed form.
    double a = full ? one_plus_eps * std::log2(c * deg) - 2.0 - std::log2(alph) - std::log2(3.0) -
                          one_plus_eps * std::log2(std::max(deg - 1, 1.0))
                    : std::log2(c) - 2.0 - std::log2(alph);
    if (a > 1e-12) {
      rep.crossover_log2_m = std::log2((path_bits + 3.0) / a);
    } else if (a > -1e-12) {
      // 0.5*log2(pi*M) = path_bits + 3  =>  log2 M = 2*(path_bits+3) - log2 pi
      rep.crossover_log2_m = 2.0 * (path_bits + 3.0) - std::log2(3.14159265358979323846);
    }
  }
  return rep;
}

// --- serialization ----------------------------------------------------------

inline nlohmann::json log_to_json(const RunLog& log) {
  nlohmann::json neg = nlohmann::json::array();
  for (const auto& nr : log.neg)
    neg.push_back({{"step", nr.step}, {"prev", nr.prev_current}, {"erased", nr.erased_off_path}});
  return nlohmann::json{{"mode", mode_name(log.mode)}, {"epsilon", log.epsilon.str()},
                        {"listSize", log.list_size},   {"W", log.W},
                        {"A", log.A},                  {"Bstar", log.Bstar},
                        {"Cstar", log.Cstar},          {"Path", log.Path},
                        {"neg", neg},                  {"final", log.final_colors}};
}

inline RunLog log_from_json(const nlohmann::json& j) {
  try {
    RunLog log;
    log.mode = mode_from_string(j.at("mode").get<std::string>());
    log.epsilon = Rational::parse(j.at("epsilon").get<std::string>());
    log.list_size = j.at("listSize").get<int>();
    log.W = j.at("W").get<std::vector<std::int64_t>>();
    log.A = j.at("A").get<std::vector<int>>();
    log.Bstar = j.at("Bstar").get<std::vector<int>>();
    log.Cstar = j.at("Cstar").get<std::vector<int>>();
    log.Path = j.at("Path").get<std::vector<Color>>();
    for (const auto& e : j.at("neg")) {
      NegRecord nr;
      nr.step = e.at("step").get<std::int64_t>();
      nr.prev_current = e.at("prev").get<VertexId>();
      nr.erased_off_path = e.at("erased").get<std::vector<Color>>();
      log.neg.push_back(std::move(nr));
    }
    log.final_colors = j.at("final").get<std::vector<Color>>();
    return log;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    detail::malformed(std::string("log json: ") + e.what());
  }
}

}  // namespace thue

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "coloring.hpp"
#include "errors.hpp"
#include "power.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace thue {

enum class VerifyMode { Vertical, AllSimplePaths };

struct Violation {
  VertexId endpoint_a = -1;  // path endpoints; for vertical hits a = topmost
  VertexId endpoint_b = -1;
  std::int64_t start = 0;    // offset of the occurrence along the a→b word
  std::int64_t l = 0;        // base length
};

namespace detail {

inline void require_total(const RootedTree& t, const std::vector<Color>& colors) {
  if ((int)colors.size() != t.n())
    throw Error(Errc::PartialColoringGiven, "coloring has " + std::to_string(colors.size()) +
                                                " entries for " + std::to_string(t.n()) + " vertices");
  for (VertexId v = 0; v < t.n(); ++v)
    if (colors[v] == kUncolored)
      throw Error(Errc::PartialColoringGiven, "vertex " + std::to_string(v) + " is uncolored");
}

inline VertexId lca(const RootedTree& t, VertexId a, VertexId b) {
  while (a != b) {
    if (t.depth(a) >= t.depth(b)) a = t.parent(a); else b = t.parent(b);
  }
  return a;
}

// Word along the simple path a → b (inclusive both ends).
inline std::vector<Color> path_word(const RootedTree& t, const std::vector<Color>& colors,
                                    VertexId a, VertexId b) {
  VertexId top = lca(t, a, b);
  std::vector<Color> word;
  for (VertexId x = a;; x = t.parent(x)) {
    word.push_back(colors[x]);
    if (x == top) break;
  }
  std::vector<Color> tail;
  for (VertexId x = b; x != top; x = t.parent(x)) tail.push_back(colors[x]);
  word.insert(word.end(), tail.rbegin(), tail.rend());
  return word;
}

}  // namespace detail

// Every x^r occurrence on a vertical path is reported exactly once, anchored
// at its deepest vertex. AllSimplePaths reports the first occurrence on each
// endpoint pair's path (so one underlying occurrence may surface for several
// pairs, but a clean coloring always yields an empty list).
inline std::vector<Violation> verify_coloring(const RootedTree& t, const std::vector<Color>& colors,
                                              const PowerSpec& spec, VerifyMode mode) {
  detail::require_total(t, colors);
  std::vector<Violation> out;
  if (mode == VerifyMode::Vertical) {
    std::vector<Color> up;
    for (VertexId v = 0; v < t.n(); ++v) {
      int d = t.depth(v);
      up.clear();
      for (VertexId x = v; x >= 0; x = t.parent(x)) up.push_back(colors[x]);
      for (std::int64_t l = 1; spec.window_len(l) <= d; ++l) {
        std::int64_t m = spec.rep_len(l);
        bool hit = true;
        for (std::int64_t j = 0; j < m && hit; ++j) hit = up[j] == up[j + l];
        if (hit)
          out.push_back(Violation{t.ancestor_at_depth(v, d - (int)(l + m) + 1), v, 0, l});
      }
    }
    return out;
  }
  for (VertexId a = 0; a < t.n(); ++a)
    for (VertexId b = a + 1; b < t.n(); ++b) {
      auto word = detail::path_word(t, colors, a, b);
      if (auto hit = contains_power(word, spec))
        out.push_back(Violation{a, b, hit->start, hit->l});
    }
  return out;
}

struct Verdict {
  bool colorable = false;
  std::optional<std::vector<Color>> witness;  // present iff colorable
  std::int64_t nodes_explored = 0;
};

namespace detail {

// Any new occurrence created by coloring vertex v (over the preorder-prefix
// domain) has v as an endpoint of its window: along a simple path the two
// endpoints carry the maximal preorder labels. So testing occurrences
// anchored at v after each placement is a complete incremental check.
inline bool placement_ok(const RootedTree& t, const std::vector<Color>& colors, VertexId v,
                         const PowerSpec& spec, VerifyMode mode, std::vector<Color>& word) {
  auto anchored_free = [&](const std::vector<Color>& w) {
    std::int64_t len = (std::int64_t)w.size();
    for (std::int64_t l = 1; spec.window_len(l) <= len; ++l) {
      std::int64_t wl = spec.window_len(l);
      bool hit = true;
      for (std::int64_t i = l; i < wl && hit; ++i) hit = w[i] == w[i - l];
      if (hit) return false;
    }
    return true;
  };
  word.clear();
  for (VertexId x = v; x >= 0; x = t.parent(x)) word.push_back(colors[x]);
  if (!anchored_free(word)) return false;
  if (mode == VerifyMode::Vertical) return true;
  for (VertexId u = 0; u < v; ++u) {
    word = path_word(t, colors, v, u);
    if (!anchored_free(word)) return false;
  }
  return true;
}

}  // namespace detail

// Exact backtracking search for a coloring from the lists that avoids x^r
// occurrences (vertical ones, or on every simple path). Colors are tried in
// list order, so the witness is the preorder-lexicographically least one and
// the result is deterministic.
inline Verdict exhaustive_choosable(const RootedTree& t, const ListAssignment& lists,
                                    const PowerSpec& spec, VerifyMode mode,
                                    std::int64_t node_bound = 100'000'000) {
  lists.validate(t);
  std::vector<Color> colors(t.n(), kUncolored);
  std::vector<Color> word;
  Verdict verdict;
  auto dfs = [&](auto&& self, VertexId v) -> bool {
    if (v == t.n()) return true;
    for (Color c : lists.lists[v]) {
      if (++verdict.nodes_explored > node_bound)
        throw Error(Errc::SearchSpaceTooLarge, "exceeded " + std::to_string(node_bound) + " nodes");
      colors[v] = c;
      if (detail::placement_ok(t, colors, v, spec, mode, word) && self(self, v + 1)) return true;
    }
    colors[v] = kUncolored;
    return false;
  };
  verdict.colorable = dfs(dfs, 0);
  if (verdict.colorable) {
    THUE_CHECK(verify_coloring(t, colors, spec, mode).empty(), "witness fails re-verification");
    verdict.witness = colors;
  }
  return verdict;
}

// Prefix of a square-free ternary word: iterate 0→012, 1→02, 2→1 from "0".
// Square-freeness is established behaviorally by the detectors in the tests.
inline std::vector<Color> thue_ternary(std::int64_t length) {
  if (length < 1) throw Error(Errc::InvalidParameter, "length must be positive");
  std::vector<Color> w{0};
  while ((std::int64_t)w.size() < length) {
    std::vector<Color> nx;
    nx.reserve(w.size() * 3);
    for (Color c : w) {
      switch (c) {
        case 0: nx.push_back(0); nx.push_back(1); nx.push_back(2); break;
        case 1: nx.push_back(0); nx.push_back(2); break;
        default: nx.push_back(1); break;
      }
    }
    THUE_CHECK(nx.size() > w.size(), "substitution must grow");
    w = std::move(nx);
  }
  w.resize(length);
  return w;
}

// Generate-and-erase on a plain sequence: append a random entry from the next
// list; whenever the sequence ends with a square, drop its second half and
// continue. The result is square-free by construction (checked once more
// before returning).
inline std::vector<Color> list_sequence_solve(const std::vector<std::vector<Color>>& lists, Rng& rng,
                                              int attempts = 10) {
  const std::int64_t n = (std::int64_t)lists.size();
  for (const auto& l : lists) {
    if ((int)l.size() < 4)
      throw Error(Errc::InfeasibleParameters, "sequence lists must have at least 4 entries");
    auto sorted = l;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(Errc::InvalidParameter, "list entries must be distinct");
  }
  const std::int64_t budget = 1000 + 50 * n;  // appends per attempt; drift makes this generous
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::vector<Color> seq;
    std::int64_t appends = 0;
    while ((std::int64_t)seq.size() < n && appends < budget) {
      const auto& list = lists[seq.size()];
      seq.push_back(list[rng.uniform_below(list.size())]);
      ++appends;
      // smallest square suffix
      std::int64_t len = (std::int64_t)seq.size();
      for (std::int64_t l = 1; 2 * l <= len; ++l) {
        bool sq = true;
        for (std::int64_t i = 0; i < l && sq; ++i) sq = seq[len - 1 - i] == seq[len - 1 - l - i];
        if (sq) {
          seq.resize(len - l);
          break;
        }
      }
    }
    if ((std::int64_t)seq.size() == n) {
      THUE_CHECK(!contains_power(seq, PowerSpec(Rational(2, 1))), "erase loop left a square");
      return seq;
    }
  }
  throw Error(Errc::BudgetExhausted, "sequence solver exceeded its append budget");
}

// Structural fact behind the two-phase analysis: wherever a simple path
// carries an x^{2+eps} block, one of its two vertical legs already carries an
// x^{1+eps/2} block. True on every input if the implementation is right; the
// tests hammer it with random colorings.
inline bool check_reduction(const RootedTree& t, const std::vector<Color>& colors,
                            const Rational& eps) {
  detail::require_total(t, colors);
  PowerSpec big(Rational::from_int(2) + eps);
  PowerSpec half(Rational::from_int(1) + eps / Rational::from_int(2));
  for (VertexId a = 0; a < t.n(); ++a)
    for (VertexId b = a + 1; b < t.n(); ++b) {
      auto word = detail::path_word(t, colors, a, b);
      if (!contains_power(word, big)) continue;
      VertexId top = detail::lca(t, a, b);
      std::vector<Color> leg_a, leg_b;
      for (VertexId x = a;; x = t.parent(x)) {
        leg_a.push_back(colors[x]);
        if (x == top) break;
      }
      for (VertexId x = b;; x = t.parent(x)) {
        leg_b.push_back(colors[x]);
        if (x == top) break;
      }
      if (!contains_power(leg_a, half) && !contains_power(leg_b, half)) return false;
    }
  return true;
}

}  // namespace thue

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coloring.hpp"
#include "errors.hpp"
#include "rational.hpp"
#include "tree.hpp"

namespace thue {

using Seq = std::span<const Color>;

// Exponent r = 1 + eps > 1, exact. A sequence is of the form x^r with base
// length l exactly when its length is l + ceil(eps*l) and it has period l;
// equivalently it splits into floor(r) copies of the base followed by the
// base prefix of length ceil(frac(r)*l). Both views are implemented below
// (period view in the scanners, block view in is_of_form) so they can serve
// as independent cross-checks.
struct PowerSpec {
  Rational r;
  Rational eps;

  explicit PowerSpec(Rational r_) : r(r_), eps(r_ - Rational::from_int(1)) {
    if (!(Rational::from_int(1) < r))
      throw Error(Errc::InvalidParameter, "power exponent must exceed 1, got " + r.str());
  }
  static PowerSpec parse(const std::string& s) { return PowerSpec(Rational::parse(s)); }

  // m: number of repeated symbols past the base.
  std::int64_t rep_len(std::int64_t l) const { return eps.ceil_mul(l); }
  std::int64_t window_len(std::int64_t l) const { return l + rep_len(l); }

  // ceil(1/eps): size of the base-length annotation alphabet.
  std::int64_t annot_alphabet() const { return Rational(eps.den(), eps.num()).ceil_value(); }

  // Smallest base length l with rep_len(l) == m; the annotation stored for a
  // negative step is l - min_base_for(m), which lives in [0, annot_alphabet).
  // Empty when no base yields m (rep_len skips values once eps > 1), which a
  // decoder must treat as bad input rather than a broken invariant.
  std::optional<std::int64_t> min_base_for(std::int64_t m) const {
    if (m < 1) return std::nullopt;
    std::int64_t l = eps.floor_div_into(m - 1) + 1;
    if (rep_len(l) != m) return std::nullopt;
    return l;
  }
};

struct PowerHit {
  std::int64_t start = 0;  // offset of the occurrence
  std::int64_t l = 0;      // base length
  std::int64_t m = 0;      // repeated symbols past the base
};

namespace detail {
// window_len(l) for l = 1..(largest l whose window fits in len); index 0 unused.
inline std::vector<std::int64_t> window_table(const PowerSpec& spec, std::int64_t len) {
  std::vector<std::int64_t> w{0};
  for (std::int64_t l = 1; l <= len; ++l) {
    std::int64_t wl = spec.window_len(l);
    if (wl > len) break;
    w.push_back(wl);
  }
  return w;
}
}  // namespace detail

// Block-structure view: does the whole sequence equal x^r for some base?
// Returns the base length. The base length is unique if it exists: the
// window length is strictly increasing in l.
inline std::optional<std::int64_t> power_base_length(Seq s, const PowerSpec& spec) {
  std::int64_t len = (std::int64_t)s.size();
  if (len < 1) return std::nullopt;
  std::int64_t lo = 1, hi = len, n = -1;
  while (lo <= hi) {
    std::int64_t mid = lo + (hi - lo) / 2, w = spec.window_len(mid);
    if (w == len) { n = mid; break; }
    if (w < len) lo = mid + 1; else hi = mid - 1;
  }
  if (n < 0) return std::nullopt;
  std::int64_t full = spec.r.floor_value();
  std::int64_t rest = len - full * n;
  // rest = ceil(n*eps) - (full-1)*n can reach n (e.g. a single-letter base
  // rounded up to a whole extra copy), never exceed it
  THUE_CHECK(rest >= 0 && rest <= n, "block split inconsistent");
  for (std::int64_t b = 1; b < full; ++b)
    for (std::int64_t i = 0; i < n; ++i)
      if (s[b * n + i] != s[i]) return std::nullopt;
  for (std::int64_t i = 0; i < rest; ++i)
    if (s[full * n + i] != s[i]) return std::nullopt;
  return n;
}

inline bool is_of_form(Seq s, const PowerSpec& spec) { return power_base_length(s, spec).has_value(); }

// Scan for any contiguous occurrence of the form x^r, via the period view.
// Ties: smallest start, then smallest base length.
inline std::optional<PowerHit> contains_power(Seq s, const PowerSpec& spec) {
  const std::int64_t len = (std::int64_t)s.size();
  const auto w = detail::window_table(spec, len);
  const std::int64_t lmax = (std::int64_t)w.size() - 1;
  for (std::int64_t start = 0; start < len; ++start) {
    for (std::int64_t l = 1; l <= lmax && start + w[l] <= len; ++l) {
      const Color* p = s.data() + start;
      std::int64_t wl = w[l];
      bool ok = true;
      for (std::int64_t t = l; t < wl; ++t)
        if (p[t] != p[t - l]) { ok = false; break; }
      if (ok) return PowerHit{start, l, wl - l};
    }
  }
  return std::nullopt;
}

// All occurrences, for the small-scale analyses.
inline std::vector<PowerHit> enumerate_powers(Seq s, const PowerSpec& spec) {
  const std::int64_t len = (std::int64_t)s.size();
  const auto w = detail::window_table(spec, len);
  std::vector<PowerHit> out;
  for (std::int64_t start = 0; start < len; ++start)
    for (std::int64_t l = 1; l < (std::int64_t)w.size() && start + w[l] <= len; ++l) {
      bool ok = true;
      for (std::int64_t t = l; t < w[l] && ok; ++t) ok = s[start + t] == s[start + t - l];
      if (ok) out.push_back(PowerHit{start, l, w[l] - l});
    }
  return out;
}

// Literal reference check: every window tested against the block-structure
// view. Cubic; the independent oracle for contains_power.
inline bool brute_force_power_free(Seq s, const PowerSpec& spec, std::int64_t max_len = 64) {
  std::int64_t len = (std::int64_t)s.size();
  if (len > max_len)
    throw Error(Errc::InputTooLarge, "brute force bound is " + std::to_string(max_len));
  for (std::int64_t start = 0; start < len; ++start)
    for (std::int64_t sub = 1; start + sub <= len; ++sub)
      if (is_of_form(s.subspan(start, sub), spec)) return false;
  return true;
}

// --- occurrences anchored at a vertex --------------------------------------

// Vertical occurrence whose deepest vertex is the query vertex: the root-path
// word read top-down ends with an x^r window. vertices run from the query
// vertex upward (deepest first), l + m of them.
struct VerticalHit {
  std::int64_t l = 0;
  std::int64_t m = 0;
  std::vector<VertexId> vertices;
};

inline std::optional<VerticalHit> find_vertical_power(const PartialColoring& f, VertexId v,
                                                      const PowerSpec& spec) {
  const RootedTree& t = f.tree();
  const int d = t.depth(v);
  // up[j] = color of the ancestor j steps above v.
  std::vector<Color> up(d);
  {
    VertexId u = v;
    for (int j = 0; j < d; ++j) {
      if (!f.is_colored(u))
        throw Error(Errc::UncoloredAncestor, "vertex " + std::to_string(u) + " on the root path is uncolored");
      up[j] = f.color(u);
      u = t.parent(u);
    }
  }
  // Top-down word w = reverse(up); an x^r window suffix-anchored at v with
  // base l means w has period l there, i.e. up[j] == up[j+l] for j < m.
  for (std::int64_t l = 1; spec.window_len(l) <= d; ++l) {
    std::int64_t m = spec.rep_len(l);
    bool ok = true;
    for (std::int64_t j = 0; j < m && ok; ++j) ok = up[j] == up[j + l];
    if (!ok) continue;
    VerticalHit hit;
    hit.l = l;
    hit.m = m;
    hit.vertices.reserve(l + m);
    VertexId u = v;
    for (std::int64_t j = 0; j < l + m; ++j) { hit.vertices.push_back(u); u = t.parent(u); }
    return hit;
  }
  return std::nullopt;
}

// Square occurrence on a simple path with the query vertex as one endpoint.
// vertices are (v_2l, ..., v_1) with v_2l = the query vertex; the path climbs
// from v_2l to the tip and may then descend into an earlier (hence fully
// colored) branch. k = least index i such that v_2l is a descendant of v_i,
// i.e. the tip position; a fully vertical path has k = 1.
struct SquareHit {
  std::int64_t l = 0;
  std::int64_t k = 0;
  std::vector<VertexId> vertices;
};

namespace detail {

// DFS over colored descents below `tip` that avoids `leg_child`, extending
// word y (currently filled to depth `filled`) to exactly `want` entries with
// the period-l constraint checked as entries arrive. First match in child
// order wins, which makes the returned hit the lexicographically least
// descent. path collects the visited vertices.
inline bool descend_square(const RootedTree& t, const PartialColoring& f, VertexId at,
                           VertexId leg_child, std::vector<Color>& y, std::size_t filled,
                           std::size_t want, std::int64_t l, std::vector<VertexId>& path) {
  if (filled == want) return true;
  for (VertexId c : t.children(at)) {
    if (c == leg_child) break;  // later siblings are uncolored; stop at the leg
    THUE_CHECK(f.is_colored(c), "earlier branch unexpectedly uncolored");
    y[filled] = f.color(c);
    if ((std::int64_t)filled >= l && y[filled] != y[filled - l]) continue;
    path.push_back(c);
    if (descend_square(t, f, c, -1, y, filled + 1, want, l, path)) return true;
    path.pop_back();
  }
  return false;
}

}  // namespace detail

inline std::optional<SquareHit> find_square_from(const PartialColoring& f, VertexId v) {
  const RootedTree& t = f.tree();
  THUE_CHECK(f.current() == v, "square scan requires the colored domain to end at the query vertex");
  const int d = t.depth(v);
  std::vector<VertexId> anc(d);
  std::vector<Color> up(d);
  {
    VertexId u = v;
    for (int j = 0; j < d; ++j) { anc[j] = u; up[j] = f.color(u); u = t.parent(u); }
  }
  // Longest colored descent available below each ancestor, to bound the scan.
  // Earlier children of an ancestor are fully colored, so the descent depth
  // is the subtree height; compute heights lazily per earlier child.
  std::vector<int> max_desc(d, 0);
  {
    // height of subtree rooted at c, in edges, over the colored prefix (the
    // whole subtree of an earlier child is colored).
    auto subtree_height = [&](VertexId c) {
      int h = 0;
      auto [a, b] = t.descendant_interval(c);
      for (VertexId x = a; x <= b; ++x) h = std::max(h, t.depth(x) - t.depth(c));
      return h;
    };
    for (int j = 1; j < d; ++j) {
      VertexId tip = anc[j], leg = anc[j - 1];
      for (VertexId c : t.children(tip)) {
        if (c == leg) break;
        max_desc[j] = std::max(max_desc[j], 1 + subtree_height(c));
      }
    }
  }
  std::int64_t max_total = d;
  for (int j = 1; j < d; ++j) max_total = std::max<std::int64_t>(max_total, (j + 1) + max_desc[j]);

  std::vector<Color> y;
  for (std::int64_t total = 2; total <= max_total; total += 2) {
    std::int64_t l = total / 2;
    // Fully vertical (k = 1) first, then tips closer to v (k ascending).
    if (total <= d) {
      bool ok = true;
      for (std::int64_t j = 0; j < l && ok; ++j) ok = up[j] == up[j + l];
      if (ok) {
        SquareHit hit;
        hit.l = l;
        hit.k = 1;
        hit.vertices.assign(anc.begin(), anc.begin() + total);
        return hit;
      }
    }
    for (std::int64_t a = total - 1; a >= 2; --a) {
      if (a > d) continue;
      std::int64_t b = total - a;
      int j = (int)a - 1;
      if (b > max_desc[j]) continue;
      // y = word from v outward: upward leg then the descent.
      y.assign(total, 0);
      for (std::int64_t i = 0; i < a; ++i) y[i] = up[i];
      bool pre_ok = true;
      for (std::int64_t i = l; i < a && pre_ok; ++i) pre_ok = y[i] == y[i - l];
      if (!pre_ok) continue;
      std::vector<VertexId> desc_path;
      if (detail::descend_square(t, f, anc[j], anc[j - 1], y, a, total, l, desc_path)) {
        SquareHit hit;
        hit.l = l;
        hit.k = total - a + 1;
        hit.vertices.assign(anc.begin(), anc.begin() + a);
        hit.vertices.insert(hit.vertices.end(), desc_path.begin(), desc_path.end());
        THUE_CHECK((std::int64_t)hit.vertices.size() == total, "square path size mismatch");
        THUE_CHECK(t.is_ancestor_or_self(hit.vertices[a - 1], v) &&
                       (b == 0 || !t.is_ancestor_or_self(hit.vertices[a], v)),
                   "square tip index inconsistent");
        return hit;
      }
    }
  }
  return std::nullopt;
}

}  // namespace thue

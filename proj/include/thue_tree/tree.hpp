#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace thue {

using VertexId = int;

// Rooted tree with a fixed planar embedding (ordered children). Vertices are
// renumbered to preorder rank at construction: root = 0, every parent index
// is smaller than its children, and each subtree occupies the contiguous
// interval [v, v + subtree_size(v)). That interval property is what makes
// "erase everything below u" an O(1)-describable operation everywhere else.
// Immutable after construction.
class RootedTree {
 public:
  // edges are (parent, child) pairs in arbitrary vertex labels; child order
  // within a parent is their order of appearance. Labels are renumbered to
  // preorder; preorder_of_label() exposes the mapping.
  static RootedTree from_edges(const std::vector<std::pair<int, int>>& edges, int root_label) {
    // Collect labels and detect duplicate edges up front.
    std::vector<int> labels;
    labels.push_back(root_label);
    for (auto& [p, c] : edges) {
      labels.push_back(p);
      labels.push_back(c);
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    auto idx_of = [&](int label) {
      return (int)(std::lower_bound(labels.begin(), labels.end(), label) - labels.begin());
    };
    int n = (int)labels.size();

    std::vector<std::vector<int>> kids(n);
    std::vector<int> par(n, -1);
    for (auto& [pl, cl] : edges) {
      int p = idx_of(pl), c = idx_of(cl);
      for (int existing : kids[p])
        if (existing == c)
          throw Error(Errc::DuplicateChild, "edge (" + std::to_string(pl) + "," + std::to_string(cl) + ") repeated");
      if (c == idx_of(root_label))
        throw Error(Errc::CycleDetected, "root has an incoming edge");
      if (par[c] != -1)
        throw Error(Errc::CycleDetected, "vertex " + std::to_string(cl) + " has two parents");
      if (p == c) throw Error(Errc::CycleDetected, "self-loop at " + std::to_string(pl));
      par[c] = p;
      kids[p].push_back(c);
    }

    // Iterative preorder from the root; anything unreached is disconnected,
    // and a reached "descendant" that is also an ancestor would have tripped
    // the two-parents check above, so reachability + edge count settle it.
    int root = idx_of(root_label);
    if (root >= n || labels[root] != root_label)
      throw Error(Errc::UnknownVertex, "root label not present");
    RootedTree t;
    t.n_ = n;
    t.parent_.assign(n, -1);
    t.children_.assign(n, {});
    t.depth_.assign(n, 0);
    t.subtree_size_.assign(n, 1);
    t.label_.assign(n, 0);

    std::vector<int> order;
    order.reserve(n);
    std::vector<int> stack{root};
    std::vector<char> seen(n, 0);
    seen[root] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (auto it = kids[v].rbegin(); it != kids[v].rend(); ++it) {
        if (seen[*it]) throw Error(Errc::CycleDetected, "cycle through vertex " + std::to_string(labels[*it]));
        seen[*it] = 1;
        stack.push_back(*it);
      }
    }
    if ((int)order.size() != n)
      throw Error(Errc::DisconnectedInput, "some vertices are unreachable from the root");

    std::vector<int> rank(n);
    for (int i = 0; i < n; ++i) rank[order[i]] = i;
    for (int i = 0; i < n; ++i) {
      int old = order[i];
      t.label_[i] = labels[old];
      t.parent_[i] = par[old] == -1 ? -1 : rank[par[old]];
      t.depth_[i] = par[old] == -1 ? 1 : 0;  // filled below
      for (int c : kids[old]) t.children_[i].push_back(rank[c]);
    }
    for (int i = 1; i < n; ++i) t.depth_[i] = t.depth_[t.parent_[i]] + 1;
    for (int i = n - 1; i >= 1; --i) t.subtree_size_[t.parent_[i]] += t.subtree_size_[i];
    return t;
  }

  int n() const { return n_; }
  VertexId root() const { return 0; }
  VertexId parent(VertexId v) const { check_vertex(v); return parent_[v]; }
  const std::vector<VertexId>& children(VertexId v) const { check_vertex(v); return children_[v]; }
  // Depth counts vertices on the root path: depth(root) = 1.
  int depth(VertexId v) const { check_vertex(v); return depth_[v]; }
  int subtree_size(VertexId v) const { check_vertex(v); return subtree_size_[v]; }
  int original_label(VertexId v) const { check_vertex(v); return label_[v]; }

  int degree(VertexId v) const {
    check_vertex(v);
    return (int)children_[v].size() + (parent_[v] >= 0 ? 1 : 0);
  }
  int max_degree() const {
    int d = 0;
    for (int v = 0; v < n_; ++v) d = std::max(d, degree(v));
    return d;
  }

  // Descendants of v (v included) as the preorder interval [first, last].
  std::pair<VertexId, VertexId> descendant_interval(VertexId v) const {
    check_vertex(v);
    return {v, v + subtree_size_[v] - 1};
  }
  std::vector<VertexId> descendants(VertexId v) const {
    auto [a, b] = descendant_interval(v);
    std::vector<VertexId> out;
    out.reserve(b - a + 1);
    for (int u = a; u <= b; ++u) out.push_back(u);
    return out;
  }
  bool is_ancestor_or_self(VertexId anc, VertexId v) const {
    check_vertex(anc); check_vertex(v);
    return anc <= v && v < anc + subtree_size_[anc];
  }
  // Ancestor of v at the given depth (<= depth(v)).
  VertexId ancestor_at_depth(VertexId v, int d) const {
    check_vertex(v);
    THUE_CHECK(d >= 1 && d <= depth_[v], "ancestor_at_depth out of range");
    while (depth_[v] > d) v = parent_[v];
    return v;
  }

  // v plus len-1 strict ancestors, nearest first.
  std::vector<VertexId> upward_path(VertexId v, int len) const {
    check_vertex(v);
    if (len < 1 || len > depth_[v])
      throw Error(Errc::PathTooLong, "upward path of length " + std::to_string(len) +
                                         " from vertex at depth " + std::to_string(depth_[v]));
    std::vector<VertexId> out;
    out.reserve(len);
    for (int i = 0; i < len; ++i) { out.push_back(v); v = parent_[v]; }
    return out;
  }

  // --- generators -----------------------------------------------------

  static RootedTree path(int n) {
    if (n < 1) throw Error(Errc::InfeasibleParameters, "path needs n >= 1");
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i < n; ++i) e.push_back({i - 1, i});
    return from_edges(e, 0);
  }

  // Complete d-ary tree with h levels (h = 1 is a single vertex).
  static RootedTree complete_dary(int d, int h) {
    if (d < 1 || h < 1) throw Error(Errc::InfeasibleParameters, "complete d-ary needs d >= 1, h >= 1");
    std::int64_t n = 1, layer = 1;
    for (int lv = 1; lv < h; ++lv) {
      layer *= d;
      n += layer;
      if (n > 2'000'000) throw Error(Errc::InfeasibleParameters, "complete d-ary tree too large");
    }
    std::vector<std::pair<int, int>> e;
    int next = 1;
    std::vector<int> frontier{0};
    for (int lv = 1; lv < h; ++lv) {
      std::vector<int> nf;
      for (int p : frontier)
        for (int j = 0; j < d; ++j) { e.push_back({p, next}); nf.push_back(next++); }
      frontier = std::move(nf);
    }
    return from_edges(e, 0);
  }

  // Random attachment: each new vertex picks a uniformly random existing
  // vertex with child count < maxDegree-1 as its parent. The newest vertex is
  // always childless, so an eligible parent always exists for maxDegree >= 2.
  static RootedTree random_attachment(int n, int max_degree, Rng& rng) {
    if (n < 1) throw Error(Errc::InfeasibleParameters, "random tree needs n >= 1");
    if (n > 1 && max_degree < 2)
      throw Error(Errc::InfeasibleParameters, "random tree with n > 1 needs maxDegree >= 2");
    std::vector<std::pair<int, int>> e;
    std::vector<int> child_count(n, 0);
    std::vector<int> eligible{0};
    for (int v = 1; v < n; ++v) {
      std::size_t pick = (std::size_t)rng.uniform_below(eligible.size());
      int p = eligible[pick];
      e.push_back({p, v});
      if (++child_count[p] >= max_degree - 1) {
        eligible[pick] = eligible.back();
        eligible.pop_back();
      }
      eligible.push_back(v);
    }
    return from_edges(e, 0);
  }

 private:
  RootedTree() = default;
  void check_vertex(VertexId v) const {
    if (v < 0 || v >= n_) throw Error(Errc::UnknownVertex, "vertex " + std::to_string(v));
  }

  int n_ = 0;
  std::vector<VertexId> parent_;
  std::vector<std::vector<VertexId>> children_;
  std::vector<int> depth_;
  std::vector<int> subtree_size_;
  std::vector<int> label_;
};

}  // namespace thue

#pragma once

#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace thue {

using Color = int;
inline constexpr Color kUncolored = -1;

// One color list per vertex (indexed by preorder id). All lists have exactly
// list_size distinct entries; colors are nonnegative ints.
struct ListAssignment {
  int list_size = 0;
  std::vector<std::vector<Color>> lists;

  void validate(const RootedTree& t) const {
    if ((int)lists.size() != t.n())
      throw Error(Errc::ListSizeMismatch, "expected " + std::to_string(t.n()) + " lists, got " +
                                              std::to_string(lists.size()));
    for (const auto& l : lists) {
      if ((int)l.size() != list_size)
        throw Error(Errc::ListSizeMismatch, "list with " + std::to_string(l.size()) +
                                                " entries, expected " + std::to_string(list_size));
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (l[i] < 0) throw Error(Errc::InvalidParameter, "colors must be nonnegative");
        for (std::size_t j = i + 1; j < l.size(); ++j)
          if (l[i] == l[j]) throw Error(Errc::InvalidParameter, "list entries must be distinct");
      }
    }
  }

  // n is 1-based, per the seed convention.
  Color nth(VertexId v, int n) const {
    if (n < 1 || n > list_size)
      throw Error(Errc::SeedIndexOutOfRange, "seed entry " + std::to_string(n) + " outside 1.." +
                                                 std::to_string(list_size));
    return lists[v][n - 1];
  }

  bool contains(VertexId v, Color c) const {
    for (int i = 0; i < list_size; ++i)
      if (lists[v][i] == c) return true;
    return false;
  }

  // index of c in v's list, 1-based.
  int index_of(VertexId v, Color c) const {
    for (int i = 0; i < list_size; ++i)
      if (lists[v][i] == c) return i + 1;
    throw Error(Errc::ColorNotInList, "color " + std::to_string(c) + " not in list of vertex " +
                                          std::to_string(v));
  }

  static ListAssignment uniform(const RootedTree& t, const std::vector<Color>& list) {
    ListAssignment a;
    a.list_size = (int)list.size();
    a.lists.assign(t.n(), list);
    return a;
  }

  // Distinct random colors per vertex from the palette {0..palette-1}.
  static ListAssignment random(const RootedTree& t, int list_size, int palette, Rng& rng) {
    if (palette < list_size)
      throw Error(Errc::InfeasibleParameters, "palette smaller than list size");
    ListAssignment a;
    a.list_size = list_size;
    a.lists.reserve(t.n());
    std::vector<Color> pool(palette);
    for (int i = 0; i < palette; ++i) pool[i] = i;
    for (int v = 0; v < t.n(); ++v) {
      // partial Fisher-Yates: first list_size entries become the list
      for (int i = 0; i < list_size; ++i) {
        int j = i + (int)rng.uniform_below((std::uint64_t)(palette - i));
        std::swap(pool[i], pool[j]);
      }
      a.lists.emplace_back(pool.begin(), pool.begin() + list_size);
    }
    return a;
  }
};

// Partial coloring whose domain is exactly the preorder prefix [0, current].
// current == -1 means the empty coloring. This prefix shape is the solver's
// central invariant: erasing a subtree below an ancestor of current always
// leaves a shorter prefix.
class PartialColoring {
 public:
  explicit PartialColoring(const RootedTree& t)
      : tree_(&t), colors_(t.n(), kUncolored), current_(-1) {}

  // Raw constructor for tests and the decoder; validates the prefix shape.
  PartialColoring(const RootedTree& t, std::vector<Color> colors, VertexId current)
      : tree_(&t), colors_(std::move(colors)), current_(current) {
    THUE_CHECK((int)colors_.size() == t.n(), "color vector size mismatch");
    for (int v = 0; v < t.n(); ++v) {
      bool in = v <= current_;
      THUE_CHECK((colors_[v] != kUncolored) == in, "domain is not the preorder prefix [0,current]");
    }
  }

  const RootedTree& tree() const { return *tree_; }
  VertexId current() const { return current_; }
  bool empty() const { return current_ < 0; }
  bool complete() const { return current_ == tree_->n() - 1; }
  bool is_colored(VertexId v) const { return colors_[v] != kUncolored; }
  Color color(VertexId v) const { return colors_[v]; }
  const std::vector<Color>& colors() const { return colors_; }

  // Color the next preorder vertex (current+1).
  void extend(Color c) {
    THUE_CHECK(!complete(), "extend past the last vertex");
    THUE_CHECK(c != kUncolored, "extend with the uncolored sentinel");
    colors_[++current_] = c;
  }

  // Erase everything at or below u (u must be an ancestor-or-self of
  // current), then recolor u; u becomes current.
  void erase_down_and_recolor(VertexId u, Color c) {
    THUE_CHECK(!empty() && tree_->is_ancestor_or_self(u, current_), "erase target must be at or above current");
    THUE_CHECK(c != kUncolored, "recolor with the uncolored sentinel");
    for (VertexId v = u; v <= current_; ++v) colors_[v] = kUncolored;
    colors_[u] = c;
    current_ = u;
  }

  // Colors along the root path of v, root first; v must be colored.
  std::vector<Color> root_path_colors(VertexId v) const {
    if (!is_colored(v)) throw Error(Errc::UncoloredAncestor, "vertex " + std::to_string(v) + " uncolored");
    int d = tree_->depth(v);
    std::vector<Color> out(d);
    for (int i = d - 1; i >= 0; --i) { out[i] = colors_[v]; v = tree_->parent(v); }
    return out;
  }

 private:
  const RootedTree* tree_;
  std::vector<Color> colors_;
  VertexId current_;
};

}  // namespace thue

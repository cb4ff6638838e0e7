#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coloring.hpp"
#include "errors.hpp"
#include "tree.hpp"

namespace thue {

using nlohmann::json;

// Interchange: {"n": int, "root": int, "edges": [[parent, child], ...]}.
// Edge order fixes child order. Labels may be any ints; "n" is a cross-check.
inline RootedTree tree_from_json(const json& j) {
  if (!j.is_object() || !j.contains("root") || !j.contains("edges"))
    throw Error(Errc::SpecParseError, "tree json needs {\"n\",\"root\",\"edges\"}");
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw Error(Errc::SpecParseError, "each edge must be [parent, child]");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  RootedTree t = RootedTree::from_edges(edges, j.at("root").get<int>());
  if (j.contains("n") && j.at("n").get<int>() != t.n())
    throw Error(Errc::SpecParseError, "tree json \"n\"=" + j.at("n").dump() + " but " +
                                          std::to_string(t.n()) + " vertices found");
  return t;
}

inline json tree_to_json(const RootedTree& t) {
  json edges = json::array();
  for (VertexId v = 0; v < t.n(); ++v)
    for (VertexId c : t.children(v))
      edges.push_back(json::array({t.original_label(v), t.original_label(c)}));
  return json{{"n", t.n()}, {"root", t.original_label(t.root())}, {"edges", edges}};
}

namespace detail {

struct DotTokens {
  std::vector<std::string> toks;
  explicit DotTokens(const std::string& src) {
    std::size_t i = 0, n = src.size();
    auto bad = [](const std::string& what) { return Error(Errc::SpecParseError, "dot: " + what); };
    while (i < n) {
      char c = src[i];
      if (std::isspace((unsigned char)c)) { ++i; continue; }
      if (c == '#' || (c == '/' && i + 1 < n && src[i + 1] == '/')) {
        while (i < n && src[i] != '\n') ++i;
        continue;
      }
      if (c == '/' && i + 1 < n && src[i + 1] == '*') {
        i += 2;
        while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) ++i;
        if (i + 1 >= n) throw bad("unterminated comment");
        i += 2;
        continue;
      }
      if (c == '"') {
        std::size_t j = i + 1;
        std::string val;
        while (j < n && src[j] != '"') {
          if (src[j] == '\\' && j + 1 < n) ++j;
          val += src[j++];
        }
        if (j >= n) throw bad("unterminated string");
        toks.push_back(val);
        i = j + 1;
        continue;
      }
      if (std::isalnum((unsigned char)c) || c == '_' || c == '-' || c == '.') {
        std::size_t j = i;
        // "->" is an operator, a leading '-' otherwise starts a number
        if (c == '-' && j + 1 < n && src[j + 1] == '>') {
          toks.push_back("->");
          i = j + 2;
          continue;
        }
        ++j;
        while (j < n && (std::isalnum((unsigned char)src[j]) || src[j] == '_' || src[j] == '.')) ++j;
        toks.push_back(src.substr(i, j - i));
        i = j;
        continue;
      }
      if (c == '{' || c == '}' || c == ';' || c == '[' || c == ']' || c == '=' || c == ',') {
        toks.push_back(std::string(1, c));
        ++i;
        continue;
      }
      throw bad(std::string("unexpected character '") + c + "'");
    }
  }
};

}  // namespace detail

// Minimal DOT digraph reader: edge statements only (attributes ignored), root
// inferred as the unique vertex without an incoming edge. Numeric node ids
// keep their values as labels; otherwise ids are numbered by first appearance.
inline RootedTree tree_from_dot(const std::string& src) {
  detail::DotTokens tz(src);
  const auto& tk = tz.toks;
  auto bad = [](const std::string& what) { return Error(Errc::SpecParseError, "dot: " + what); };
  std::size_t i = 0;
  auto expect = [&](const std::string& s) {
    if (i >= tk.size() || tk[i] != s) throw bad("expected '" + s + "'");
    ++i;
  };
  if (i < tk.size() && tk[i] == "strict") ++i;
  expect("digraph");
  if (i < tk.size() && tk[i] != "{") ++i;  // optional graph name
  expect("{");

  std::vector<std::string> names;           // first-appearance order
  std::vector<std::pair<int, int>> edges;   // indices into names
  auto name_id = [&](const std::string& s) {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == s) return (int)k;
    names.push_back(s);
    return (int)names.size() - 1;
  };
  auto skip_attrs = [&] {
    if (i < tk.size() && tk[i] == "[") {
      int depth = 0;
      do {
        if (tk[i] == "[") ++depth;
        if (tk[i] == "]") --depth;
        ++i;
      } while (i < tk.size() && depth > 0);
    }
  };
  while (i < tk.size() && tk[i] != "}") {
    if (tk[i] == ";") { ++i; continue; }
    if (tk[i] == "graph" || tk[i] == "node" || tk[i] == "edge") {
      ++i;
      skip_attrs();
      continue;
    }
    if (i + 1 < tk.size() && tk[i + 1] == "=") {  // bare graph attribute: id = value
      if (i + 2 >= tk.size()) throw bad("dangling '='");
      i += 3;
      continue;
    }
    int prev = name_id(tk[i++]);
    while (i < tk.size() && tk[i] == "->") {
      ++i;
      if (i >= tk.size()) throw bad("dangling '->'");
      int nxt = name_id(tk[i++]);
      edges.emplace_back(prev, nxt);
      prev = nxt;
    }
    skip_attrs();
  }
  expect("}");
  if (names.empty()) throw bad("no vertices");

  // Prefer the ids' own numeric values when all of them are integers.
  std::vector<int> label(names.size());
  bool all_numeric = true;
  for (std::size_t k = 0; k < names.size() && all_numeric; ++k) {
    try {
      std::size_t pos = 0;
      label[k] = std::stoi(names[k], &pos);
      all_numeric = pos == names[k].size();
    } catch (...) { all_numeric = false; }
  }
  if (!all_numeric)
    for (std::size_t k = 0; k < names.size(); ++k) label[k] = (int)k;

  std::vector<char> has_parent(names.size(), 0);
  for (auto& [p, c] : edges) has_parent[c] = 1;
  int root = -1;
  for (std::size_t k = 0; k < names.size(); ++k)
    if (!has_parent[k]) {
      if (root >= 0) throw Error(Errc::DisconnectedInput, "dot: several source vertices");
      root = (int)k;
    }
  if (root < 0) throw Error(Errc::CycleDetected, "dot: every vertex has an incoming edge");

  std::vector<std::pair<int, int>> labeled;
  labeled.reserve(edges.size());
  for (auto& [p, c] : edges) labeled.emplace_back(label[p], label[c]);
  return RootedTree::from_edges(labeled, label[root]);
}

inline std::string tree_to_dot(const RootedTree& t) {
  std::ostringstream os;
  os << "digraph tree {\n";
  if (t.n() == 1) os << "  " << t.original_label(t.root()) << ";\n";
  for (VertexId v = 0; v < t.n(); ++v)
    for (VertexId c : t.children(v))
      os << "  " << t.original_label(v) << " -> " << t.original_label(c) << ";\n";
  os << "}\n";
  return os.str();
}

// Dispatch on content: JSON objects start with '{'.
inline RootedTree parse_tree(const std::string& src) {
  for (char c : src) {
    if (std::isspace((unsigned char)c)) continue;
    if (c == '{') return tree_from_json(json::parse(src));
    break;
  }
  return tree_from_dot(src);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::SpecParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::SpecParseError, "cannot write " + path);
  out << data;
}

inline RootedTree load_tree(const std::string& path) { return parse_tree(read_file(path)); }

// Lists: {"listSize": k, "lists": <array indexed by vertex label | object
// keyed by vertex label>}. Labels are the tree's original ones; internally
// lists are re-indexed to preorder ids.
inline ListAssignment lists_from_json(const RootedTree& t, const json& j0) {
  json j = j0;
  // Bare form: an array (or label-keyed object) of lists with no wrapper.
  // The common size is inferred; mismatches still fail validation below.
  if (j.is_array() || (j.is_object() && !j.contains("listSize") && !j.contains("lists"))) {
    int size = 0;
    if (j.is_array() && !j.empty() && j.front().is_array()) size = (int)j.front().size();
    if (j.is_object() && !j.empty() && j.begin().value().is_array())
      size = (int)j.begin().value().size();
    j = json{{"listSize", size}, {"lists", j0}};
  }
  if (!j.is_object() || !j.contains("listSize") || !j.contains("lists"))
    throw Error(Errc::SpecParseError, "lists json needs {\"listSize\",\"lists\"}");
  ListAssignment a;
  a.list_size = j.at("listSize").get<int>();
  const json& ls = j.at("lists");
  a.lists.assign(t.n(), {});
  auto take = [&](int label, const json& arr) {
    for (VertexId v = 0; v < t.n(); ++v)
      if (t.original_label(v) == label) {
        a.lists[v] = arr.get<std::vector<Color>>();
        return;
      }
    throw Error(Errc::UnknownVertex, "lists json names vertex " + std::to_string(label));
  };
  if (ls.is_array()) {
    if ((int)ls.size() != t.n())
      throw Error(Errc::ListSizeMismatch, "expected " + std::to_string(t.n()) + " lists");
    for (int label = 0; label < (int)ls.size(); ++label) take(label, ls[label]);
  } else if (ls.is_object()) {
    for (auto it = ls.begin(); it != ls.end(); ++it) take(std::stoi(it.key()), it.value());
  } else {
    throw Error(Errc::SpecParseError, "\"lists\" must be an array or an object");
  }
  a.validate(t);
  return a;
}

inline json lists_to_json(const RootedTree& t, const ListAssignment& a) {
  // Emitted as an object keyed by original label, valid for any labeling.
  json ls = json::object();
  for (VertexId v = 0; v < t.n(); ++v) ls[std::to_string(t.original_label(v))] = a.lists[v];
  return json{{"listSize", a.list_size}, {"lists", ls}};
}

inline json coloring_to_json(const RootedTree& t, const std::vector<Color>& colors) {
  json o = json::object();
  for (VertexId v = 0; v < t.n(); ++v)
    if (colors[v] != kUncolored) o[std::to_string(t.original_label(v))] = colors[v];
  return o;
}

// Total coloring, preorder-indexed, from {"label": color, ...}.
inline std::vector<Color> coloring_from_json(const RootedTree& t, const json& j) {
  if (!j.is_object()) throw Error(Errc::SpecParseError, "coloring must be a json object");
  std::vector<Color> colors(t.n(), kUncolored);
  for (auto it = j.begin(); it != j.end(); ++it) {
    int label = std::stoi(it.key());
    bool found = false;
    for (VertexId v = 0; v < t.n() && !found; ++v)
      if (t.original_label(v) == label) {
        colors[v] = it.value().get<Color>();
        found = true;
      }
    if (!found) throw Error(Errc::UnknownVertex, "coloring names vertex " + std::to_string(label));
  }
  for (VertexId v = 0; v < t.n(); ++v)
    if (colors[v] == kUncolored)
      throw Error(Errc::PartialColoringGiven,
                  "vertex " + std::to_string(t.original_label(v)) + " has no color");
  return colors;
}

}  // namespace thue

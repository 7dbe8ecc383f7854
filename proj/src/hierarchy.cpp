#include "lgb/hierarchy.hpp"

#include <algorithm>
#include <map>

#include "lgb/csv.hpp"
#include "lgb/errors.hpp"

namespace lgb {

Hierarchy Hierarchy::load(const std::string& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) throw ValidationError(path + ": empty hierarchy file");
  std::vector<std::pair<std::string, std::string>> edges;
  edges.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2)
      throw ValidationError(path + ":" + std::to_string(i + 1) +
                            ": expected `parent,child`");
    if (rows[i][0].empty() || rows[i][1].empty())
      throw ValidationError(path + ":" + std::to_string(i + 1) +
                            ": empty node label");
    edges.emplace_back(rows[i][0], rows[i][1]);
  }
  return from_edges(edges, path);
}

Hierarchy Hierarchy::from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::string& origin) {
  // Provisional ids in order of first appearance; children kept in edge order
  // so the pre-order layout is a deterministic function of the file.
  std::unordered_map<std::string, int> id_of;
  std::vector<std::string> labels;
  auto intern = [&](const std::string& label) {
    auto it = id_of.find(label);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(labels.size());
    id_of.emplace(label, id);
    labels.push_back(label);
    return id;
  };

  std::vector<int> parent;
  std::vector<std::vector<int>> children;
  for (const auto& [p, c] : edges) {
    int pi = intern(p);
    int ci = intern(c);
    parent.resize(labels.size(), -1);
    children.resize(labels.size());
    if (pi == ci) throw ValidationError(origin + ": self edge at '" + p + "'");
    if (parent[static_cast<std::size_t>(ci)] != -1)
      throw ValidationError(origin + ": node '" + c + "' has two parents");
    parent[static_cast<std::size_t>(ci)] = pi;
    children[static_cast<std::size_t>(pi)].push_back(ci);
  }
  parent.resize(labels.size(), -1);
  children.resize(labels.size());

  int root = -1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (parent[i] == -1) {
      if (root != -1)
        throw ValidationError(origin + ": multiple roots ('" + labels[static_cast<std::size_t>(root)] +
                              "', '" + labels[i] + "')");
      root = static_cast<int>(i);
    }
  }
  if (root == -1) throw ValidationError(origin + ": no root (cycle)");

  Hierarchy h;
  h.edges_ = edges;

  // Iterative pre-order; also detects nodes unreachable from the root,
  // which can only come from a cycle detached from the main tree.
  std::vector<int> order_of(labels.size(), -1);
  std::vector<int> stack = {root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (order_of[static_cast<std::size_t>(v)] != -1)
      throw ValidationError(origin + ": cycle through '" + labels[static_cast<std::size_t>(v)] + "'");
    int idx = static_cast<int>(h.nodes_.size());
    order_of[static_cast<std::size_t>(v)] = idx;
    Node n;
    n.label = labels[static_cast<std::size_t>(v)];
    int p = parent[static_cast<std::size_t>(v)];
    n.parent = p == -1 ? -1 : order_of[static_cast<std::size_t>(p)];
    n.depth = n.parent == -1 ? 0 : h.nodes_[static_cast<std::size_t>(n.parent)].depth + 1;
    h.nodes_.push_back(std::move(n));
    const auto& cs = children[static_cast<std::size_t>(v)];
    for (auto it = cs.rbegin(); it != cs.rend(); ++it) stack.push_back(*it);
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (order_of[i] == -1)
      throw ValidationError(origin + ": node '" + labels[i] +
                            "' unreachable from root (cycle)");
  }

  for (int i = 1; i < h.size(); ++i) {
    int p = h.nodes_[static_cast<std::size_t>(i)].parent;
    h.nodes_[static_cast<std::size_t>(p)].children.push_back(i);
  }

  // Leaf ranks in pre-order, then pull spans up through parents.
  for (int i = 0; i < h.size(); ++i) {
    Node& n = h.nodes_[static_cast<std::size_t>(i)];
    if (n.children.empty()) {
      n.first_leaf = n.last_leaf = h.leaf_count_;
      h.leaf_nodes_.push_back(i);
      ++h.leaf_count_;
    }
  }
  for (int i = h.size() - 1; i >= 0; --i) {
    Node& n = h.nodes_[static_cast<std::size_t>(i)];
    if (!n.children.empty()) {
      n.first_leaf = h.nodes_[static_cast<std::size_t>(n.children.front())].first_leaf;
      n.last_leaf = h.nodes_[static_cast<std::size_t>(n.children.back())].last_leaf;
    }
  }

  for (int i = 0; i < h.size(); ++i) {
    const auto& label = h.nodes_[static_cast<std::size_t>(i)].label;
    if (!h.by_label_.emplace(label, i).second)
      throw ValidationError(origin + ": duplicate label '" + label + "'");
  }
  return h;
}

Hierarchy Hierarchy::flat(const std::vector<std::string>& leaves) {
  if (leaves.empty()) throw ValidationError("flat hierarchy over zero values");
  std::string root = "*";
  while (std::find(leaves.begin(), leaves.end(), root) != leaves.end()) root += "*";
  std::vector<std::pair<std::string, std::string>> edges;
  edges.reserve(leaves.size());
  for (const auto& leaf : leaves) edges.emplace_back(root, leaf);
  return from_edges(edges, "<flat>");
}

int Hierarchy::index_of(const std::string& label) const {
  auto it = by_label_.find(label);
  return it == by_label_.end() ? -1 : it->second;
}

int Hierarchy::leaf_rank(const std::string& label) const {
  int idx = index_of(label);
  if (idx < 0 || !is_leaf(idx))
    throw ValidationError("'" + label + "' is not a leaf of the hierarchy");
  return node(idx).first_leaf;
}

int Hierarchy::lca(int a, int b) const {
  while (a != b) {
    if (node(a).depth >= node(b).depth)
      a = node(a).parent;
    else
      b = node(b).parent;
  }
  return a;
}

int Hierarchy::lca_of_leaf_ranks(const std::vector<std::int64_t>& ranks) const {
  if (ranks.empty()) throw ValidationError("lca of empty value set");
  int acc = leaf_node(static_cast<int>(ranks[0]));
  for (std::size_t i = 1; i < ranks.size(); ++i)
    acc = lca(acc, leaf_node(static_cast<int>(ranks[i])));
  return acc;
}

}  // namespace lgb

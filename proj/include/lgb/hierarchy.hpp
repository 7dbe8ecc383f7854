#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace lgb {

/// Generalization hierarchy for one categorical attribute. Nodes are stored
/// in pre-order so every subtree owns a contiguous span of leaf ranks; the
/// leaf rank doubles as the integer encoding of a categorical cell.
class Hierarchy {
 public:
  struct Node {
    std::string label;
    int parent = -1;
    int depth = 0;
    int first_leaf = 0;  // inclusive span of leaf ranks under this node
    int last_leaf = 0;
    std::vector<int> children;
  };

  /// Edge-list CSV, one `parent,child` per line, no header. The root is the
  /// unique label that never appears as a child.
  static Hierarchy load(const std::string& path);

  /// Build from in-memory edges (same rules as load).
  static Hierarchy from_edges(
      const std::vector<std::pair<std::string, std::string>>& edges,
      const std::string& origin);

  /// Two-level hierarchy: a fresh root over the given leaves, in order.
  static Hierarchy flat(const std::vector<std::string>& leaves);

  int size() const { return static_cast<int>(nodes_.size()); }
  int leaf_count() const { return leaf_count_; }
  const Node& node(int idx) const { return nodes_[static_cast<std::size_t>(idx)]; }
  int root() const { return 0; }

  /// Node index for a label, -1 if absent.
  int index_of(const std::string& label) const;

  bool is_leaf(int idx) const { return node(idx).children.empty(); }

  /// Node index of the leaf with the given rank.
  int leaf_node(int rank) const { return leaf_nodes_[static_cast<std::size_t>(rank)]; }

  /// Leaf rank of a leaf label; throws if the label is not a leaf.
  int leaf_rank(const std::string& label) const;

  std::int64_t subtree_leaves(int idx) const {
    const Node& n = node(idx);
    return n.last_leaf - n.first_leaf + 1;
  }

  bool subtree_contains(int idx, int leaf_rank) const {
    const Node& n = node(idx);
    return n.first_leaf <= leaf_rank && leaf_rank <= n.last_leaf;
  }

  int lca(int a, int b) const;
  int lca_of_leaf_ranks(const std::vector<std::int64_t>& ranks) const;

  const std::vector<std::pair<std::string, std::string>>& edges() const {
    return edges_;
  }

 private:
  std::vector<Node> nodes_;           // pre-order
  std::vector<int> leaf_nodes_;       // rank -> node index
  std::unordered_map<std::string, int> by_label_;
  std::vector<std::pair<std::string, std::string>> edges_;  // as loaded, for re-serialization
  int leaf_count_ = 0;
};

}  // namespace lgb

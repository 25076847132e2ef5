#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "distphylo/distance_matrix.hpp"

namespace distphylo {

struct TreeEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 0.0;
};

// Unrooted tree. Nodes 0..n-1 are leaves in taxon order, larger ids are internal.
class PhyloTree {
 public:
  PhyloTree() = default;
  explicit PhyloTree(std::vector<std::string> leaf_labels);

  std::size_t leaf_count() const { return labels_.size(); }
  std::size_t node_count() const { return adjacency_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t leaf) const { return labels_[leaf]; }
  bool is_leaf(std::size_t node) const { return node < labels_.size(); }

  std::size_t add_node();
  std::size_t add_edge(std::size_t a, std::size_t b, double length);

  const std::vector<TreeEdge>& edges() const { return edges_; }
  TreeEdge& edge(std::size_t index) { return edges_[index]; }
  // (neighbour, edge index) pairs.
  const std::vector<std::pair<std::size_t, std::size_t>>& neighbors(std::size_t node) const {
    return adjacency_[node];
  }

  double total_length() const;
  double path_distance(std::size_t i, std::size_t j) const;
  DistanceMatrix path_distances() const;

  // Throws InvariantError if the tree is not connected and acyclic with degree-1 leaves.
  // With require_binary, internal nodes must have degree 3.
  void validate(bool require_binary = false) const;

 private:
  std::vector<double> distances_from(std::size_t source) const;

  std::vector<std::string> labels_;
  std::vector<TreeEdge> edges_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency_;
};

// Leaf-label splits of the internal edges; labels must match as sets.
std::size_t robinson_foulds(const PhyloTree& a, const PhyloTree& b);

}  // namespace distphylo

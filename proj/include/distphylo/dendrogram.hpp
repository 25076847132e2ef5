#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "distphylo/distance_matrix.hpp"

namespace distphylo {

// Merge of clusters `left` and `right`; the new cluster gets id leaf_count() + step.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;

  bool operator==(const Merge&) const = default;
};

struct Dendrogram {
  std::vector<std::string> labels;
  std::vector<Merge> merges;

  std::size_t leaf_count() const { return labels.size(); }
  std::size_t node_count() const { return labels.size() + merges.size(); }
  // Height per node id; leaves are 0.
  std::vector<double> node_heights() const;
  // Leaves under each node id.
  std::vector<std::vector<std::size_t>> members() const;
  // Merges whose height is below the height of one of its children.
  std::size_t inversions() const;
  // Path length between leaves: twice the height of their lowest common merge.
  DistanceMatrix cophenetic() const;
  // Throws InvariantError unless merges form a single rooted binary hierarchy.
  void validate() const;
};

}  // namespace distphylo

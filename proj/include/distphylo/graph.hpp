#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "distphylo/distance_matrix.hpp"

namespace distphylo {

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;

  bool same_endpoints(const WeightedEdge& o) const {
    return (u == o.u && v == o.v) || (u == o.v && v == o.u);
  }
};

struct WeightedGraph {
  std::vector<std::string> labels;
  std::vector<WeightedEdge> edges;

  std::size_t vertex_count() const { return labels.size(); }
  // All pairs i < j with weight D_ij.
  static WeightedGraph complete(const DistanceMatrix& d);
  // Throws InputError on self-loops, duplicate pairs or out-of-range endpoints.
  void validate() const;
};

struct Forest {
  std::vector<std::string> labels;
  std::vector<WeightedEdge> edges;
  std::vector<std::size_t> component;  // smallest vertex id of each vertex's tree
  std::optional<double> level;         // distance threshold, when one applied

  double total_weight() const;
  std::size_t component_count() const;
};

struct SteinerEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  std::size_t weight = 0;
  std::vector<std::size_t> positions;  // 1-based positions where u and v differ
};

struct SteinerTree {
  std::vector<std::string> labels;
  std::vector<std::string> sequences;
  std::size_t original_count = 0;  // nodes [0, original_count) are inputs, the rest Steiner points
  std::vector<SteinerEdge> edges;

  bool is_steiner(std::size_t node) const { return node >= original_count; }
  std::size_t total_weight() const;
};

}  // namespace distphylo

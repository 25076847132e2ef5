#pragma once

// Rebuilds the partial tree of an AdditionState through its public accessors and scores
// candidate insertions by full tree length (least squares or Pauplin's balanced formula).

#include <map>

#include "distphylo/min_evolution.hpp"
#include "support/oracles.hpp"

namespace oracle {

struct StateTree {
  Tree tree;
  std::vector<std::size_t> taxa;            // compact leaf index -> taxon id
  std::map<std::size_t, std::size_t> node;  // state node id -> compact id
  std::vector<std::size_t> edge_of;         // state edge (lower node) per tree edge, or SIZE_MAX
};

// The state's tree, optionally with taxon k inserted on the edge above `split`.
inline StateTree state_tree(const distphylo::AdditionState& s, std::size_t split = SIZE_MAX,
                            std::size_t k = SIZE_MAX) {
  StateTree out;
  auto nodes = s.nodes();
  for (auto v : nodes)
    if (s.is_leaf(v)) out.taxa.push_back(v);
  if (k != SIZE_MAX) out.taxa.push_back(k);
  std::sort(out.taxa.begin(), out.taxa.end());
  for (std::size_t i = 0; i < out.taxa.size(); ++i) out.node[out.taxa[i]] = i;
  std::size_t next = out.taxa.size();
  for (auto v : nodes)
    if (!s.is_leaf(v)) out.node[v] = next++;
  out.tree.leaves = out.taxa.size();
  for (auto v : nodes) {
    if (v == s.root()) continue;
    std::size_t a = out.node[v], b = out.node[s.parent(v)];
    if (v == split) {
      std::size_t w = next++;
      out.tree.edges.push_back({a, w, 1.0});
      out.edge_of.push_back(SIZE_MAX);
      out.tree.edges.push_back({w, b, 1.0});
      out.edge_of.push_back(SIZE_MAX);
      out.tree.edges.push_back({out.node[k], w, 1.0});
      out.edge_of.push_back(SIZE_MAX);
    } else {
      out.tree.edges.push_back({a, b, 1.0});
      out.edge_of.push_back(v);
    }
  }
  out.tree.nodes = next;
  return out;
}

inline Matrix submatrix(const distphylo::DistanceMatrix& d, const std::vector<std::size_t>& taxa) {
  Matrix m(taxa.size(), std::vector<double>(taxa.size()));
  for (std::size_t i = 0; i < taxa.size(); ++i)
    for (std::size_t j = 0; j < taxa.size(); ++j) m[i][j] = d(taxa[i], taxa[j]);
  return m;
}

inline double scheme_length(distphylo::WeightScheme scheme, const Tree& t, const Matrix& d) {
  return scheme == distphylo::WeightScheme::ols ? ols_tree_length(t, d) : balanced_tree_length(t, d);
}

// Full tree length after inserting k on each edge of the state.
inline std::map<std::size_t, double> brute_force_insertions(const distphylo::AdditionState& s, std::size_t k) {
  std::map<std::size_t, double> out;
  for (auto e : s.edges()) {
    auto st = state_tree(s, e, k);
    out[e] = scheme_length(s.scheme(), st.tree, submatrix(s.distances(), st.taxa));
  }
  return out;
}

}  // namespace oracle

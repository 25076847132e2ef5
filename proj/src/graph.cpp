#include "distphylo/graph.hpp"

#include <set>

#include "distphylo/errors.hpp"

namespace distphylo {

WeightedGraph WeightedGraph::complete(const DistanceMatrix& d) {
  WeightedGraph g{d.labels(), {}};
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) g.edges.push_back({i, j, d(i, j)});
  return g;
}

void WeightedGraph::validate() const {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges) {
    if (e.u >= vertex_count() || e.v >= vertex_count()) throw InputError("edge endpoint out of range");
    if (e.u == e.v) throw InputError("self-loop on " + labels[e.u]);
    if (!seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second)
      throw InputError("duplicate edge " + labels[e.u] + "-" + labels[e.v]);
  }
}

double Forest::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges) s += e.weight;
  return s;
}

std::size_t Forest::component_count() const {
  std::set<std::size_t> c(component.begin(), component.end());
  return c.size();
}

std::size_t SteinerTree::total_weight() const {
  std::size_t s = 0;
  for (const auto& e : edges) s += e.weight;
  return s;
}

}  // namespace distphylo

#include "distphylo/phylo_tree.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "distphylo/errors.hpp"

namespace distphylo {

PhyloTree::PhyloTree(std::vector<std::string> leaf_labels)
    : labels_(std::move(leaf_labels)), adjacency_(labels_.size()) {}

std::size_t PhyloTree::add_node() {
  adjacency_.emplace_back();
  return adjacency_.size() - 1;
}

std::size_t PhyloTree::add_edge(std::size_t a, std::size_t b, double length) {
  if (a >= node_count() || b >= node_count() || a == b) throw InvariantError("bad tree edge");
  edges_.push_back({a, b, length});
  adjacency_[a].emplace_back(b, edges_.size() - 1);
  adjacency_[b].emplace_back(a, edges_.size() - 1);
  return edges_.size() - 1;
}

double PhyloTree::total_length() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.length;
  return s;
}

std::vector<double> PhyloTree::distances_from(std::size_t source) const {
  std::vector<double> dist(node_count(), 0.0);
  std::vector<std::size_t> from(node_count(), static_cast<std::size_t>(-1));
  std::vector<std::size_t> stack{source};
  from[source] = source;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (auto [nb, e] : adjacency_[v]) {
      if (from[nb] != static_cast<std::size_t>(-1)) continue;
      from[nb] = v;
      dist[nb] = dist[v] + edges_[e].length;
      stack.push_back(nb);
    }
  }
  return dist;
}

double PhyloTree::path_distance(std::size_t i, std::size_t j) const { return distances_from(i)[j]; }

DistanceMatrix PhyloTree::path_distances() const {
  DistanceMatrix d(labels_);
  for (std::size_t i = 0; i < leaf_count(); ++i) {
    auto dist = distances_from(i);
    for (std::size_t j = i + 1; j < leaf_count(); ++j) d.set(i, j, dist[j]);
  }
  return d;
}

void PhyloTree::validate(bool require_binary) const {
  const std::size_t n = node_count();
  if (n == 0) return;
  if (edges_.size() + 1 != n)
    throw InvariantError("tree with " + std::to_string(n) + " nodes has " + std::to_string(edges_.size()) + " edges");
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (auto [nb, e] : adjacency_[v])
      if (!seen[nb]) seen[nb] = true, ++reached, stack.push_back(nb);
  }
  if (reached != n) throw InvariantError("tree is not connected");
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t deg = adjacency_[v].size();
    if (is_leaf(v) && leaf_count() > 1 && deg != 1)
      throw InvariantError("leaf " + labels_[v] + " has degree " + std::to_string(deg));
    if (!is_leaf(v) && require_binary && deg != 3)
      throw InvariantError("internal node " + std::to_string(v) + " has degree " + std::to_string(deg));
    if (!is_leaf(v) && deg < 2) throw InvariantError("internal node " + std::to_string(v) + " is a dead end");
  }
}

namespace {

// Canonical bipartitions (as the side without the smallest label) of every internal edge.
std::set<std::vector<std::string>> splits(const PhyloTree& t) {
  t.validate();
  std::set<std::vector<std::string>> out;
  const std::size_t n = t.leaf_count();
  if (n < 4) return out;
  std::string smallest = *std::min_element(t.labels().begin(), t.labels().end());
  for (const auto& e : t.edges()) {
    if (t.is_leaf(e.a) || t.is_leaf(e.b)) continue;
    // Leaves reachable from e.b without crossing e.
    std::vector<std::string> side;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{e.b, e.a}};
    while (!stack.empty()) {
      auto [v, from] = stack.back();
      stack.pop_back();
      if (t.is_leaf(v)) side.push_back(t.label(v));
      for (auto [nb, idx] : t.neighbors(v))
        if (nb != from) stack.emplace_back(nb, v);
    }
    std::sort(side.begin(), side.end());
    if (std::binary_search(side.begin(), side.end(), smallest)) {
      std::vector<std::string> other;
      std::vector<std::string> all(t.labels());
      std::sort(all.begin(), all.end());
      std::set_difference(all.begin(), all.end(), side.begin(), side.end(), std::back_inserter(other));
      side.swap(other);
    }
    out.insert(side);
  }
  return out;
}

}  // namespace

std::size_t robinson_foulds(const PhyloTree& a, const PhyloTree& b) {
  auto la = a.labels(), lb = b.labels();
  std::sort(la.begin(), la.end());
  std::sort(lb.begin(), lb.end());
  if (la != lb) throw InputError("trees have different leaf label sets");
  auto sa = splits(a), sb = splits(b);
  std::size_t common = 0;
  for (const auto& s : sa) common += sb.count(s);
  return (sa.size() - common) + (sb.size() - common);
}

}  // namespace distphylo

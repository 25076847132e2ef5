#include "distphylo/dendrogram.hpp"

#include <algorithm>

#include "distphylo/errors.hpp"

namespace distphylo {

std::vector<double> Dendrogram::node_heights() const {
  std::vector<double> h(node_count(), 0.0);
  for (std::size_t s = 0; s < merges.size(); ++s) h[leaf_count() + s] = merges[s].height;
  return h;
}

std::vector<std::vector<std::size_t>> Dendrogram::members() const {
  std::vector<std::vector<std::size_t>> m(node_count());
  for (std::size_t i = 0; i < leaf_count(); ++i) m[i] = {i};
  for (std::size_t s = 0; s < merges.size(); ++s) {
    auto& out = m[leaf_count() + s];
    out = m[merges[s].left];
    out.insert(out.end(), m[merges[s].right].begin(), m[merges[s].right].end());
    std::sort(out.begin(), out.end());
  }
  return m;
}

std::size_t Dendrogram::inversions() const {
  auto h = node_heights();
  std::size_t count = 0;
  for (std::size_t s = 0; s < merges.size(); ++s)
    if (merges[s].height < h[merges[s].left] || merges[s].height < h[merges[s].right]) ++count;
  return count;
}

DistanceMatrix Dendrogram::cophenetic() const {
  validate();
  DistanceMatrix d(labels);
  auto m = members();
  for (std::size_t s = 0; s < merges.size(); ++s) {
    const auto& a = m[merges[s].left];
    const auto& b = m[merges[s].right];
    for (std::size_t x : a)
      for (std::size_t y : b) d.set(x, y, 2.0 * merges[s].height);
  }
  return d;
}

void Dendrogram::validate() const {
  const std::size_t n = leaf_count();
  if (n == 0) throw InvariantError("dendrogram has no leaves");
  if (merges.size() != n - 1)
    throw InvariantError("dendrogram with " + std::to_string(n) + " leaves needs " + std::to_string(n - 1) +
                         " merges, has " + std::to_string(merges.size()));
  std::vector<bool> used(node_count(), false);
  for (std::size_t s = 0; s < merges.size(); ++s) {
    const auto& m = merges[s];
    for (std::size_t c : {m.left, m.right}) {
      if (c >= n + s) throw InvariantError("merge " + std::to_string(s) + " refers to a node not yet created");
      if (used[c]) throw InvariantError("node " + std::to_string(c) + " merged twice");
      used[c] = true;
    }
    if (m.left == m.right) throw InvariantError("merge " + std::to_string(s) + " joins a node with itself");
  }
}

}  // namespace distphylo

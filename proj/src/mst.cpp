#include "distphylo/mst.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "distphylo/errors.hpp"

namespace distphylo {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n = 0) { grow(n); }
  void grow(std::size_t n) {
    while (parent_.size() < n) parent_.push_back(parent_.size()), rank_.push_back(0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_, rank_;
};

// Strict order over edge indices; throws when two distinct edges tie.
struct Ordered {
  const WeightedGraph& g;
  const EdgeLess& less;

  bool operator()(std::size_t a, std::size_t b) const {
    if (a == b) return false;
    const auto& ea = g.edges[a];
    const auto& eb = g.edges[b];
    if (less(ea, eb)) return true;
    if (less(eb, ea)) return false;
    throw InvariantError("edge comparator is not total: " + g.labels[ea.u] + "-" + g.labels[ea.v] + " and " +
                         g.labels[eb.u] + "-" + g.labels[eb.v] + " compare equal");
  }
};

Forest finish(const WeightedGraph& g, std::vector<std::size_t> chosen, const Ordered& before) {
  std::sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) { return before(a, b); });
  Forest f;
  f.labels = g.labels;
  DisjointSets ds(g.vertex_count());
  for (std::size_t idx : chosen) {
    f.edges.push_back(g.edges[idx]);
    if (!ds.unite(g.edges[idx].u, g.edges[idx].v)) throw InvariantError("spanning forest contains a cycle");
  }
  std::vector<std::size_t> smallest(g.vertex_count(), g.vertex_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    auto& s = smallest[ds.find(v)];
    s = std::min(s, v);
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v) f.component.push_back(smallest[ds.find(v)]);
  return f;
}

std::vector<std::size_t> kruskal(const WeightedGraph& g, const Ordered& before) {
  std::vector<std::size_t> order(g.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = g.edges[a];
    const auto& eb = g.edges[b];
    return before.less(ea, eb);
  });
  for (std::size_t i = 1; i < order.size(); ++i) before(order[i - 1], order[i]);  // totality check
  DisjointSets ds(g.vertex_count());
  std::vector<std::size_t> chosen;
  for (std::size_t idx : order)
    if (ds.unite(g.edges[idx].u, g.edges[idx].v)) chosen.push_back(idx);
  return chosen;
}

std::vector<std::size_t> prim(const WeightedGraph& g, const Ordered& before) {
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    incident[g.edges[i].u].push_back(i);
    incident[g.edges[i].v].push_back(i);
  }
  auto later = [&](std::size_t a, std::size_t b) { return before(b, a); };
  std::vector<bool> in_tree(n, false);
  std::vector<std::size_t> chosen;
  for (std::size_t start = 0; start < n; ++start) {
    if (in_tree[start]) continue;
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> heap(later);
    auto add = [&](std::size_t v) {
      in_tree[v] = true;
      for (std::size_t e : incident[v]) {
        std::size_t other = g.edges[e].u == v ? g.edges[e].v : g.edges[e].u;
        if (!in_tree[other]) heap.push(e);
      }
    };
    add(start);
    while (!heap.empty()) {
      std::size_t e = heap.top();
      heap.pop();
      std::size_t a = g.edges[e].u, b = g.edges[e].v;
      if (in_tree[a] && in_tree[b]) continue;
      chosen.push_back(e);
      add(in_tree[a] ? b : a);
    }
  }
  return chosen;
}

std::vector<std::size_t> boruvka(const WeightedGraph& g, const Ordered& before) {
  const std::size_t n = g.vertex_count();
  const std::size_t none = g.edges.size();
  DisjointSets ds(n);
  std::vector<std::size_t> chosen;
  while (true) {
    std::vector<std::size_t> cheapest(n, none);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      std::size_t a = ds.find(g.edges[i].u), b = ds.find(g.edges[i].v);
      if (a == b) continue;
      for (std::size_t c : {a, b})
        if (cheapest[c] == none || before(i, cheapest[c])) cheapest[c] = i;
    }
    bool merged = false;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t e = cheapest[c];
      if (e == none) continue;
      if (ds.unite(g.edges[e].u, g.edges[e].v)) {
        chosen.push_back(e);
        merged = true;
      }
    }
    if (!merged) break;
  }
  return chosen;
}

}  // namespace

EdgeLess natural_edge_order() {
  return [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    auto ka = std::minmax(a.u, a.v), kb = std::minmax(b.u, b.v);
    return ka < kb;
  };
}

Forest generic_mst(const WeightedGraph& g, const EdgeLess& less, MstAlgorithm algorithm) {
  g.validate();
  Ordered before{g, less};
  std::vector<std::size_t> chosen;
  switch (algorithm) {
    case MstAlgorithm::kruskal: chosen = kruskal(g, before); break;
    case MstAlgorithm::prim: chosen = prim(g, before); break;
    case MstAlgorithm::boruvka: chosen = boruvka(g, before); break;
  }
  return finish(g, std::move(chosen), before);
}

namespace {

std::size_t integer_distance(const DistanceMatrix& d, std::size_t i, std::size_t j) {
  double v = d(i, j);
  double r = std::round(v);
  if (std::fabs(v - r) > 1e-9)
    throw InputError("goeBURST needs integer distances; (" + d.label(i) + ", " + d.label(j) + ") = " +
                     std::to_string(v));
  return static_cast<std::size_t>(r);
}

}  // namespace

std::vector<LvProfileStats> lv_counts(const DistanceMatrix& d, std::size_t level,
                                      std::span<const std::uint64_t> frequencies) {
  const std::size_t n = d.size();
  if (!frequencies.empty() && frequencies.size() != n) throw InputError("one frequency per vertex required");
  const std::size_t depth = std::max<std::size_t>(level, 3);
  std::vector<LvProfileStats> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].lv.assign(depth, 0);
    out[i].id = i;
    out[i].frequency = frequencies.empty() ? 1 : frequencies[i];
    if (out[i].frequency < 1) throw InputError("frequency of " + d.label(i) + " must be at least 1");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t dist = integer_distance(d, i, j);
      if (dist >= 1 && dist <= depth) ++out[i].lv[dist - 1], ++out[j].lv[dist - 1];
    }
  return out;
}

namespace {

// True when x outranks y: more variants at each level, then higher frequency, then lower id.
bool outranks(const LvProfileStats& x, const LvProfileStats& y) {
  const std::size_t depth = std::max(x.lv.size(), y.lv.size());
  for (std::size_t l = 1; l <= depth; ++l)
    if (x.count(l) != y.count(l)) return x.count(l) > y.count(l);
  if (x.frequency != y.frequency) return x.frequency > y.frequency;
  return x.id < y.id;
}

}  // namespace

int goeburst_edge_order(const WeightedEdge& a, const WeightedEdge& b, const std::vector<LvProfileStats>& stats) {
  if (a.weight != b.weight) return a.weight < b.weight ? -1 : 1;
  auto ranked = [&](const WeightedEdge& e) {
    const auto& su = stats.at(e.u);
    const auto& sv = stats.at(e.v);
    return outranks(su, sv) ? std::make_pair(&su, &sv) : std::make_pair(&sv, &su);
  };
  auto [a_best, a_worst] = ranked(a);
  auto [b_best, b_worst] = ranked(b);
  if (a_best->id != b_best->id) return outranks(*a_best, *b_best) ? -1 : 1;
  if (a_worst->id != b_worst->id) return outranks(*a_worst, *b_worst) ? -1 : 1;
  return 0;
}

EdgeLess goeburst_less(std::vector<LvProfileStats> stats) {
  return [stats = std::move(stats)](const WeightedEdge& a, const WeightedEdge& b) {
    return goeburst_edge_order(a, b, stats) < 0;
  };
}

Forest run_goeburst(const DistanceMatrix& d, std::size_t level, std::span<const std::uint64_t> frequencies) {
  if (level == 0) throw InputError("goeBURST level must be positive");
  d.validate();
  auto stats = lv_counts(d, 3, frequencies);
  WeightedGraph g{d.labels(), {}};
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j)
      if (integer_distance(d, i, j) <= level) g.edges.push_back({i, j, d(i, j)});
  Forest f = generic_mst(g, goeburst_less(std::move(stats)), MstAlgorithm::kruskal);
  f.level = static_cast<double>(level);
  return f;
}

Forest run_goeburst_full_mst(const DistanceMatrix& d, std::span<const std::uint64_t> frequencies,
                             std::optional<std::size_t> lv_depth) {
  d.validate();
  std::size_t depth = 3;
  if (lv_depth) {
    depth = *lv_depth;
  } else {
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = i + 1; j < d.size(); ++j) depth = std::max(depth, integer_distance(d, i, j));
  }
  auto stats = lv_counts(d, depth, frequencies);
  Forest f = generic_mst(WeightedGraph::complete(d), goeburst_less(std::move(stats)), MstAlgorithm::boruvka);
  f.level = static_cast<double>(depth);
  return f;
}

Forest run_goeburst(const ProfileSet& p, std::size_t level, MissingPolicy policy) {
  DistanceOptions o;
  o.policy = policy;
  o.policy.scale = MissingScale::none;
  auto freq = p.frequencies();
  return run_goeburst(build_distance_matrix(p, o), level, freq);
}

Forest run_goeburst_full_mst(const ProfileSet& p, MissingPolicy policy) {
  DistanceOptions o;
  o.policy = policy;
  o.policy.scale = MissingScale::none;
  auto freq = p.frequencies();
  return run_goeburst_full_mst(build_distance_matrix(p, o), freq, std::max<std::size_t>(p.loci(), 3));
}

SteinerTree run_fhp(const CharacterSequenceSet& s) {
  s.validate();
  if (s.size() < 2) throw InputError("FHP needs at least two sequences");
  SteinerTree t;
  t.labels = s.labels;
  t.sequences = s.sequences;
  t.original_count = s.size();
  const std::size_t len = s.length();

  auto hamming = [&](std::size_t a, std::size_t b) {
    std::size_t c = 0;
    for (std::size_t p = 0; p < len; ++p) c += t.sequences[a][p] != t.sequences[b][p];
    return c;
  };
  struct Link {
    std::size_t a, b;
  };
  std::vector<Link> links;
  DisjointSets ds(t.original_count);
  std::set<std::string> used(t.labels.begin(), t.labels.end());
  std::size_t steiner_no = 0;

  auto connected = [&] {
    for (std::size_t i = 1; i < t.original_count; ++i)
      if (ds.find(i) != ds.find(0)) return false;
    return true;
  };
  auto remove_link = [&](std::size_t a, std::size_t b) {
    links.erase(std::find_if(links.begin(), links.end(), [&](const Link& l) {
      return (l.a == a && l.b == b) || (l.a == b && l.b == a);
    }));
  };

  while (!connected()) {
    // Shortest link between two components; ties to the smallest (a, b).
    std::size_t best_a = 0, best_b = 0, best_d = 0;
    bool found = false;
    const std::size_t nodes = t.sequences.size();
    for (std::size_t a = 0; a < nodes; ++a)
      for (std::size_t b = a + 1; b < nodes; ++b) {
        if (ds.find(a) == ds.find(b)) continue;
        std::size_t dist = hamming(a, b);
        if (!found || dist < best_d) found = true, best_a = a, best_b = b, best_d = dist;
      }
    links.push_back({best_a, best_b});
    ds.unite(best_a, best_b);

    // Coalesce the pair of links sharing the most changes, until none share any.
    while (true) {
      std::size_t bv = 0, bx = 0, by = 0, best_common = 0;
      const std::size_t count = t.sequences.size();
      std::vector<std::vector<std::size_t>> nbrs(count);
      for (const auto& l : links) nbrs[l.a].push_back(l.b), nbrs[l.b].push_back(l.a);
      for (std::size_t v = 0; v < count; ++v) {
        auto& nb = nbrs[v];
        std::sort(nb.begin(), nb.end());
        for (std::size_t x = 0; x < nb.size(); ++x)
          for (std::size_t y = x + 1; y < nb.size(); ++y) {
            const std::string& sv = t.sequences[v];
            const std::string& sx = t.sequences[nb[x]];
            const std::string& sy = t.sequences[nb[y]];
            std::size_t common = 0;
            for (std::size_t p = 0; p < len; ++p) common += sx[p] != sv[p] && sx[p] == sy[p];
            if (common > best_common) best_common = common, bv = v, bx = nb[x], by = nb[y];
          }
      }
      if (best_common == 0) break;
      const std::size_t dvx = hamming(bv, bx), dvy = hamming(bv, by);
      if (best_common == dvx) {
        remove_link(bv, by);
        links.push_back({bx, by});
      } else if (best_common == dvy) {
        remove_link(bv, bx);
        links.push_back({by, bx});
      } else {
        std::string seq = t.sequences[bv];
        for (std::size_t p = 0; p < len; ++p)
          if (t.sequences[bx][p] != seq[p] && t.sequences[bx][p] == t.sequences[by][p]) seq[p] = t.sequences[bx][p];
        std::string label;
        do label = "steiner_" + std::to_string(++steiner_no);
        while (used.count(label));
        used.insert(label);
        const std::size_t st = t.sequences.size();
        t.sequences.push_back(seq);
        t.labels.push_back(label);
        ds.grow(st + 1);
        ds.unite(st, bv);
        remove_link(bv, bx);
        remove_link(bv, by);
        links.push_back({bv, st});
        links.push_back({st, bx});
        links.push_back({st, by});
      }
    }
  }

  for (const auto& l : links) {
    SteinerEdge e{std::min(l.a, l.b), std::max(l.a, l.b), 0, {}};
    for (std::size_t p = 0; p < len; ++p)
      if (t.sequences[e.u][p] != t.sequences[e.v][p]) e.positions.push_back(p + 1);
    e.weight = e.positions.size();
    t.edges.push_back(std::move(e));
  }
  std::sort(t.edges.begin(), t.edges.end(),
            [](const SteinerEdge& a, const SteinerEdge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return t;
}

const char* to_string(MstAlgorithm algorithm) {
  switch (algorithm) {
    case MstAlgorithm::kruskal: return "kruskal";
    case MstAlgorithm::prim: return "prim";
    case MstAlgorithm::boruvka: return "boruvka";
  }
  return "?";
}

std::optional<MstAlgorithm> parse_mst_algorithm(std::string_view name) {
  for (auto a : {MstAlgorithm::kruskal, MstAlgorithm::prim, MstAlgorithm::boruvka})
    if (name == to_string(a)) return a;
  return std::nullopt;
}

}  // namespace distphylo

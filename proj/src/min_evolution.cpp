#include "distphylo/min_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <utility>

#include "distphylo/errors.hpp"

namespace distphylo {

double avg_distance(WeightScheme scheme, double d_ij1, double d_ij2, std::size_t size_j1, std::size_t size_j2) {
  if (scheme == WeightScheme::balanced) return 0.5 * (d_ij1 + d_ij2);
  const double a = static_cast<double>(size_j1), b = static_cast<double>(size_j2);
  return (a * d_ij1 + b * d_ij2) / (a + b);
}

double lambda_weight(WeightScheme scheme, std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  if (scheme == WeightScheme::balanced) return 0.5;
  if (a == 0 || b == 0 || c == 0 || d == 0) throw InputError("subtree sizes must be positive");
  const double A = static_cast<double>(a), B = static_cast<double>(b), C = static_cast<double>(c),
               D = static_cast<double>(d);
  return (A * D + B * C) / ((A + B) * (C + D));
}

AdditionState::AdditionState(const DistanceMatrix& d, WeightScheme scheme, std::array<std::size_t, 3> first)
    : d_(&d), scheme_(scheme) {
  const std::size_t n = d.size();
  if (n < 3) throw InputError("addition needs at least 3 taxa");
  for (std::size_t t : first)
    if (t >= n) throw InputError("taxon index out of range");
  if (first[0] == first[1] || first[0] == first[2] || first[1] == first[2])
    throw InputError("starting taxa must be distinct");
  const std::size_t cap = 2 * n - 2;
  present_.assign(cap, false);
  parent_.assign(cap, kNoNode);
  children_.assign(cap, {});
  size_.assign(cap, 0);
  avg_.assign(cap * cap, 0.0);

  const auto [r, x, y] = first;
  const std::size_t c = n;
  next_internal_ = n + 1;
  root_ = r;
  taxa_ = 3;
  for (std::size_t v : {r, x, y, c}) present_[v] = true;
  children_[r] = {c};
  parent_[c] = r;
  children_[c] = {x, y};
  parent_[x] = parent_[y] = c;
  size_[c] = 2;
  size_[x] = size_[y] = 1;
  size_[r] = 3;

  put(x, y, d(x, y));
  put(x, c, d(x, r));
  put(y, c, d(y, r));
  put(c, c, combine(d(x, r), 1, d(y, r), 1));
  put(x, x, combine(d(x, r), 1, d(x, y), 1));
  put(y, y, combine(d(y, r), 1, d(x, y), 1));
}

double AdditionState::combine(double x, std::size_t nx, double y, std::size_t ny) const {
  return avg_distance(scheme_, x, y, nx, ny);
}

std::vector<std::size_t> AdditionState::nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < present_.size(); ++v)
    if (present_[v]) out.push_back(v);
  return out;
}

std::vector<std::size_t> AdditionState::edges() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < present_.size(); ++v)
    if (present_[v] && v != root_) out.push_back(v);
  return out;
}

double AdditionState::average(SubtreeRef a, SubtreeRef b) const {
  if (a.up && b.up) throw InvariantError("two parent-side subtrees always overlap");
  return at(a.node, b.node);
}

namespace {

// Nodes below the root leaf in preorder.
std::vector<std::size_t> preorder(const AdditionState& s) {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{s.children(s.root()).front()};
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    out.push_back(v);
    const auto& ch = s.children(v);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::size_t sibling(const AdditionState& s, std::size_t v) {
  const auto& ch = s.children(s.parent(v));
  return ch[0] == v ? ch[1] : ch[0];
}

}  // namespace

AdditionState::TaxonAverages AdditionState::taxon_averages(std::size_t k) const {
  if (k >= d_->size() || present_[k]) throw InputError("taxon " + std::to_string(k) + " is not insertable");
  const DistanceMatrix& D = *d_;
  TaxonAverages t;
  t.taxon = k;
  t.down.assign(present_.size(), 0.0);
  t.up.assign(present_.size(), 0.0);
  auto order = preorder(*this);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::size_t v = *it;
    if (is_leaf(v)) {
      t.down[v] = D(k, v);
    } else {
      std::size_t a = children_[v][0], b = children_[v][1];
      t.down[v] = combine(t.down[a], size_[a], t.down[b], size_[b]);
    }
  }
  for (std::size_t v : order) {
    std::size_t p = parent_[v];
    if (p == root_) {
      t.up[v] = D(k, root_);
    } else {
      std::size_t sib = sibling(*this, v);
      t.up[v] = combine(t.up[p], taxa_ - size_[p], t.down[sib], size_[sib]);
    }
  }
  return t;
}

void AdditionState::insert_taxon(std::size_t s, std::size_t k) {
  if (pending_) throw InvariantError("previous insertion has not been folded into the averages");
  if (s >= present_.size() || !present_[s] || s == root_) throw InputError("no such edge " + std::to_string(s));
  Pending pd;
  pd.averages = taxon_averages(k);
  pd.k = k;
  pd.s = s;
  pd.order = preorder(*this);
  const std::size_t cap = present_.size();
  pd.old_depth.assign(cap, 0);
  pd.tin.assign(cap, 0);
  pd.tout.assign(cap, 0);
  pd.old_parent = parent_;
  for (std::size_t i = 0; i < pd.order.size(); ++i) {
    std::size_t v = pd.order[i];
    pd.tin[v] = i;
    pd.old_depth[v] = parent_[v] == root_ ? 1 : pd.old_depth[parent_[v]] + 1;
  }
  for (auto it = pd.order.rbegin(); it != pd.order.rend(); ++it) {
    std::size_t v = *it;
    pd.tout[v] = is_leaf(v) ? pd.tin[v] : std::max(pd.tout[children_[v][0]], pd.tout[children_[v][1]]);
  }

  const std::size_t w = next_internal_++;
  const std::size_t p = parent_[s];
  pd.w = w;
  auto& pc = children_[p];
  *std::find(pc.begin(), pc.end(), s) = w;
  parent_[w] = p;
  children_[w] = {s, k};
  parent_[s] = w;
  parent_[k] = w;
  present_[w] = present_[k] = true;
  size_[w] = size_[s] + 1;
  size_[k] = 1;
  for (std::size_t a = p; a != root_; a = parent_[a]) ++size_[a];
  ++size_[root_];
  ++taxa_;
  pending_ = std::move(pd);
}

void AdditionState::update_after_insertion() {
  if (!pending_) throw InvariantError("no insertion to fold into the averages");
  const Pending& pd = *pending_;
  const std::size_t k = pd.k, s = pd.s, w = pd.w;
  const auto& ta = pd.averages;
  const auto& order = pd.order;
  const std::size_t cap = present_.size();
  const bool ols = scheme_ == WeightScheme::ols;
  const std::size_t old_taxa = taxa_ - 1;

  // Old-tree ancestry: a is an ancestor of (or equal to) b.
  auto anc = [&](std::size_t a, std::size_t b) { return pd.tin[a] <= pd.tin[b] && pd.tout[b] <= pd.tout[a]; };
  std::vector<bool> in_chain(cap, false);
  std::vector<std::size_t> chain;
  for (std::size_t a = pd.old_parent[s]; a != root_; a = pd.old_parent[a]) chain.push_back(a), in_chain[a] = true;

  std::vector<double> row_s(cap);
  for (std::size_t v : order) row_s[v] = at(s, v);

  auto grow = [&](double old, std::size_t old_size, double to_k, double to_split, std::size_t depth) {
    if (ols) return (static_cast<double>(old_size) * old + to_k) / static_cast<double>(old_size + 1);
    return old + std::ldexp(to_k - to_split, -static_cast<int>(depth + 1));
  };

  // Subtrees below an ancestor of the insertion point gained k.
  for (std::size_t a : chain) {
    const std::size_t depth = pd.old_depth[s] - pd.old_depth[a];
    const std::size_t old_size = size_[a] - 1;
    for (std::size_t y : order) {
      bool below_other = !anc(a, y) && !anc(y, a);
      bool above = anc(y, a);
      if (!below_other && !above) continue;
      double to_k = below_other ? ta.down[y] : ta.up[y];
      put(a, y, grow(at(a, y), old_size, to_k, row_s[y], depth));
    }
  }

  // Parent-side subtrees of nodes off the ancestor chain gained k.
  for (std::size_t u : order) {
    if (in_chain[u]) continue;
    const std::size_t old_size = old_taxa - size_[u];
    std::size_t depth = 0;
    if (anc(s, u)) {
      depth = pd.old_depth[u] - pd.old_depth[s];
    } else {
      std::size_t q = pd.old_parent[u];
      std::size_t l = q;
      while (!anc(l, s)) l = pd.old_parent[l];
      depth = pd.old_depth[q] + pd.old_depth[s] - 2 * pd.old_depth[l];
    }
    for (std::size_t pos = pd.tin[u]; pos <= pd.tout[u]; ++pos) {
      std::size_t v = order[pos];
      put(v, u, grow(at(v, u), old_size, ta.down[v], row_s[v], depth));
    }
  }

  // Rows of the new leaf k and the new internal node w.
  const std::size_t s_size = size_[s];
  const std::size_t up_s_size = old_taxa - s_size;
  for (std::size_t y : order) {
    if (in_chain[y]) continue;
    put(k, y, ta.down[y]);
    if (!anc(s, y)) put(w, y, combine(row_s[y], s_size, ta.down[y], 1));
  }
  for (std::size_t a : chain) {
    put(k, a, ta.up[a]);
    put(w, a, combine(row_s[a], s_size, ta.up[a], 1));
  }
  put(k, w, ta.up[s]);
  put(k, k, combine(ta.up[s], up_s_size, ta.down[s], s_size));
  put(w, w, combine(row_s[s], s_size, ta.up[s], 1));
  for (std::size_t pos = pd.tin[s]; pos <= pd.tout[s]; ++pos) {
    std::size_t v = order[pos];
    put(v, w, row_s[v]);
  }
  pending_.reset();
}

namespace {

SubtreeRef down(std::size_t v) { return {v, false}; }
SubtreeRef up(std::size_t v) { return {v, true}; }

// Subtree on the far side of `edge` as seen from its endpoint `v`.
SubtreeRef far_side(std::size_t v, std::size_t edge) { return edge == v ? up(v) : down(edge); }

std::vector<std::size_t> incident_edges(const AdditionState& s, std::size_t v) {
  std::vector<std::size_t> out{v};
  for (std::size_t c : s.children(v)) out.push_back(c);
  return out;
}

void require_settled(const AdditionState& s) {
  if (s.pending_update()) throw InvariantError("average table is stale; call update_after_insertion first");
}

}  // namespace

std::vector<EdgeCost> insertion_costs(const AdditionState& state, std::size_t k) {
  require_settled(state);
  const auto ta = state.taxon_averages(k);
  const DistanceMatrix& D = state.distances();
  const WeightScheme scheme = state.scheme();

  std::size_t smallest = kNoNode;
  for (std::size_t v : state.nodes())
    if (state.is_leaf(v) && (smallest == kNoNode || D.label(v) < D.label(smallest))) smallest = v;
  const std::size_t start = smallest == state.root() ? state.children(state.root()).front() : smallest;

  std::vector<EdgeCost> out{{start, 0.0}};
  std::vector<bool> seen(state.max_nodes(), false);
  std::vector<double> cost(state.max_nodes(), 0.0);
  seen[start] = true;
  for (std::size_t head = 0; head < out.size(); ++head) {
    const std::size_t e1 = out[head].edge;
    for (std::size_t v : {state.parent(e1), e1}) {
      if (v == state.root() || state.is_leaf(v)) continue;
      auto inc = incident_edges(state, v);
      for (std::size_t e2 : inc) {
        if (seen[e2]) continue;
        std::size_t e3 = 0;
        for (std::size_t x : inc)
          if (x != e1 && x != e2) e3 = x;
        SubtreeRef A = far_side(v, e1), B = far_side(v, e2), C = far_side(v, e3);
        const std::size_t a = state.size(A), b = state.size(B), c = state.size(C);
        const double dab = state.average(A, B), dac = state.average(A, C), dbc = state.average(B, C);
        const double ka = ta(A), kb = ta(B), kc = ta(C);
        const double l1 = lambda_weight(scheme, a, 1, b, c);
        const double l2 = lambda_weight(scheme, b, 1, a, c);
        const double at_a = l1 * (dab + kc) + (1.0 - l1) * (dac + kb) + ka + dbc;
        const double at_b = l2 * (dab + kc) + (1.0 - l2) * (dbc + ka) + kb + dac;
        cost[e2] = cost[e1] + 0.5 * (at_b - at_a);
        seen[e2] = true;
        out.push_back({e2, cost[e2]});
      }
    }
  }
  return out;
}

void insert_taxon(AdditionState& state, std::size_t edge, std::size_t k) { state.insert_taxon(edge, k); }

void update_after_insertion(AdditionState& state) { state.update_after_insertion(); }

double edge_length(const AdditionState& state, std::size_t e) {
  require_settled(state);
  if (e >= state.max_nodes() || !state.contains(e) || e == state.root()) throw InputError("no such edge");
  const std::size_t root = state.root();
  if (state.parent(e) == root) {
    // Pendant edge of the root leaf.
    const auto& ch = state.children(e);
    return 0.5 * (state.average(down(ch[0]), up(e)) + state.average(down(ch[1]), up(e)) -
                  state.average(down(ch[0]), down(ch[1])));
  }
  const std::size_t p = state.parent(e);
  const std::size_t sib = sibling(state, e);
  if (state.is_leaf(e))
    return 0.5 * (state.average(down(e), down(sib)) + state.average(down(e), up(p)) -
                  state.average(down(sib), up(p)));
  const auto& ch = state.children(e);
  SubtreeRef A = down(ch[0]), B = down(ch[1]), C = down(sib), D = up(p);
  const double l = lambda_weight(state.scheme(), state.size(A), state.size(B), state.size(C), state.size(D));
  return 0.5 * (l * (state.average(A, C) + state.average(B, D)) + (1.0 - l) * (state.average(A, D) + state.average(B, C)) -
                state.average(A, B) - state.average(C, D));
}

namespace {

struct Part {
  SubtreeRef subtree;
  std::size_t edge;  // edge joining it to its parent in the orientation
};

// The two child subtrees of a subtree's root, or none for a single leaf.
std::vector<Part> split(const AdditionState& s, SubtreeRef x) {
  if (!x.up) {
    if (s.is_leaf(x.node)) return {};
    const auto& ch = s.children(x.node);
    return {{down(ch[0]), ch[0]}, {down(ch[1]), ch[1]}};
  }
  const std::size_t p = s.parent(x.node);
  if (p == s.root()) return {};
  return {{up(p), p}, {down(sibling(s, x.node)), sibling(s, x.node)}};
}

// Balanced: total length minus root-to-leaves average, from the data alone.
double balanced_inner(const AdditionState& s, SubtreeRef x) {
  auto parts = split(s, x);
  if (parts.empty()) return 0.0;
  return 0.5 * s.average(parts[0].subtree, parts[1].subtree) + balanced_inner(s, parts[0].subtree) +
         balanced_inner(s, parts[1].subtree);
}

// OLS: (subtree length, mean root-to-leaf path) from the fitted edge lengths.
std::pair<double, double> ols_inner(const AdditionState& s, SubtreeRef x) {
  auto parts = split(s, x);
  if (parts.empty()) return {0.0, 0.0};
  double total = 0.0, mean = 0.0;
  for (const auto& part : parts) {
    const double len = edge_length(s, part.edge);
    auto [l, m] = ols_inner(s, part.subtree);
    total += len + l;
    mean += static_cast<double>(s.size(part.subtree)) * (len + m);
  }
  return {total, mean / static_cast<double>(s.size(x))};
}

}  // namespace

double tree_length(const AdditionState& state) {
  require_settled(state);
  std::size_t inner = kNoNode;
  for (std::size_t e : state.edges())
    if (!state.is_leaf(e) && state.parent(e) != state.root()) {
      inner = e;
      break;
    }
  if (inner == kNoNode) {
    double total = 0.0;
    for (std::size_t e : state.edges()) total += edge_length(state, e);
    return total;
  }
  const auto& ch = state.children(inner);
  const std::size_t p = state.parent(inner);
  SubtreeRef A = down(ch[0]), B = down(ch[1]), C = down(sibling(state, inner)), D = up(p);
  const double l = lambda_weight(state.scheme(), state.size(A), state.size(B), state.size(C), state.size(D));
  double total = 0.5 * (l * (state.average(A, C) + state.average(B, D)) +
                        (1.0 - l) * (state.average(A, D) + state.average(B, C)) + state.average(A, B) +
                        state.average(C, D));
  for (SubtreeRef x : {A, B, C, D}) {
    if (state.scheme() == WeightScheme::balanced) {
      total += balanced_inner(state, x);
    } else {
      auto [len, mean] = ols_inner(state, x);
      total += len - mean;
    }
  }
  return total;
}

PhyloTree to_phylo_tree(const AdditionState& state) {
  require_settled(state);
  const DistanceMatrix& D = state.distances();
  if (state.taxa_in_tree() != D.size()) throw InvariantError("not every taxon has been inserted");
  PhyloTree tree(D.labels());
  std::vector<std::size_t> id(state.max_nodes(), kNoNode);
  for (std::size_t v : state.nodes()) id[v] = state.is_leaf(v) ? v : tree.add_node();
  for (std::size_t e : state.edges()) tree.add_edge(id[state.parent(e)], id[e], edge_length(state, e));
  return tree;
}

std::vector<std::size_t> insertion_sequence(std::size_t n, InsertionOrder order, std::uint64_t seed) {
  std::vector<std::size_t> seq(n);
  std::iota(seq.begin(), seq.end(), 0);
  if (order == InsertionOrder::random) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(seq[i - 1], seq[pick(rng)]);
    }
  }
  return seq;
}

PhyloTree run_addition(const DistanceMatrix& d, WeightScheme scheme, const std::vector<std::size_t>& order) {
  if (d.size() == 0) throw InputError("empty distance matrix");
  d.validate();
  const std::size_t n = d.size();
  {
    std::vector<std::size_t> sorted(order);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted[i] != i || sorted.size() != n) throw InputError("insertion order must be a permutation of the taxa");
  }
  if (n < 3) {
    PhyloTree tree(d.labels());
    if (n == 2) tree.add_edge(0, 1, d(0, 1));
    return tree;
  }
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, d(i, j));
  const double tol = 1e-12 * scale;

  AdditionState state(d, scheme, {order[0], order[1], order[2]});
  for (std::size_t pos = 3; pos < n; ++pos) {
    const std::size_t k = order[pos];
    auto costs = insertion_costs(state, k);
    const EdgeCost* best = &costs.front();
    for (const auto& c : costs) {
      if (c.cost < best->cost - tol || (c.cost <= best->cost + tol && c.edge < best->edge)) best = &c;
    }
    state.insert_taxon(best->edge, k);
    state.update_after_insertion();
  }
  return to_phylo_tree(state);
}

PhyloTree run_addition(const DistanceMatrix& d, WeightScheme scheme, InsertionOrder order, std::uint64_t seed) {
  return run_addition(d, scheme, insertion_sequence(d.size(), order, seed));
}

}  // namespace distphylo

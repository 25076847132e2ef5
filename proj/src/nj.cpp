#include "distphylo/nj.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "distphylo/errors.hpp"

namespace distphylo {

namespace {

std::vector<double> row_sums(const DistanceMatrix& d) {
  std::vector<double> r(d.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t k = 0; k < d.size(); ++k) r[i] += d(i, k);
  return r;
}

using TieKey = std::tuple<bool, std::size_t, std::size_t>;

TieKey tie_key(std::size_t a, std::size_t b, std::optional<std::size_t> newest, TieRule rule) {
  bool has = rule == TieRule::avoid_newest && newest && (a == *newest || b == *newest);
  return {has, std::min(a, b), std::max(a, b)};
}

// Running argmin over candidate pairs with the canonical tie rule.
struct PairPicker {
  TieRule rule;
  std::optional<std::size_t> newest;
  bool found = false;
  double best = 0.0;
  TieKey key{};
  std::size_t i = 0, j = 0;

  // Values within this relative distance are ties, so rounding in how the criterion was evaluated
  // does not override the tie rule.
  static constexpr double kRelTol = 1e-12;

  void offer(double v, std::size_t si, std::size_t sj, std::size_t id_i, std::size_t id_j) {
    const double tol = kRelTol * std::max(std::fabs(v), std::fabs(best));
    if (found && v > best + tol) return;
    TieKey k = tie_key(id_i, id_j, newest, rule);
    if (!found || v < best - tol || k < key) found = true, best = v, key = k, i = si, j = sj;
  }
};

}  // namespace

QMatrix q_matrix(const DistanceMatrix& d, QVariant variant) {
  const std::size_t r = d.size();
  if (r < 3) throw InputError("Q criterion needs at least 3 nodes, got " + std::to_string(r));
  QMatrix q{variant, r, std::vector<double>(r * r, 0.0)};
  const double rm2 = static_cast<double>(r - 2);
  if (variant == QVariant::studier_kepler) {
    auto R = row_sums(d);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        if (i != j) q.values[i * r + j] = rm2 * d(i, j) - R[i] - R[j];
    return q;
  }
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      double to_others = 0.0, among_others = 0.0;
      for (std::size_t k = 0; k < r; ++k) {
        if (k == i || k == j) continue;
        to_others += d(i, k) + d(j, k);
        for (std::size_t l = k + 1; l < r; ++l)
          if (l != i && l != j) among_others += d(k, l);
      }
      double v = 0.5 * d(i, j) + to_others / (2.0 * rm2) + among_others / rm2;
      q.values[i * r + j] = q.values[j * r + i] = v;
    }
  }
  return q;
}

std::pair<std::size_t, std::size_t> select_pair(const QMatrix& q, TieRule tie, const std::vector<std::size_t>& ids,
                                                std::optional<std::size_t> newest) {
  if (q.r < 2) throw InputError("need at least two nodes to select a pair");
  auto id = [&](std::size_t i) { return ids.empty() ? i : ids[i]; };
  PairPicker pick{tie, newest};
  for (std::size_t i = 0; i < q.r; ++i)
    for (std::size_t j = i + 1; j < q.r; ++j) pick.offer(q(i, j), i, j, id(i), id(j));
  return {pick.i, pick.j};
}

std::pair<double, double> branch_lengths(const DistanceMatrix& d, std::size_t i, std::size_t j, BranchScheme scheme,
                                         const std::vector<std::size_t>& sizes) {
  const std::size_t r = d.size();
  const double dij = d(i, j);
  if (r <= 2) return {dij / 2.0, dij / 2.0};
  double diu = 0.0;
  if (scheme == BranchScheme::nj) {
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k)
      if (k != i && k != j) s += d(i, k) - d(j, k);
    diu = 0.5 * dij + s / (2.0 * static_cast<double>(r - 2));
  } else {
    if (sizes.size() != r) throw InputError("UNJ branch lengths need one cluster size per row");
    std::size_t total = 0;
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      total += sizes[k];
      if (k != i && k != j) s += static_cast<double>(sizes[k]) * (d(i, k) - d(j, k));
    }
    std::size_t rest = total - sizes[i] - sizes[j];
    diu = 0.5 * dij + (rest ? s / (2.0 * static_cast<double>(rest)) : 0.0);
  }
  return {diu, dij - diu};
}

DistanceMatrix reduce_matrix(const DistanceMatrix& d, std::size_t i, std::size_t j, double d_iu, double d_ju,
                             double lambda, const std::string& new_label) {
  const std::size_t r = d.size();
  if (i == j || i >= r || j >= r) throw InputError("reduce_matrix needs two distinct rows");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("reduction weight outside [0, 1]: " + std::to_string(lambda));
  std::vector<std::size_t> keep;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < r; ++k)
    if (k != i && k != j) keep.push_back(k), labels.push_back(d.label(k));
  labels.push_back(new_label);
  DistanceMatrix out(labels, d.kind());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    for (std::size_t b = a + 1; b < keep.size(); ++b) out.set(a, b, d(keep[a], keep[b]));
    std::size_t k = keep[a];
    out.set(a, keep.size(), lambda * (d(i, k) - d_iu) + (1.0 - lambda) * (d(j, k) - d_ju));
  }
  return out;
}

double bionj_lambda(const DistanceMatrix& v, std::size_t i, std::size_t j) {
  const std::size_t r = v.size();
  const double vij = v(i, j);
  if (r <= 2 || vij == 0.0) return 0.5;
  double s = 0.0;
  for (std::size_t k = 0; k < r; ++k)
    if (k != i && k != j) s += v(j, k) - v(i, k);
  double lambda = 0.5 + s / (2.0 * static_cast<double>(r - 2) * vij);
  return std::clamp(lambda, 0.0, 1.0);
}

DistanceMatrix bionj_reduce_variance(const DistanceMatrix& v, std::size_t i, std::size_t j, double v_iu, double v_ju,
                                     double lambda, const std::string& new_label) {
  return reduce_matrix(v, i, j, v_iu, v_ju, lambda, new_label);
}

const VisiblePair* VisibleSet::find(std::size_t node) const {
  for (const auto& p : pairs)
    if (p.node == node) return &p;
  return nullptr;
}

VisibleSet fnj_visible_set(const QMatrix& q, const std::vector<std::size_t>& ids) {
  auto id = [&](std::size_t i) { return ids.empty() ? i : ids[i]; };
  VisibleSet out;
  for (std::size_t i = 0; i < q.r; ++i) {
    std::size_t best = q.r;
    for (std::size_t x = 0; x < q.r; ++x) {
      if (x == i) continue;
      if (best == q.r || q(i, x) < q(i, best) || (q(i, x) == q(i, best) && id(x) < id(best))) best = x;
    }
    if (best != q.r) out.pairs.push_back({id(i), id(best), q(i, best)});
  }
  return out;
}

VisibleSet fnj_update(const VisibleSet& visible, std::size_t i, std::size_t j, const VisiblePair& u_pair) {
  VisibleSet out;
  for (auto p : visible.pairs) {
    if (p.node == i || p.node == j) continue;
    if (p.partner == i || p.partner == j) p.partner = u_pair.node;
    out.pairs.push_back(p);
  }
  out.pairs.push_back(u_pair);
  return out;
}

std::array<double, 3> resolve_final_three(const DistanceMatrix& d3) {
  if (d3.size() != 3) throw InputError("final resolution needs exactly 3 nodes");
  const double xy = d3(0, 1), xz = d3(0, 2), yz = d3(1, 2);
  return {(xy + xz - yz) / 2.0, (xy + yz - xz) / 2.0, (xz + yz - xy) / 2.0};
}

PhyloTree run_nj(const DistanceMatrix& input, NjVariant variant, const NjOptions& options) {
  if (input.size() == 0) throw InputError("empty distance matrix");
  input.validate();
  const std::size_t n = input.size();
  PhyloTree tree(input.labels());
  if (n == 1) return tree;
  if (n == 2) {
    tree.add_edge(0, 1, input(0, 1));
    return tree;
  }

  std::vector<double> d(n * n), v;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = input(i, j);
  const bool bionj = variant == NjVariant::bionj;
  if (bionj) v = d;
  auto D = [&](std::size_t a, std::size_t b) -> double& { return d[a * n + b]; };
  auto V = [&](std::size_t a, std::size_t b) -> double& { return v[a * n + b]; };

  std::vector<std::size_t> active(n), node(n), size(n, 1);
  for (std::size_t i = 0; i < n; ++i) active[i] = node[i] = i;
  std::vector<double> R(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) R[i] += D(i, k);
  std::optional<std::size_t> newest;
  // Saitou–Nei rows carry an additive offset from the zero-length reduction; lengths subtract it.
  std::vector<double> offset(n, 0.0);

  auto q_sk = [&](std::size_t a, std::size_t b, std::size_t r) {
    return static_cast<double>(r - 2) * D(a, b) - R[a] - R[b];
  };

  // FNJ visible partner per slot.
  std::vector<std::size_t> partner(n, n);
  auto row_argmin = [&](std::size_t a, std::size_t r) {
    std::size_t best = n;
    double best_v = 0.0;
    for (std::size_t x : active) {
      if (x == a) continue;
      double qv = q_sk(a, x, r);
      if (best == n || qv < best_v || (qv == best_v && node[x] < node[best])) best = x, best_v = qv;
    }
    return best;
  };
  if (variant == NjVariant::fnj)
    for (std::size_t a : active) partner[a] = row_argmin(a, n);

  while (active.size() > 3) {
    const std::size_t r = active.size();
    const double rm2 = static_cast<double>(r - 2);
    PairPicker pick{options.tie, newest};
    if (variant == NjVariant::fnj) {
      for (std::size_t a : active) {
        std::size_t b = partner[a];
        pick.offer(q_sk(a, b, r), a, b, node[a], node[b]);
      }
    } else {
      double total = 0.0;
      if (variant == NjVariant::saitou_nei)
        for (std::size_t a : active) total += R[a];
      total /= 2.0;
      for (std::size_t x = 0; x < r; ++x) {
        for (std::size_t y = x + 1; y < r; ++y) {
          std::size_t a = active[x], b = active[y];
          double qv = 0.0;
          if (variant == NjVariant::saitou_nei)
            qv = 0.5 * D(a, b) + (R[a] + R[b] - 2.0 * D(a, b)) / (2.0 * rm2) + (total - R[a] - R[b] + D(a, b)) / rm2;
          else if (bionj && options.bionj_selection == BionjSelection::min_variance)
            qv = V(a, b);
          else
            qv = q_sk(a, b, r);
          pick.offer(qv, a, b, node[a], node[b]);
        }
      }
    }
    std::size_t i = pick.i, j = pick.j;
    const double dij = D(i, j);

    double diu = 0.0;
    if (variant == NjVariant::unj) {
      std::size_t rest = 0;
      double s = 0.0;
      for (std::size_t k : active) {
        if (k == i || k == j) continue;
        rest += size[k];
        s += static_cast<double>(size[k]) * (D(i, k) - D(j, k));
      }
      diu = 0.5 * dij + s / (2.0 * static_cast<double>(rest));
    } else {
      diu = 0.5 * dij + (R[i] - R[j]) / (2.0 * rm2);
    }
    const double dju = dij - diu;

    double lambda = 0.5;
    if (variant == NjVariant::unj) {
      lambda = static_cast<double>(size[i]) / static_cast<double>(size[i] + size[j]);
    } else if (bionj) {
      const double vij = V(i, j);
      if (vij != 0.0) {
        double s = 0.0;
        for (std::size_t k : active)
          if (k != i && k != j) s += V(j, k) - V(i, k);
        lambda = std::clamp(0.5 + s / (2.0 * rm2 * vij), 0.0, 1.0);
      }
    }
    const double red_iu = variant == NjVariant::saitou_nei ? 0.0 : diu;
    const double red_ju = variant == NjVariant::saitou_nei ? 0.0 : dju;

    std::size_t u = tree.add_node();
    tree.add_edge(node[i], u, diu - offset[i]);
    tree.add_edge(node[j], u, dju - offset[j]);

    active.erase(std::find(active.begin(), active.end(), j));
    double ru = 0.0;
    const double var_u = bionj ? lambda * (1.0 - lambda) * V(i, j) : 0.0;
    for (std::size_t k : active) {
      if (k == i) continue;
      double duk = lambda * (D(i, k) - red_iu) + (1.0 - lambda) * (D(j, k) - red_ju);
      R[k] += duk - D(i, k) - D(j, k);
      ru += duk;
      D(i, k) = D(k, i) = duk;
      if (bionj) {
        double vuk = lambda * (V(i, k) - var_u) + (1.0 - lambda) * (V(j, k) - var_u);
        V(i, k) = V(k, i) = vuk;
      }
    }
    R[i] = ru;
    if (variant == NjVariant::saitou_nei) offset[i] = 0.5 * dij;
    node[i] = u;
    size[i] += size[j];
    newest = u;

    if (variant == NjVariant::fnj) {
      for (std::size_t k : active)
        if (partner[k] == j) partner[k] = i;
      partner[i] = row_argmin(i, r - 1);
    }
  }

  DistanceMatrix last({"x", "y", "z"});
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) last.set(a, b, D(active[a], active[b]));
  auto len = resolve_final_three(last);
  std::size_t center = tree.add_node();
  for (std::size_t a = 0; a < 3; ++a) tree.add_edge(node[active[a]], center, len[a] - offset[active[a]]);

  if (options.clamp_negative)
    for (std::size_t e = 0; e < tree.edges().size(); ++e) tree.edge(e).length = std::max(0.0, tree.edges()[e].length);
  return tree;
}

double tree_path_distance(const PhyloTree& t, std::size_t i, std::size_t j) { return t.path_distance(i, j); }

const char* to_string(NjVariant variant) {
  switch (variant) {
    case NjVariant::saitou_nei: return "nj-sn";
    case NjVariant::studier_kepler: return "nj-sk";
    case NjVariant::unj: return "unj";
    case NjVariant::bionj: return "bionj";
    case NjVariant::fnj: return "fnj";
  }
  return "?";
}

std::optional<NjVariant> parse_nj_variant(std::string_view name) {
  for (auto v : {NjVariant::saitou_nei, NjVariant::studier_kepler, NjVariant::unj, NjVariant::bionj, NjVariant::fnj})
    if (name == to_string(v)) return v;
  return std::nullopt;
}

}  // namespace distphylo

#include "distphylo/agglomerative.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "distphylo/errors.hpp"

namespace distphylo {

ReductionResult reduce(ReductionKind kind, const ReductionInput& in, bool clamp_negative) {
  const double ni = static_cast<double>(in.size_i);
  const double nj = static_cast<double>(in.size_j);
  double v = 0.0;
  switch (kind) {
    case ReductionKind::upgma: v = (ni * in.d_ik + nj * in.d_jk) / (ni + nj); break;
    case ReductionKind::wpgma: v = 0.5 * (in.d_ik + in.d_jk); break;
    case ReductionKind::single: v = std::min(in.d_ik, in.d_jk); break;
    case ReductionKind::complete: v = std::max(in.d_ik, in.d_jk); break;
    case ReductionKind::upgmc:
      v = (ni * in.d_ik + nj * in.d_jk) / (ni + nj) - ni * nj / ((ni + nj) * (ni + nj)) * in.d_ij;
      break;
    case ReductionKind::wpgmc: v = 0.5 * in.d_ik + 0.5 * in.d_jk - 0.25 * in.d_ij; break;
  }
  ReductionResult r{v, false};
  if (v < 0.0) {
    r.degenerate = true;
    if (clamp_negative) r.value = 0.0;
  }
  return r;
}

bool supports_nn_chain(ReductionKind kind) {
  return kind == ReductionKind::upgma || kind == ReductionKind::wpgma || kind == ReductionKind::single ||
         kind == ReductionKind::complete;
}

namespace {

// Square working copy indexed by slot; slots are recycled for merged clusters.
struct Working {
  std::size_t n = 0;
  std::vector<double> d;
  std::vector<std::size_t> id, size;
  std::vector<bool> active;

  explicit Working(const DistanceMatrix& m) : n(m.size()), d(n * n), id(n), size(n, 1), active(n, true) {
    for (std::size_t i = 0; i < n; ++i) {
      id[i] = i;
      auto r = m.row(i);
      std::copy(r.begin(), r.end(), d.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
  }
  double& at(std::size_t a, std::size_t b) { return d[a * n + b]; }

  // Merges slot b into slot a.
  void merge(std::size_t a, std::size_t b, std::size_t new_id, ReductionKind kind, bool clamp) {
    const double dab = at(a, b);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      double v = reduce(kind, {size[a], size[b], at(a, k), at(b, k), dab}, clamp).value;
      at(a, k) = v;
      at(k, a) = v;
    }
    size[a] += size[b];
    id[a] = new_id;
    active[b] = false;
  }

  // Drops inactive slots so scans stay cache-friendly. Returns the new slot of every old slot.
  std::vector<std::size_t> compact() {
    std::vector<std::size_t> slot(n, n), keep;
    for (std::size_t s = 0; s < n; ++s)
      if (active[s]) slot[s] = keep.size(), keep.push_back(s);
    const std::size_t m = keep.size();
    std::vector<double> nd(m * m);
    std::vector<std::size_t> nid(m), nsize(m);
    for (std::size_t i = 0; i < m; ++i) {
      nid[i] = id[keep[i]];
      nsize[i] = size[keep[i]];
      for (std::size_t j = 0; j < m; ++j) nd[i * m + j] = d[keep[i] * n + keep[j]];
    }
    n = m;
    d.swap(nd);
    id.swap(nid);
    size.swap(nsize);
    active.assign(m, true);
    return slot;
  }
};

std::tuple<bool, std::size_t, std::size_t> tie_key(std::size_t x, std::size_t y, std::size_t newest, TieRule rule) {
  std::size_t lo = std::min(x, y), hi = std::max(x, y);
  bool has_newest = rule == TieRule::avoid_newest && (x == newest || y == newest);
  return {has_newest, lo, hi};
}

void check_input(const DistanceMatrix& m) {
  if (m.size() == 0) throw InputError("empty distance matrix");
  m.validate();
}

}  // namespace

Dendrogram run_gcp(const DistanceMatrix& m, ReductionKind kind, const ClusterOptions& options) {
  check_input(m);
  Working w(m);
  Dendrogram out{m.labels(), {}};
  const std::size_t n = m.size();
  std::size_t newest = static_cast<std::size_t>(-1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = 0, bj = 0;
    bool found = false;
    double best = 0.0;
    std::tuple<bool, std::size_t, std::size_t> best_key;
    for (std::size_t i = 0; i < n; ++i) {
      if (!w.active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!w.active[j]) continue;
        double v = w.at(i, j);
        if (found && v > best) continue;
        auto key = tie_key(w.id[i], w.id[j], newest, options.tie);
        if (!found || v < best || key < best_key) {
          found = true, best = v, best_key = key, bi = i, bj = j;
        }
      }
    }
    std::size_t a = w.id[bi], b = w.id[bj];
    out.merges.push_back({std::min(a, b), std::max(a, b), best / 2.0});
    newest = n + step;
    w.merge(bi, bj, newest, kind, options.clamp_negative);
  }
  return out;
}

Dendrogram run_nn_chain(const DistanceMatrix& m, ReductionKind kind) {
  if (!supports_nn_chain(kind))
    throw DomainError(std::string("nearest-neighbour chain needs a reducible linkage; ") + to_string(kind) +
                      " is not");
  check_input(m);
  Working w(m);
  const std::size_t n = m.size();
  // Provisional ids n + discovery index; relabelled after sorting by height.
  std::vector<Merge> found;
  std::vector<std::size_t> chain;
  std::size_t remaining = n;
  while (remaining > 1) {
    if (remaining * 2 < w.n && w.n > 64) {
      auto slot = w.compact();
      for (auto& c : chain) c = slot[c];
    }
    const std::size_t slots = w.n;
    if (chain.empty()) {
      std::size_t start = slots;
      for (std::size_t s = 0; s < slots; ++s)
        if (w.active[s] && (start == slots || w.id[s] < w.id[start])) start = s;
      chain.push_back(start);
    }
    std::size_t a = chain.back();
    std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : slots;
    std::size_t best = prev;
    double best_d = prev < slots ? w.at(a, prev) : 0.0;
    const double* row = &w.at(a, 0);
    for (std::size_t s = 0; s < slots; ++s) {
      if (!w.active[s] || s == a || s == prev) continue;
      double v = row[s];
      // Keep the previous chain element on ties so the chain always terminates.
      if (best == slots || v < best_d || (v == best_d && best != prev && w.id[s] < w.id[best])) {
        best = s;
        best_d = v;
      }
    }
    if (best == prev) {
      chain.pop_back();
      chain.pop_back();
      std::size_t x = w.id[a], y = w.id[prev];
      found.push_back({std::min(x, y), std::max(x, y), best_d / 2.0});
      std::size_t keep = std::min(a, prev), drop = std::max(a, prev);
      w.merge(keep, drop, n + found.size() - 1, kind, false);
      --remaining;
    } else {
      chain.push_back(best);
    }
  }

  // Order by height; a parent never precedes its children even if rounding inverts heights.
  std::vector<double> key(found.size());
  for (std::size_t s = 0; s < found.size(); ++s) {
    key[s] = found[s].height;
    for (std::size_t c : {found[s].left, found[s].right})
      if (c >= n) key[s] = std::max(key[s], key[c - n]);
  }
  std::vector<std::size_t> order(found.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key[x] < key[y]; });
  std::vector<std::size_t> relabel(found.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) relabel[order[pos]] = n + pos;
  auto map_id = [&](std::size_t c) { return c < n ? c : relabel[c - n]; };

  Dendrogram out{m.labels(), {}};
  for (std::size_t s : order) {
    std::size_t x = map_id(found[s].left), y = map_id(found[s].right);
    out.merges.push_back({std::min(x, y), std::max(x, y), found[s].height});
  }
  return out;
}

const char* to_string(ReductionKind kind) {
  switch (kind) {
    case ReductionKind::upgma: return "upgma";
    case ReductionKind::wpgma: return "wpgma";
    case ReductionKind::single: return "single";
    case ReductionKind::complete: return "complete";
    case ReductionKind::upgmc: return "upgmc";
    case ReductionKind::wpgmc: return "wpgmc";
  }
  return "?";
}

std::optional<ReductionKind> parse_reduction_kind(std::string_view name) {
  for (auto k : {ReductionKind::upgma, ReductionKind::wpgma, ReductionKind::single, ReductionKind::complete,
                 ReductionKind::upgmc, ReductionKind::wpgmc})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

}  // namespace distphylo

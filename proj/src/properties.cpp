#include "distphylo/properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "distphylo/agglomerative.hpp"
#include "distphylo/errors.hpp"
#include "distphylo/min_evolution.hpp"
#include "distphylo/nj.hpp"

namespace distphylo {

namespace {

std::optional<ReductionKind> as_reduction(PropertyRule rule) {
  switch (rule) {
    case PropertyRule::upgma: return ReductionKind::upgma;
    case PropertyRule::wpgma: return ReductionKind::wpgma;
    case PropertyRule::single: return ReductionKind::single;
    case PropertyRule::complete: return ReductionKind::complete;
    case PropertyRule::upgmc: return ReductionKind::upgmc;
    case PropertyRule::wpgmc: return ReductionKind::wpgmc;
    default: return std::nullopt;
  }
}

struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(std::uint64_t seed) : rng(seed) {}
  // Uniform on (0, 10].
  double distance() { return 10.0 - std::uniform_real_distribution<double>(0.0, 10.0)(rng); }
  std::size_t size(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }

  DistanceMatrix matrix(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("t" + std::to_string(i));
    DistanceMatrix d(labels);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, distance());
    return d;
  }
};

std::string describe(const DistanceMatrix& d) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < d.size(); ++i) {
    os << (i ? "; " : "") << "[";
    for (std::size_t j = 0; j < d.size(); ++j) os << (j ? " " : "") << d(i, j);
    os << "]";
  }
  return os.str();
}

std::vector<double> flatten(const DistanceMatrix& d) {
  std::vector<double> out;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) out.push_back(d(i, j));
  return out;
}

bool outside(double v, double a, double b) {
  const double tol = 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
  return v < std::min(a, b) - tol || v > std::max(a, b) + tol;
}

// NJ join of rows i, j with NJ branch lengths and lambda = 1/2; the new row is last.
DistanceMatrix nj_join(const DistanceMatrix& d, std::size_t i, std::size_t j) {
  auto [diu, dju] = branch_lengths(d, i, j, BranchScheme::nj);
  return reduce_matrix(d, i, j, diu, dju, 0.5);
}

}  // namespace

PropertyVerdict check_convexity(PropertyRule rule, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InputError("need at least one trial");
  Sampler s(seed);
  PropertyVerdict v;
  for (std::size_t t = 0; t < trials; ++t) {
    v.trials = t + 1;
    if (auto kind = as_reduction(rule)) {
      ReductionInput in{s.size(1, 10), s.size(1, 10), s.distance(), s.distance(), s.distance()};
      double duk = reduce(*kind, in).value;
      if (outside(duk, in.d_ik, in.d_jk)) {
        std::ostringstream os;
        os.precision(17);
        os << "|Ci|=" << in.size_i << " |Cj|=" << in.size_j << " Dik=" << in.d_ik << " Djk=" << in.d_jk
           << " Dij=" << in.d_ij << " -> Duk=" << duk;
        v.holds = false;
        v.witness = os.str();
        v.witness_values = {double(in.size_i), double(in.size_j), in.d_ik, in.d_jk, in.d_ij, duk};
        return v;
      }
      continue;
    }
    if (rule == PropertyRule::nj) {
      DistanceMatrix d = s.matrix(s.size(4, 8));
      auto [i, j] = select_pair(q_matrix(d, QVariant::studier_kepler), TieRule::lexicographic);
      DistanceMatrix r = nj_join(d, i, j);
      const std::size_t u = r.size() - 1;
      std::size_t row = 0;
      for (std::size_t k = 0; k < d.size(); ++k) {
        if (k == i || k == j) continue;
        if (outside(r(u, row), d(i, k), d(j, k))) {
          std::ostringstream os;
          os.precision(17);
          os << "joining rows " << i << "," << j << " of " << describe(d) << ": D_uk=" << r(u, row) << " for k=" << k
             << " outside [" << std::min(d(i, k), d(j, k)) << ", " << std::max(d(i, k), d(j, k)) << "]";
          v.holds = false;
          v.witness = os.str();
          v.witness_values = flatten(d);
          return v;
        }
        ++row;
      }
      continue;
    }
    // Subtree-average updates of the addition methods: k joins subtree A, distance to B.
    const std::size_t a = s.size(1, 10);
    const double d_ab = s.distance(), d_kb = s.distance();
    const double updated = rule == PropertyRule::gme ? avg_distance(WeightScheme::ols, d_kb, d_ab, 1, a)
                                                     : avg_distance(WeightScheme::balanced, d_kb, d_ab, 1, a);
    if (outside(updated, d_ab, d_kb)) {
      std::ostringstream os;
      os << "|A|=" << a << " D_AB=" << d_ab << " D_kB=" << d_kb << " -> " << updated;
      v.holds = false;
      v.witness = os.str();
      v.witness_values = {double(a), d_ab, d_kb, updated};
      return v;
    }
  }
  return v;
}

PropertyVerdict check_commutativity(PropertyRule rule, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InputError("need at least one trial");
  Sampler s(seed);
  PropertyVerdict v;
  for (std::size_t t = 0; t < trials; ++t) {
    v.trials = t + 1;
    if (auto kind = as_reduction(rule)) {
      // Clusters 0..3 plus an observer 4; join {0,1} and {2,3} in both orders.
      std::size_t sz[5];
      for (auto& x : sz) x = s.size(1, 10);
      double d[5][5] = {};
      for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) d[i][j] = d[j][i] = s.distance();
      auto red = [&](std::size_t ni, std::size_t nj, double dik, double djk, double dij) {
        return reduce(*kind, {ni, nj, dik, djk, dij}).value;
      };
      // First {0,1} -> u, then {2,3} -> w.
      double u2 = red(sz[0], sz[1], d[0][2], d[1][2], d[0][1]);
      double u3 = red(sz[0], sz[1], d[0][3], d[1][3], d[0][1]);
      double u4 = red(sz[0], sz[1], d[0][4], d[1][4], d[0][1]);
      double a_uw = red(sz[2], sz[3], u2, u3, d[2][3]);
      double a_w4 = red(sz[2], sz[3], d[2][4], d[3][4], d[2][3]);
      double a_u4 = u4;
      // First {2,3} -> w, then {0,1} -> u.
      double w0 = red(sz[2], sz[3], d[2][0], d[3][0], d[2][3]);
      double w1 = red(sz[2], sz[3], d[2][1], d[3][1], d[2][3]);
      double w4 = red(sz[2], sz[3], d[2][4], d[3][4], d[2][3]);
      double b_uw = red(sz[0], sz[1], w0, w1, d[0][1]);
      double b_u4 = red(sz[0], sz[1], d[0][4], d[1][4], d[0][1]);
      double b_w4 = w4;
      const double tol = 1e-12 * 10.0;
      if (std::fabs(a_uw - b_uw) > tol || std::fabs(a_u4 - b_u4) > tol || std::fabs(a_w4 - b_w4) > tol) {
        std::ostringstream os;
        os.precision(17);
        os << "orders disagree: D(u,w) " << a_uw << " vs " << b_uw;
        v.holds = false;
        v.witness = os.str();
        v.witness_values = {a_uw, b_uw, a_u4, b_u4, a_w4, b_w4};
        return v;
      }
      continue;
    }
    if (rule == PropertyRule::nj) {
      DistanceMatrix d = s.matrix(5);
      // Rows 0,1 then 2,3 (renumbered to 0,1 after the first join), and the reverse.
      DistanceMatrix a = nj_join(nj_join(d, 0, 1), 0, 1);  // rows: 4, u, w
      DistanceMatrix b = nj_join(nj_join(d, 2, 3), 0, 1);  // rows: 4, w, u
      const double tol = 1e-9;
      double a_uw = a(1, 2), b_uw = b(1, 2), a_u4 = a(0, 1), b_u4 = b(0, 2), a_w4 = a(0, 2), b_w4 = b(0, 1);
      if (std::fabs(a_uw - b_uw) > tol || std::fabs(a_u4 - b_u4) > tol || std::fabs(a_w4 - b_w4) > tol) {
        v.holds = false;
        v.witness = "orders disagree on " + describe(d);
        v.witness_values = flatten(d);
        return v;
      }
      continue;
    }
    // Addition methods: swap the last two insertions and compare the resulting trees.
    const std::size_t n = s.size(5, 8);
    DistanceMatrix d = s.matrix(n);
    const WeightScheme scheme = rule == PropertyRule::gme ? WeightScheme::ols : WeightScheme::balanced;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    DistanceMatrix first = run_addition(d, scheme, order).path_distances();
    std::swap(order[n - 1], order[n - 2]);
    DistanceMatrix second = run_addition(d, scheme, order).path_distances();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (std::fabs(first(i, j) - second(i, j)) > 1e-9) {
          v.holds = false;
          v.witness = "insertion orders ending (" + std::to_string(n - 2) + "," + std::to_string(n - 1) + ") and (" +
                      std::to_string(n - 1) + "," + std::to_string(n - 2) + ") give different trees on " + describe(d);
          v.witness_values = flatten(d);
          return v;
        }
  }
  return v;
}

TopologyCounts tree_topology_counts(std::size_t n) {
  if (n < 2) throw DomainError("topology counts need at least 2 taxa");
  auto odd_factorial = [](std::size_t m) {  // m!! for odd m (1 for m <= 1)
    BigInt r = 1;
    for (std::size_t k = 3; k <= m; k += 2) r *= k;
    return r;
  };
  TopologyCounts c;
  c.rooted = odd_factorial(2 * n - 3);
  if (n >= 3) c.unrooted = odd_factorial(2 * n - 5);
  return c;
}

const char* to_string(PropertyRule rule) {
  switch (rule) {
    case PropertyRule::upgma: return "upgma";
    case PropertyRule::wpgma: return "wpgma";
    case PropertyRule::single: return "single";
    case PropertyRule::complete: return "complete";
    case PropertyRule::upgmc: return "upgmc";
    case PropertyRule::wpgmc: return "wpgmc";
    case PropertyRule::nj: return "nj";
    case PropertyRule::gme: return "gme";
    case PropertyRule::bme: return "bme";
  }
  return "?";
}

std::optional<PropertyRule> parse_property_rule(std::string_view name) {
  for (auto r : {PropertyRule::upgma, PropertyRule::wpgma, PropertyRule::single, PropertyRule::complete,
                 PropertyRule::upgmc, PropertyRule::wpgmc, PropertyRule::nj, PropertyRule::gme, PropertyRule::bme})
    if (name == to_string(r)) return r;
  return std::nullopt;
}

}  // namespace distphylo

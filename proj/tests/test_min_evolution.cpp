#include <doctest.h>

#include <cmath>
#include <map>

#include "distphylo/errors.hpp"
#include "distphylo/min_evolution.hpp"
#include "support/fixtures.hpp"
#include "support/me_oracle.hpp"

using namespace distphylo;

namespace {

const WeightScheme kSchemes[] = {WeightScheme::ols, WeightScheme::balanced};

bool is_ancestor_or_self(const AdditionState& s, std::size_t u, std::size_t v) {
  for (std::size_t x = v;; x = s.parent(x)) {
    if (x == u) return true;
    if (x == s.root()) return false;
  }
}

// Leaf weights of the subtree hanging off `from` away from `excluded`.
std::map<std::size_t, double> subtree_weights(const AdditionState& s, std::size_t from, std::size_t excluded) {
  std::map<std::size_t, double> out;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{from, excluded}};
  std::vector<double> weight{1.0};
  while (!stack.empty()) {
    auto [x, came] = stack.back();
    double w = weight.back();
    stack.pop_back();
    weight.pop_back();
    std::vector<std::size_t> next;
    if (x != s.root() && s.parent(x) != came) next.push_back(s.parent(x));
    for (auto c : s.children(x))
      if (c != came) next.push_back(c);
    if (next.empty()) {
      out[x] = w;
      continue;
    }
    double share = s.scheme() == WeightScheme::balanced ? w / static_cast<double>(next.size()) : w;
    for (auto y : next) stack.push_back({y, x}), weight.push_back(share);
  }
  if (s.scheme() == WeightScheme::ols)
    for (auto& [leaf, w] : out) w = 1.0 / static_cast<double>(out.size());
  return out;
}

std::map<std::size_t, double> subtree_weights(const AdditionState& s, SubtreeRef r) {
  if (!r.up) return subtree_weights(s, r.node, r.node == s.root() ? kNoNode : s.parent(r.node));
  return subtree_weights(s, s.parent(r.node), r.node);
}

double scratch_average(const AdditionState& s, SubtreeRef a, SubtreeRef b) {
  double v = 0.0;
  for (auto [i, wi] : subtree_weights(s, a))
    for (auto [j, wj] : subtree_weights(s, b)) v += wi * wj * s.distances()(i, j);
  return v;
}

void check_table(const AdditionState& s) {
  auto nodes = s.nodes();
  for (auto v : nodes) {
    if (v == s.root()) continue;
    for (auto u : nodes) {
      if (u == s.root()) continue;
      if (is_ancestor_or_self(s, u, v)) {
        CHECK(std::fabs(s.average({v, false}, {u, true}) - scratch_average(s, {v, false}, {u, true})) < 1e-12);
      } else if (!is_ancestor_or_self(s, v, u)) {
        CHECK(std::fabs(s.average({v, false}, {u, false}) - scratch_average(s, {v, false}, {u, false})) < 1e-12);
      }
    }
  }
}

void check_lengths(const AdditionState& s) {
  auto st = oracle::state_tree(s);
  auto d = oracle::submatrix(s.distances(), st.taxa);
  double sum = 0.0;
  for (auto e : s.edges()) sum += edge_length(s, e);
  double want = oracle::scheme_length(s.scheme(), st.tree, d);
  CHECK(std::fabs(tree_length(s) - sum) < 1e-9);
  CHECK(std::fabs(tree_length(s) - want) < 1e-9);
  if (s.scheme() == WeightScheme::ols) {
    auto ls = oracle::ols_lengths(st.tree, d);
    for (std::size_t i = 0; i < ls.size(); ++i) CHECK(std::fabs(edge_length(s, st.edge_of[i]) - ls[i]) < 1e-9);
  }
}

}  // namespace

TEST_CASE("average formulas") {
  CHECK(avg_distance(WeightScheme::balanced, 2, 7, 1, 1) == 4.5);
  CHECK(avg_distance(WeightScheme::ols, 2, 7, 3, 3) == avg_distance(WeightScheme::balanced, 2, 7, 3, 3));
  CHECK(avg_distance(WeightScheme::ols, 6, 3, 2, 1) == 5);
  // closed-form OLS update with |A| = 1
  CHECK(avg_distance(WeightScheme::ols, 5, 5, 1, 1) == 5);
  CHECK(avg_distance(WeightScheme::ols, 3, 7, 1, 1) == 5);
}

TEST_CASE("lambda weights") {
  CHECK(lambda_weight(WeightScheme::ols, 1, 1, 1, 1) == 0.5);
  CHECK(lambda_weight(WeightScheme::ols, 2, 1, 1, 3) == doctest::Approx(7.0 / 12.0));
  CHECK(lambda_weight(WeightScheme::balanced, 2, 1, 1, 3) == 0.5);
  CHECK(lambda_weight(WeightScheme::balanced, 9, 4, 1, 7) == 0.5);
}

TEST_CASE("three-leaf star on matrix (2)") {
  auto d = fixture::matrix2();
  for (auto scheme : kSchemes) {
    AdditionState s(d, scheme, {0, 1, 2});
    CHECK(s.edges().size() == 3);
    CHECK(tree_length(s) == doctest::Approx(8));
    CHECK(edge_length(s, 2) == doctest::Approx(6));
  }
}

TEST_CASE("quartet length on matrix (2)") {
  auto d = fixture::matrix2();
  AdditionState s(d, WeightScheme::ols, {0, 1, 2});
  insert_taxon(s, 2, 3);  // D joins the edge to C
  update_after_insertion(s);
  CHECK(s.edges().size() == 5);
  CHECK(tree_length(s) == doctest::Approx(10.5));
  check_lengths(s);
}

TEST_CASE("inserting E into the quartet matches brute force") {
  auto d = fixture::matrix2();
  for (auto scheme : kSchemes) {
    AdditionState s(d, scheme, {0, 1, 2});
    insert_taxon(s, 2, 3);
    update_after_insertion(s);
    auto costs = insertion_costs(s, 4);
    CHECK(costs.size() == 5);
    CHECK(costs.front().cost == 0.0);
    auto brute = oracle::brute_force_insertions(s, 4);
    double base = brute[costs.front().edge];
    for (const auto& c : costs) CHECK(std::fabs(c.cost - (brute[c.edge] - base)) < 1e-9);
  }
}

TEST_CASE("incremental costs and tables against brute force") {
  oracle::Rng rng(59);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 4 + trial % 9;
    auto d = oracle::to_matrix(oracle::random_matrix(n, rng));
    for (auto scheme : kSchemes) {
      AdditionState s(d, scheme, {0, 1, 2});
      check_table(s);
      for (std::size_t k = 3; k < n; ++k) {
        auto costs = insertion_costs(s, k);
        auto brute = oracle::brute_force_insertions(s, k);
        REQUIRE(costs.size() == brute.size());
        double base = brute[costs.front().edge];
        std::size_t best = costs.front().edge, brute_best = best;
        double best_cost = 0.0, brute_cost = base;
        for (const auto& c : costs) {
          CHECK(std::fabs(c.cost - (brute[c.edge] - base)) < 1e-9);
          if (c.cost < best_cost) best_cost = c.cost, best = c.edge;
          if (brute[c.edge] < brute_cost) brute_cost = brute[c.edge], brute_best = c.edge;
        }
        CHECK(best == brute_best);
        insert_taxon(s, best, k);
        CHECK(s.pending_update());
        update_after_insertion(s);
        check_table(s);
        check_lengths(s);
      }
      CHECK(s.edges().size() == 2 * n - 3);
    }
  }
}

TEST_CASE("ols edge lengths ignore subtree shape") {
  // Two 6-taxon trees that differ only inside the subtree {2,3,4} give the same length for an edge next to it.
  oracle::Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    auto d = oracle::to_matrix(oracle::random_matrix(6, rng));
    auto build = [&](std::size_t partner_of_4) {
      AdditionState s(d, WeightScheme::ols, {0, 1, 2});
      for (auto [edge, k] : {std::pair<std::size_t, std::size_t>{2, 5}, {2, 3}, {partner_of_4, 4}}) {
        insert_taxon(s, edge, k);
        update_after_insertion(s);
      }
      return s;
    };
    // Node 7 joins taxon 5 with the subtree {2,3,4}; its edge sees the same four subtrees in both shapes.
    auto a = build(2);
    auto b = build(3);
    std::size_t top = 7;
    REQUIRE(a.size(SubtreeRef{8, false}) == 3);
    CHECK(std::fabs(edge_length(a, top) - edge_length(b, top)) < 1e-12);
  }
}

TEST_CASE("run_addition on matrix (2)") {
  auto d = fixture::matrix2();
  auto truth = oracle::reference_nj(fixture::kMatrix2);
  for (auto scheme : kSchemes) {
    auto t = run_addition(d, scheme);
    t.validate(true);
    CHECK(oracle::rf_distance(oracle::from_phylo(t), truth) == 0);
  }
}

TEST_CASE("additive matrices are recovered") {
  oracle::Rng rng(67);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 4 + trial % 16;
    auto truth = oracle::random_binary_tree(n, rng);
    auto d = oracle::to_matrix(oracle::leaf_paths(truth).first);
    for (auto scheme : kSchemes) {
      auto t = run_addition(d, scheme);
      CHECK(oracle::rf_distance(oracle::from_phylo(t), truth) == 0);
      CHECK(t.path_distance(0, n - 1) == doctest::Approx(d(0, n - 1)).epsilon(1e-9));
    }
  }
}

TEST_CASE("insertion order matters") {
  oracle::Rng rng(71);
  bool found = false;
  for (int trial = 0; trial < 200 && !found; ++trial) {
    auto d = oracle::to_matrix(oracle::random_matrix(7, rng));
    auto a = run_addition(d, WeightScheme::balanced, std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
    auto b = run_addition(d, WeightScheme::balanced, std::vector<std::size_t>{0, 1, 2, 3, 4, 6, 5});
    found = oracle::rf_distance(oracle::from_phylo(a), oracle::from_phylo(b)) != 0;
  }
  CHECK(found);
}

TEST_CASE("small and invalid inputs") {
  auto three = DistanceMatrix::from_rows({"a", "b", "c"}, {{0, 2, 3}, {2, 0, 4}, {3, 4, 0}});
  for (auto scheme : kSchemes) {
    auto t = run_addition(three, scheme);
    CHECK(t.edges().size() == 3);
    CHECK(t.path_distance(1, 2) == doctest::Approx(4));
  }
  CHECK_THROWS_AS(run_addition(three, WeightScheme::ols, std::vector<std::size_t>{0, 1, 1}), InputError);
  auto seq = insertion_sequence(10, InsertionOrder::random, 5);
  CHECK(seq == insertion_sequence(10, InsertionOrder::random, 5));
  std::sort(seq.begin(), seq.end());
  CHECK(seq == insertion_sequence(10, InsertionOrder::input, 0));
}

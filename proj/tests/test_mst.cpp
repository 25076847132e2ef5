#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "distphylo/errors.hpp"
#include "distphylo/io.hpp"
#include "distphylo/mst.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace distphylo;

namespace {

using EdgeSet = std::set<std::pair<std::size_t, std::size_t>>;

EdgeSet edge_set(const Forest& f) {
  EdgeSet s;
  for (const auto& e : f.edges) s.insert(std::minmax(e.u, e.v));
  return s;
}

std::multiset<double> weights(const Forest& f) {
  std::multiset<double> w;
  for (const auto& e : f.edges) w.insert(e.weight);
  return w;
}

ProfileSet matrix2_profiles() {
  std::istringstream in(fixture::kMatrix2Profiles);
  return read_profiles(in);
}

const MstAlgorithm kAlgorithms[] = {MstAlgorithm::kruskal, MstAlgorithm::prim, MstAlgorithm::boruvka};

}  // namespace

TEST_CASE("complete graph mst on matrix (2)") {
  auto g = WeightedGraph::complete(fixture::matrix2());
  CHECK(g.edges.size() == 10);
  for (auto alg : kAlgorithms) {
    auto f = generic_mst(g, natural_edge_order(), alg);
    CHECK(f.total_weight() == 16);
    CHECK(f.edges.size() == 4);
    CHECK(f.component_count() == 1);
  }
}

TEST_CASE("a tree is returned unchanged") {
  WeightedGraph path{{"a", "b", "c", "d"}, {{0, 1, 5}, {1, 2, 1}, {2, 3, 9}}};
  for (auto alg : kAlgorithms) {
    auto f = generic_mst(path, natural_edge_order(), alg);
    CHECK(edge_set(f) == EdgeSet{{0, 1}, {1, 2}, {2, 3}});
  }
}

TEST_CASE("forests and components") {
  WeightedGraph g{{"a", "b", "c", "d", "e"}, {{0, 1, 1}, {3, 4, 2}}};
  auto f = generic_mst(g, natural_edge_order(), MstAlgorithm::prim);
  CHECK(f.component_count() == 3);
  CHECK(f.component == std::vector<std::size_t>{0, 0, 2, 3, 3});
}

TEST_CASE("algorithms agree on random complete graphs") {
  oracle::Rng rng(73);
  for (int trial = 0; trial < 100; ++trial) {
    auto d = oracle::to_matrix(oracle::random_matrix(3 + trial % 15, rng));
    auto g = WeightedGraph::complete(d);
    auto k = generic_mst(g, natural_edge_order(), MstAlgorithm::kruskal);
    CHECK(edge_set(k) == edge_set(generic_mst(g, natural_edge_order(), MstAlgorithm::prim)));
    CHECK(edge_set(k) == edge_set(generic_mst(g, natural_edge_order(), MstAlgorithm::boruvka)));
  }
}

TEST_CASE("mst weight is minimal") {
  oracle::Rng rng(79);
  std::uniform_int_distribution<int> w(1, 6);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = 2 + trial % 6;
    oracle::Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = w(rng);
    auto g = WeightedGraph::complete(oracle::to_matrix(m));
    for (auto alg : kAlgorithms)
      CHECK(generic_mst(g, natural_edge_order(), alg).total_weight() == oracle::brute_force_mst_weight(m));
  }
}

TEST_CASE("a non-total comparator is reported") {
  auto g = WeightedGraph::complete(fixture::matrix2());
  EdgeLess by_weight = [](const WeightedEdge& a, const WeightedEdge& b) { return a.weight < b.weight; };
  for (auto alg : kAlgorithms) {
    try {
      generic_mst(g, by_weight, alg);
      FAIL("expected a comparator error");
    } catch (const InvariantError& e) {
      CHECK(std::string(e.what()).find("compare equal") != std::string::npos);
    }
  }
}

TEST_CASE("graph validation") {
  WeightedGraph loop{{"a", "b"}, {{0, 0, 1}}};
  CHECK_THROWS_AS(loop.validate(), InputError);
  WeightedGraph dup{{"a", "b"}, {{0, 1, 1}, {1, 0, 2}}};
  CHECK_THROWS_AS(dup.validate(), InputError);
  WeightedGraph range{{"a", "b"}, {{0, 2, 1}}};
  CHECK_THROWS_AS(generic_mst(range, natural_edge_order(), MstAlgorithm::kruskal), InputError);
}

TEST_CASE("locus variant counts") {
  auto stats = lv_counts(fixture::matrix2(), 3);
  for (const auto& s : stats) CHECK(s.slv() == 0);
  CHECK(stats[0].dlv() == 1);
  CHECK(stats[1].dlv() == 1);
  CHECK(stats[2].dlv() == 0);
  CHECK(stats[3].tlv() == 1);
  CHECK(stats[4].tlv() == 1);
  CHECK(stats[0].tlv() == 0);

  auto same = DistanceMatrix::from_rows({"a", "b"}, {{0, 0}, {0, 0}});
  for (const auto& s : lv_counts(same, 3)) CHECK(s.slv() + s.dlv() + s.tlv() == 0);
  auto one = DistanceMatrix::from_rows({"a", "b"}, {{0, 1}, {1, 0}});
  for (const auto& s : lv_counts(one, 3)) CHECK(s.slv() == 1);
  auto frac = DistanceMatrix::from_rows({"a", "b"}, {{0, 1.5}, {1.5, 0}});
  CHECK_THROWS_AS(lv_counts(frac, 3), InputError);
}

TEST_CASE("goeburst edge order") {
  // a-b and c-d both at distance 1; c has an extra SLV (e), so c-d goes first.
  auto d = DistanceMatrix::from_rows({"a", "b", "c", "d", "e"}, {{0, 1, 4, 4, 4},
                                                                 {1, 0, 4, 4, 4},
                                                                 {4, 4, 0, 1, 1},
                                                                 {4, 4, 1, 0, 2},
                                                                 {4, 4, 1, 2, 0}});
  auto stats = lv_counts(d, 3);
  WeightedEdge ab{0, 1, 1}, cd{2, 3, 1}, ce{2, 4, 1}, ae{0, 4, 4};
  CHECK(goeburst_edge_order(cd, ab, stats) < 0);
  CHECK(goeburst_edge_order(ab, cd, stats) > 0);
  CHECK(goeburst_edge_order(ab, ae, stats) < 0);
  CHECK(goeburst_edge_order(ab, ab, stats) == 0);
  CHECK(goeburst_edge_order(ab, WeightedEdge{1, 0, 1}, stats) == 0);
  // equal counts: frequency decides, then the lower id
  auto flat = DistanceMatrix::from_rows({"a", "b", "c", "d"},
                                        {{0, 1, 3, 3}, {1, 0, 3, 3}, {3, 3, 0, 1}, {3, 3, 1, 0}});
  auto plain = lv_counts(flat, 3);
  WeightedEdge x{0, 1, 1}, y{2, 3, 1};
  CHECK(goeburst_edge_order(x, y, plain) < 0);
  std::vector<std::uint64_t> freq{1, 1, 4, 1};
  auto weighted = lv_counts(flat, 3, freq);
  CHECK(goeburst_edge_order(y, x, weighted) < 0);
}

TEST_CASE("goeburst levels on matrix (2)") {
  auto d = fixture::matrix2();
  CHECK(run_goeburst(d, 1).edges.empty());
  CHECK(edge_set(run_goeburst(d, 2)) == EdgeSet{{0, 1}});
  CHECK(edge_set(run_goeburst(d, 3)) == EdgeSet{{0, 1}, {3, 4}});
  CHECK(run_goeburst(d, 3).component_count() == 3);
  CHECK(run_goeburst(d, 2).level == 2.0);

  auto p = matrix2_profiles();
  CHECK(run_goeburst(p, 1).edges.empty());
  CHECK(edge_set(run_goeburst(p, 3)) == EdgeSet{{0, 1}, {3, 4}});
}

TEST_CASE("goeburst full mst on matrix (2)") {
  auto d = fixture::matrix2();
  auto f = run_goeburst_full_mst(d);
  CHECK(f.total_weight() == 16);
  CHECK(weights(f) == std::multiset<double>{2, 3, 5, 6});
  CHECK(edge_set(f) == EdgeSet{{0, 1}, {3, 4}, {2, 4}, {0, 4}});
  CHECK(edge_set(run_goeburst_full_mst(matrix2_profiles())) == edge_set(f));

  // The weight-5 tie: E has a TLV (D at 3) and C has none, so C-E outranks C-D.
  auto stats = lv_counts(d, 7);
  CHECK(goeburst_edge_order({2, 4, 5}, {2, 3, 5}, stats) < 0);

  auto k = generic_mst(WeightedGraph::complete(d), goeburst_less(stats), MstAlgorithm::kruskal);
  CHECK(edge_set(k) == edge_set(f));
}

TEST_CASE("goeburst full mst equals kruskal under the same order") {
  oracle::Rng rng(83);
  std::uniform_int_distribution<int> w(1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 3 + trial % 10;
    oracle::Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = w(rng);
    auto d = oracle::to_matrix(m);
    auto f = run_goeburst_full_mst(d);
    auto k = generic_mst(WeightedGraph::complete(d), goeburst_less(lv_counts(d, 5)), MstAlgorithm::kruskal);
    CHECK(edge_set(f) == edge_set(k));
    if (n <= 8) CHECK(f.total_weight() == oracle::brute_force_mst_weight(m));
  }
  auto single = DistanceMatrix::from_rows({"a"}, {{0}});
  CHECK(run_goeburst_full_mst(single).edges.empty());
}

TEST_CASE("goeburst ignores row order") {
  oracle::Rng rng(89);
  std::uniform_int_distribution<int> w(1, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 8;
    oracle::Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = w(rng);
    // Reversed rows with ids preserved through the frequencies: give each vertex a distinct
    // frequency so the tie-break does not depend on row position.
    std::vector<std::uint64_t> freq(n), rev_freq(n);
    for (std::size_t i = 0; i < n; ++i) freq[i] = 10 + i, rev_freq[n - 1 - i] = 10 + i;
    oracle::Matrix r(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r[i][j] = m[n - 1 - i][n - 1 - j];
    for (std::size_t level : {1u, 2u, 3u}) {
      auto a = run_goeburst(oracle::to_matrix(m), level, freq);
      auto b = run_goeburst(oracle::to_matrix(r), level, rev_freq);
      EdgeSet mapped;
      for (auto [u, v] : edge_set(b)) mapped.insert(std::minmax(n - 1 - u, n - 1 - v));
      CHECK(edge_set(a) == mapped);
    }
  }
}

TEST_CASE("fhp on the three sequences") {
  CharacterSequenceSet s{{"S1", "S2", "S3"}, {"abcde", "bbdce", "acdcd"}};
  auto t = run_fhp(s);
  REQUIRE(t.labels.size() == 4);
  CHECK(t.is_steiner(3));
  CHECK(t.sequences[3] == "abdce");
  CHECK(t.labels[3] == "steiner_1");
  REQUIRE(t.edges.size() == 3);
  std::map<std::size_t, std::size_t> to_steiner;
  for (const auto& e : t.edges) {
    CHECK(e.v == 3);
    to_steiner[e.u] = e.weight;
  }
  CHECK(to_steiner == std::map<std::size_t, std::size_t>{{0, 2}, {1, 1}, {2, 2}});
  CHECK(t.total_weight() == 5);
}

TEST_CASE("fhp trivial inputs") {
  auto two = run_fhp({{"x", "y"}, {"abc", "abd"}});
  CHECK(two.labels.size() == 2);
  REQUIRE(two.edges.size() == 1);
  CHECK(two.edges[0].weight == 1);
  CHECK(two.edges[0].positions == std::vector<std::size_t>{3});

  auto same = run_fhp({{"x", "y", "z"}, {"abc", "abc", "abc"}});
  CHECK(same.labels.size() == 3);
  for (const auto& e : same.edges) CHECK(e.weight == 0);
  CHECK_THROWS_AS(run_fhp({{"x"}, {"abc"}}), InputError);
}

TEST_CASE("fhp invariants on random sequences") {
  oracle::Rng rng(97);
  std::uniform_int_distribution<int> ch(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + trial % 8, len = 3 + trial % 9;
    CharacterSequenceSet s;
    for (std::size_t i = 0; i < n; ++i) {
      s.labels.push_back("s" + std::to_string(i));
      std::string seq;
      for (std::size_t p = 0; p < len; ++p) seq += static_cast<char>('a' + ch(rng));
      s.sequences.push_back(seq);
    }
    auto t = run_fhp(s);
    // acyclic and connected over every node
    CHECK(t.edges.size() + 1 == t.labels.size());
    std::vector<std::size_t> comp(t.labels.size());
    std::iota(comp.begin(), comp.end(), 0);
    auto find = [&](std::size_t x) {
      while (comp[x] != x) x = comp[x];
      return x;
    };
    for (const auto& e : t.edges) {
      std::size_t diff = 0;
      for (std::size_t p = 0; p < len; ++p) diff += t.sequences[e.u][p] != t.sequences[e.v][p];
      CHECK(e.weight == diff);
      CHECK(e.positions.size() == diff);
      comp[find(e.u)] = find(e.v);
    }
    for (std::size_t v = 0; v < t.labels.size(); ++v) CHECK(find(v) == find(0));
    // coalescing never lengthens the Kruskal tree over the originals
    oracle::Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t p = 0; p < len; ++p) m[i][j] += s.sequences[i][p] != s.sequences[j][p];
    if (n <= 8) CHECK(static_cast<double>(t.total_weight()) <= oracle::brute_force_mst_weight(m));
  }
}

TEST_CASE("algorithm names") {
  for (auto a : kAlgorithms) CHECK(parse_mst_algorithm(to_string(a)) == a);
  CHECK_FALSE(parse_mst_algorithm("dijkstra").has_value());
}

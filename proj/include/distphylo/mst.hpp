#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "distphylo/distance.hpp"
#include "distphylo/distance_matrix.hpp"
#include "distphylo/graph.hpp"
#include "distphylo/profiles.hpp"

namespace distphylo {

// Strict "a before b". Must totally order distinct edges.
using EdgeLess = std::function<bool(const WeightedEdge&, const WeightedEdge&)>;

// Weight, then smaller endpoint, then larger endpoint.
EdgeLess natural_edge_order();

enum class MstAlgorithm { kruskal, prim, boruvka };

// Minimum spanning forest under `less`. Throws InvariantError naming the pair when two
// distinct edges compare equal.
Forest generic_mst(const WeightedGraph& g, const EdgeLess& less, MstAlgorithm algorithm);

struct LvProfileStats {
  std::vector<std::size_t> lv;  // lv[d-1] = number of vertices at distance d
  std::uint64_t frequency = 1;
  std::size_t id = 0;

  std::size_t count(std::size_t distance) const {
    return distance >= 1 && distance <= lv.size() ? lv[distance - 1] : 0;
  }
  std::size_t slv() const { return count(1); }
  std::size_t dlv() const { return count(2); }
  std::size_t tlv() const { return count(3); }
};

// Counts at exact distances 1..max(level, 3). Throws InputError on non-integer entries.
std::vector<LvProfileStats> lv_counts(const DistanceMatrix& d, std::size_t level,
                                      std::span<const std::uint64_t> frequencies = {});

// <0 when a precedes b, >0 when b precedes a, 0 only for the same vertex pair.
int goeburst_edge_order(const WeightedEdge& a, const WeightedEdge& b, const std::vector<LvProfileStats>& stats);
EdgeLess goeburst_less(std::vector<LvProfileStats> stats);

Forest run_goeburst(const DistanceMatrix& d, std::size_t level, std::span<const std::uint64_t> frequencies = {});
Forest run_goeburst_full_mst(const DistanceMatrix& d, std::span<const std::uint64_t> frequencies = {},
                             std::optional<std::size_t> lv_depth = std::nullopt);

// Profile overloads: raw Hamming distances, profile frequencies, LV depth = number of loci.
Forest run_goeburst(const ProfileSet& p, std::size_t level, MissingPolicy policy = {});
Forest run_goeburst_full_mst(const ProfileSet& p, MissingPolicy policy = {});

SteinerTree run_fhp(const CharacterSequenceSet& s);

const char* to_string(MstAlgorithm algorithm);
std::optional<MstAlgorithm> parse_mst_algorithm(std::string_view name);

}  // namespace distphylo

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace distphylo {

// Reduction rules the property checkers know about. `nj` is the neighbour-joining
// reduction (lambda = 1/2 with NJ branch lengths); gme/bme are the subtree-averaging
// updates of the minimum-evolution insertion.
enum class PropertyRule { upgma, wpgma, single, complete, upgmc, wpgmc, nj, gme, bme };

struct PropertyVerdict {
  bool holds = true;  // no counterexample among the sampled trials
  std::size_t trials = 0;
  std::string witness;  // human-readable counterexample, empty when holds
  std::vector<double> witness_values;
};

PropertyVerdict check_convexity(PropertyRule rule, std::size_t trials, std::uint64_t seed);
PropertyVerdict check_commutativity(PropertyRule rule, std::size_t trials, std::uint64_t seed);

using BigInt = boost::multiprecision::cpp_int;

struct TopologyCounts {
  std::optional<BigInt> unrooted;  // n >= 3
  BigInt rooted;                   // n >= 2
};

// (2n-5)!! unrooted and (2n-3)!! rooted binary topologies.
TopologyCounts tree_topology_counts(std::size_t n);

const char* to_string(PropertyRule rule);
std::optional<PropertyRule> parse_property_rule(std::string_view name);

}  // namespace distphylo

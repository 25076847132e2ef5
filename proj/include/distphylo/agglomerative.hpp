#pragma once

#include <cstddef>
#include <optional>

#include "distphylo/dendrogram.hpp"
#include "distphylo/distance_matrix.hpp"

namespace distphylo {

enum class ReductionKind { upgma, wpgma, single, complete, upgmc, wpgmc };

struct ReductionInput {
  std::size_t size_i = 1;
  std::size_t size_j = 1;
  double d_ik = 0.0;
  double d_jk = 0.0;
  double d_ij = 0.0;
};

struct ReductionResult {
  double value = 0.0;
  bool degenerate = false;  // centroid formula went negative
};

// Dissimilarity from the merge of C_i and C_j to a third cluster C_k.
ReductionResult reduce(ReductionKind kind, const ReductionInput& in, bool clamp_negative = false);

// Lexicographic: smallest (min id, max id). AvoidNewest: pairs without the most recent
// cluster first, then lexicographic.
enum class TieRule { lexicographic, avoid_newest };

struct ClusterOptions {
  TieRule tie = TieRule::lexicographic;
  bool clamp_negative = false;
};

// Exhaustive globally-closest-pair agglomeration, O(n^3).
Dendrogram run_gcp(const DistanceMatrix& m, ReductionKind kind, const ClusterOptions& options = {});

bool supports_nn_chain(ReductionKind kind);

// Nearest-neighbour chain, O(n^2) time. Throws DomainError for centroid kinds.
Dendrogram run_nn_chain(const DistanceMatrix& m, ReductionKind kind);

const char* to_string(ReductionKind kind);
std::optional<ReductionKind> parse_reduction_kind(std::string_view name);

}  // namespace distphylo

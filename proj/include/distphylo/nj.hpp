#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "distphylo/agglomerative.hpp"
#include "distphylo/distance_matrix.hpp"
#include "distphylo/phylo_tree.hpp"

namespace distphylo {

enum class QVariant { saitou_nei, studier_kepler };

struct QMatrix {
  QVariant variant = QVariant::studier_kepler;
  std::size_t r = 0;
  std::vector<double> values;  // r x r, diagonal unused

  double operator()(std::size_t i, std::size_t j) const { return values[i * r + j]; }
};

// Criterion over all rows of d. Saitou-Nei is evaluated term by term as printed.
QMatrix q_matrix(const DistanceMatrix& d, QVariant variant);

// Argmin over i < j. `ids` gives the node id of each row (default: row index).
// `newest`, when set, is the id of the most recently created node (for avoid_newest).
std::pair<std::size_t, std::size_t> select_pair(const QMatrix& q, TieRule tie = TieRule::avoid_newest,
                                                const std::vector<std::size_t>& ids = {},
                                                std::optional<std::size_t> newest = std::nullopt);

enum class BranchScheme { nj, unj };

// Lengths of the edges i-u and j-u. For unj, `sizes` holds the leaf count of every row.
std::pair<double, double> branch_lengths(const DistanceMatrix& d, std::size_t i, std::size_t j,
                                         BranchScheme scheme, const std::vector<std::size_t>& sizes = {});

// Rows i and j replaced by a new last row u with D_uk = l(D_ik - D_iu) + (1-l)(D_jk - D_ju).
DistanceMatrix reduce_matrix(const DistanceMatrix& d, std::size_t i, std::size_t j, double d_iu,
                             double d_ju, double lambda, const std::string& new_label = "u");

// 1/2 + sum_k (V_jk - V_ik) / (2 (r-2) V_ij), clamped to [0, 1].
double bionj_lambda(const DistanceMatrix& v, std::size_t i, std::size_t j);
DistanceMatrix bionj_reduce_variance(const DistanceMatrix& v, std::size_t i, std::size_t j, double v_iu,
                                     double v_ju, double lambda, const std::string& new_label = "u");

struct VisiblePair {
  std::size_t node = 0;
  std::size_t partner = 0;
  double value = 0.0;
};

// One entry per node, keyed by node id.
struct VisibleSet {
  std::vector<VisiblePair> pairs;

  const VisiblePair* find(std::size_t node) const;
};

// Each row's argmin partner (ties to the smaller id). `ids` maps rows to node ids.
VisibleSet fnj_visible_set(const QMatrix& q, const std::vector<std::size_t>& ids = {});
// Drops i and j, redirects partners i/j to u, and adds u's own pair.
VisibleSet fnj_update(const VisibleSet& visible, std::size_t i, std::size_t j, const VisiblePair& u_pair);

// Star lengths (d_x, d_y, d_z) for the last three nodes.
std::array<double, 3> resolve_final_three(const DistanceMatrix& d3);

enum class NjVariant { saitou_nei, studier_kepler, unj, bionj, fnj };

enum class BionjSelection { q_over_d, min_variance };

struct NjOptions {
  TieRule tie = TieRule::avoid_newest;
  BionjSelection bionj_selection = BionjSelection::q_over_d;
  bool clamp_negative = false;  // display-only: negative lengths become 0 in the output
};

PhyloTree run_nj(const DistanceMatrix& d, NjVariant variant, const NjOptions& options = {});

double tree_path_distance(const PhyloTree& t, std::size_t i, std::size_t j);

const char* to_string(NjVariant variant);
std::optional<NjVariant> parse_nj_variant(std::string_view name);

}  // namespace distphylo

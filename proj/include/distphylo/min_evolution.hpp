#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "distphylo/distance_matrix.hpp"
#include "distphylo/phylo_tree.hpp"

namespace distphylo {

enum class WeightScheme { ols, balanced };

// Average distance of subtree S_i to the union of disjoint subtrees S_j1, S_j2.
double avg_distance(WeightScheme scheme, double d_ij1, double d_ij2, std::size_t size_j1, std::size_t size_j2);

// Weight of the (A,C)+(B,D) pairing for an internal edge separating A,B from C,D.
double lambda_weight(WeightScheme scheme, std::size_t a, std::size_t b, std::size_t c, std::size_t d);

// A subtree of the partial tree: everything below `node` (down) or everything on the
// parent side of `node`'s parent edge (up). The tree is rooted at its first taxon.
struct SubtreeRef {
  std::size_t node = 0;
  bool up = false;
};

// Partial tree of the addition methods plus the table of subtree average distances.
// Edges are named by their lower endpoint.
class AdditionState {
 public:
  // Star on the three given taxa; `first[0]` becomes the root leaf.
  AdditionState(const DistanceMatrix& d, WeightScheme scheme, std::array<std::size_t, 3> first);

  const DistanceMatrix& distances() const { return *d_; }
  WeightScheme scheme() const { return scheme_; }
  std::size_t taxa_in_tree() const { return taxa_; }
  std::size_t root() const { return root_; }
  bool contains(std::size_t node) const { return present_[node]; }
  bool is_leaf(std::size_t node) const { return node < d_->size(); }
  std::size_t parent(std::size_t node) const { return parent_[node]; }
  const std::vector<std::size_t>& children(std::size_t node) const { return children_[node]; }
  std::vector<std::size_t> nodes() const;
  std::vector<std::size_t> edges() const;
  std::size_t size(SubtreeRef s) const { return s.up ? taxa_ - size_[s.node] : size_[s.node]; }

  // Average distance between two disjoint subtrees.
  double average(SubtreeRef a, SubtreeRef b) const;

  // Average distance from a taxon not yet in the tree to every subtree.
  struct TaxonAverages {
    std::size_t taxon = 0;
    std::vector<double> down;
    std::vector<double> up;

    double operator()(SubtreeRef s) const { return s.up ? up[s.node] : down[s.node]; }
  };
  TaxonAverages taxon_averages(std::size_t k) const;

  // Topology step: splits edge e with a new node carrying leaf k. Leaves the average
  // table stale until update_after_insertion.
  void insert_taxon(std::size_t edge, std::size_t k);
  void update_after_insertion();
  bool pending_update() const { return pending_.has_value(); }

  std::size_t max_nodes() const { return present_.size(); }

 private:
  double& at(std::size_t a, std::size_t b) { return avg_[a * present_.size() + b]; }
  double at(std::size_t a, std::size_t b) const { return avg_[a * present_.size() + b]; }
  void put(std::size_t a, std::size_t b, double v) {
    at(a, b) = v;
    at(b, a) = v;
  }
  double combine(double x, std::size_t nx, double y, std::size_t ny) const;

  struct Pending {
    std::size_t k = 0;
    std::size_t s = 0;  // lower node of the split edge
    std::size_t w = 0;  // new internal node
    TaxonAverages averages;
    std::vector<std::size_t> old_depth, tin, tout, order;
    std::vector<std::size_t> old_parent;
  };

  const DistanceMatrix* d_ = nullptr;
  WeightScheme scheme_ = WeightScheme::ols;
  std::size_t taxa_ = 0;
  std::size_t root_ = 0;
  std::size_t next_internal_ = 0;
  std::vector<bool> present_;
  std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> size_;
  std::vector<double> avg_;
  std::optional<Pending> pending_;
};

inline constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);

struct EdgeCost {
  std::size_t edge = 0;
  double cost = 0.0;  // change in tree length relative to the first scanned edge
};

// Costs of inserting taxon k on every edge, in scan order.
std::vector<EdgeCost> insertion_costs(const AdditionState& state, std::size_t k);

void insert_taxon(AdditionState& state, std::size_t edge, std::size_t k);
void update_after_insertion(AdditionState& state);

double edge_length(const AdditionState& state, std::size_t edge);
double tree_length(const AdditionState& state);

// The partial tree with fitted edge lengths; leaf ids are taxon ids.
PhyloTree to_phylo_tree(const AdditionState& state);

enum class InsertionOrder { input, random };

PhyloTree run_addition(const DistanceMatrix& d, WeightScheme scheme, InsertionOrder order = InsertionOrder::input,
                       std::uint64_t seed = 0);

// Taxon order used by run_addition.
std::vector<std::size_t> insertion_sequence(std::size_t n, InsertionOrder order, std::uint64_t seed);
PhyloTree run_addition(const DistanceMatrix& d, WeightScheme scheme, const std::vector<std::size_t>& order);

}  // namespace distphylo

#pragma once

#include <istream>
#include <string>
#include <vector>

#include "distphylo/dendrogram.hpp"
#include "distphylo/distance_matrix.hpp"
#include "distphylo/graph.hpp"
#include "distphylo/phylo_tree.hpp"
#include "distphylo/profiles.hpp"

namespace distphylo {

struct ProfileReadOptions {
  std::vector<std::string> missing_markers{"0", "-", ""};
};

ProfileSet read_profiles(std::istream& in, const ProfileReadOptions& options = {});
std::string write_profiles(const ProfileSet& profiles);

DistanceMatrix read_phylip_matrix(std::istream& in);
std::string write_phylip_matrix(const DistanceMatrix& m);

CharacterSequenceSet read_sequences(std::istream& in);

std::string write_newick(const Dendrogram& t, int precision = 10);
std::string write_newick(const PhyloTree& t, int precision = 10);

enum class EdgeFormat { tsv, dot };

std::string write_edges(const Forest& f, EdgeFormat format);
std::string write_edges(const SteinerTree& t, EdgeFormat format);
// "label<TAB>sequence<TAB>original|steiner" per node.
std::string write_steiner_nodes(const SteinerTree& t);

// Shortest %g rendering with `precision` significant digits; never "-0".
std::string format_number(double v, int precision = 10);

}  // namespace distphylo

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "distphylo/distance_matrix.hpp"
#include "distphylo/profiles.hpp"

namespace distphylo {

enum class MissingMode { strict, pairwise_deletion };
enum class MissingScale { none, rescale_to_loci };

struct MissingPolicy {
  MissingMode mode = MissingMode::strict;
  MissingScale scale = MissingScale::none;
};

struct HammingCount {
  std::size_t diff = 0;
  std::size_t shared = 0;  // loci where both alleles are present

  bool operator==(const HammingCount&) const = default;
};

HammingCount hamming_raw(std::span<const Allele> a, std::span<const Allele> b, MissingPolicy policy = {});
HammingCount hamming_raw(std::string_view a, std::string_view b);

// diff / L under strict, diff / shared under pairwise deletion.
double normalized_hamming(std::span<const Allele> a, std::span<const Allele> b, MissingPolicy policy = {});
double normalized_hamming(std::string_view a, std::string_view b);

struct JcOptions {
  // When set, H >= 3/4 returns this value instead of raising SaturationError.
  std::optional<double> saturation_ceiling;
};

// Jukes-Cantor: -3/4 ln(1 - 4H/3).
double jc_correct(double h, const JcOptions& options = {});

enum class Metric { raw, normalized, jc };

struct DistanceOptions {
  Metric metric = Metric::raw;
  MissingPolicy policy;
  JcOptions jc;
  unsigned threads = 1;
};

DistanceMatrix build_distance_matrix(const ProfileSet& profiles, const DistanceOptions& options = {});
DistanceMatrix build_distance_matrix(const CharacterSequenceSet& sequences, const DistanceOptions& options = {});

}  // namespace distphylo

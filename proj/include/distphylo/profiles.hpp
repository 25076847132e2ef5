#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace distphylo {

using Allele = std::int64_t;
inline constexpr Allele kMissingAllele = -1;

struct TypingProfile {
  std::string label;
  std::size_t id = 0;  // 0-based input order
  std::vector<Allele> alleles;
  std::uint64_t frequency = 1;

  bool has_missing() const;
};

struct ProfileSet {
  std::vector<TypingProfile> profiles;
  std::vector<std::string> locus_names;  // empty when the input had no header

  std::size_t size() const { return profiles.size(); }
  std::size_t loci() const { return profiles.empty() ? 0 : profiles.front().alleles.size(); }
  std::vector<std::string> labels() const;
  std::vector<std::uint64_t> frequencies() const;
  void validate() const;
};

struct CharacterSequenceSet {
  std::vector<std::string> labels;
  std::vector<std::string> sequences;

  std::size_t size() const { return labels.size(); }
  std::size_t length() const { return sequences.empty() ? 0 : sequences.front().size(); }
  void validate() const;
};

}  // namespace distphylo

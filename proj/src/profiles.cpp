#include "distphylo/profiles.hpp"

#include <algorithm>
#include <unordered_set>

#include "distphylo/errors.hpp"

namespace distphylo {

bool TypingProfile::has_missing() const {
  return std::find(alleles.begin(), alleles.end(), kMissingAllele) != alleles.end();
}

std::vector<std::string> ProfileSet::labels() const {
  std::vector<std::string> out;
  out.reserve(profiles.size());
  for (const auto& p : profiles) out.push_back(p.label);
  return out;
}

std::vector<std::uint64_t> ProfileSet::frequencies() const {
  std::vector<std::uint64_t> out;
  out.reserve(profiles.size());
  for (const auto& p : profiles) out.push_back(p.frequency);
  return out;
}

void ProfileSet::validate() const {
  std::unordered_set<std::string> seen;
  const std::size_t l = loci();
  if (!profiles.empty() && l == 0) throw InputError("profiles have no loci");
  if (!locus_names.empty() && locus_names.size() != l)
    throw InputError("locus name count " + std::to_string(locus_names.size()) + " does not match " +
                     std::to_string(l) + " loci");
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    if (p.id != i) throw InputError("profile " + p.label + ": ids must be dense in input order");
    if (p.alleles.size() != l) throw InputError("profile " + p.label + ": ragged allele vector");
    if (p.frequency < 1) throw InputError("profile " + p.label + ": frequency must be at least 1");
    if (!seen.insert(p.label).second) throw InputError("duplicate label " + p.label);
    for (Allele a : p.alleles)
      if (a < 0 && a != kMissingAllele) throw InputError("profile " + p.label + ": negative allele code");
  }
}

void CharacterSequenceSet::validate() const {
  if (labels.size() != sequences.size()) throw InputError("label and sequence counts differ");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!seen.insert(labels[i]).second) throw InputError("duplicate label " + labels[i]);
    if (sequences[i].size() != sequences.front().size())
      throw InputError("sequence " + labels[i] + " has length " + std::to_string(sequences[i].size()) +
                       ", expected " + std::to_string(sequences.front().size()));
  }
}

}  // namespace distphylo

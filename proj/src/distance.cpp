#include "distphylo/distance.hpp"

#include <cmath>
#include <exception>
#include <thread>

#include "distphylo/errors.hpp"

namespace distphylo {

HammingCount hamming_raw(std::span<const Allele> a, std::span<const Allele> b, MissingPolicy policy) {
  if (a.size() != b.size())
    throw InputError("allele vectors differ in length (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  HammingCount c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == kMissingAllele || b[i] == kMissingAllele) {
      if (policy.mode == MissingMode::strict)
        throw InputError("missing allele at locus " + std::to_string(i + 1) + " under strict policy");
      continue;
    }
    ++c.shared;
    if (a[i] != b[i]) ++c.diff;
  }
  if (c.shared == 0 && !a.empty()) throw InputError("no locus is present in both profiles");
  return c;
}

HammingCount hamming_raw(std::string_view a, std::string_view b) {
  if (a.size() != b.size())
    throw InputError("sequences differ in length (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  HammingCount c{0, a.size()};
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++c.diff;
  return c;
}

namespace {

double fraction(HammingCount c) {
  if (c.shared == 0) throw DomainError("no shared loci to compare");
  return static_cast<double>(c.diff) / static_cast<double>(c.shared);
}

}  // namespace

double normalized_hamming(std::span<const Allele> a, std::span<const Allele> b, MissingPolicy policy) {
  return fraction(hamming_raw(a, b, policy));
}

double normalized_hamming(std::string_view a, std::string_view b) { return fraction(hamming_raw(a, b)); }

double jc_correct(double h, const JcOptions& options) {
  if (!(h >= 0.0 && h <= 1.0)) throw DomainError("JC correction needs H in [0,1], got " + std::to_string(h));
  if (h >= 0.75) {
    if (options.saturation_ceiling) return *options.saturation_ceiling;
    throw SaturationError("JC correction saturated: H = " + std::to_string(h) + " >= 0.75");
  }
  if (h == 0.0) return 0.0;
  return -0.75 * std::log1p(-4.0 * h / 3.0);
}

namespace {

template <typename PairValue>
DistanceMatrix build(std::vector<std::string> labels, EntryKind kind, unsigned threads, PairValue value) {
  DistanceMatrix m(std::move(labels), kind);
  const std::size_t n = m.size();
  std::vector<std::exception_ptr> errors(n);
  auto rows = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      try {
        for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, value(i, j));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  // Rows touch disjoint cells, so any split gives the same matrix.
  std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (workers == 1) {
    rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(rows, t, workers);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return m;
}

template <typename Fn>
auto with_pair_context(const std::vector<std::string>& labels, std::size_t i, std::size_t j, Fn fn) {
  try {
    return fn();
  } catch (const SaturationError& e) {
    throw SaturationError("pair (" + labels[i] + ", " + labels[j] + "): " + e.what());
  } catch (const DomainError& e) {
    throw DomainError("pair (" + labels[i] + ", " + labels[j] + "): " + e.what());
  } catch (const InputError& e) {
    throw InputError("pair (" + labels[i] + ", " + labels[j] + "): " + e.what());
  }
}

double metric_value(HammingCount c, std::size_t loci, const DistanceOptions& o) {
  switch (o.metric) {
    case Metric::raw:
      if (o.policy.mode == MissingMode::pairwise_deletion && o.policy.scale == MissingScale::rescale_to_loci) {
        if (c.shared == 0) throw DomainError("no shared loci to compare");
        return static_cast<double>(c.diff) * static_cast<double>(loci) / static_cast<double>(c.shared);
      }
      return static_cast<double>(c.diff);
    case Metric::normalized: return fraction(c);
    case Metric::jc: return jc_correct(fraction(c), o.jc);
  }
  return 0.0;
}

EntryKind kind_for(const DistanceOptions& o) {
  switch (o.metric) {
    case Metric::raw:
      return o.policy.scale == MissingScale::rescale_to_loci && o.policy.mode == MissingMode::pairwise_deletion
                 ? EntryKind::generic
                 : EntryKind::raw_hamming;
    case Metric::normalized: return EntryKind::normalized_hamming;
    case Metric::jc: return EntryKind::jc_corrected;
  }
  return EntryKind::generic;
}

}  // namespace

DistanceMatrix build_distance_matrix(const ProfileSet& p, const DistanceOptions& o) {
  p.validate();
  auto labels = p.labels();
  const std::size_t loci = p.loci();
  return build(labels, kind_for(o), o.threads, [&](std::size_t i, std::size_t j) {
    return with_pair_context(labels, i, j, [&] {
      return metric_value(hamming_raw(p.profiles[i].alleles, p.profiles[j].alleles, o.policy), loci, o);
    });
  });
}

DistanceMatrix build_distance_matrix(const CharacterSequenceSet& s, const DistanceOptions& o) {
  s.validate();
  return build(s.labels, kind_for(o), o.threads, [&](std::size_t i, std::size_t j) {
    return with_pair_context(s.labels, i, j,
                             [&] { return metric_value(hamming_raw(s.sequences[i], s.sequences[j]), s.length(), o); });
  });
}

}  // namespace distphylo

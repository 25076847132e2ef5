#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace distphylo {

enum class EntryKind { raw_hamming, normalized_hamming, jc_corrected, generic };

// Symmetric, zero-diagonal, non-negative n x n matrix with one label per row.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::vector<std::string> labels, EntryKind kind = EntryKind::generic);

  // Builds from full rows; throws InputError if the rows are not a valid matrix.
  static DistanceMatrix from_rows(std::vector<std::string> labels,
                                  const std::vector<std::vector<double>>& rows,
                                  EntryKind kind = EntryKind::generic);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  EntryKind kind() const { return kind_; }
  void set_kind(EntryKind kind) { kind_ = kind; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  // Sets both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v) {
    values_[i * size() + j] = v;
    values_[j * size() + i] = v;
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * size(), size()};
  }

  // Throws InvariantError naming the first offending entry.
  void validate() const;

  bool operator==(const DistanceMatrix& other) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> values_;
  EntryKind kind_ = EntryKind::generic;
};

const char* to_string(EntryKind kind);

}  // namespace distphylo

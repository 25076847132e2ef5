#include "distphylo/distance_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "distphylo/errors.hpp"

namespace distphylo {

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, EntryKind kind)
    : labels_(std::move(labels)), values_(labels_.size() * labels_.size(), 0.0), kind_(kind) {}

DistanceMatrix DistanceMatrix::from_rows(std::vector<std::string> labels,
                                         const std::vector<std::vector<double>>& rows, EntryKind kind) {
  DistanceMatrix m(std::move(labels), kind);
  const std::size_t n = m.size();
  if (rows.size() != n) throw InputError("expected " + std::to_string(n) + " rows, got " + std::to_string(rows.size()));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw InputError("row " + m.label(i) + ": expected " + std::to_string(n) + " values, got " +
                       std::to_string(rows[i].size()));
    for (std::size_t j = 0; j < n; ++j) m.values_[i * n + j] = rows[i][j];
  }
  try {
    m.validate();
  } catch (const InvariantError& e) {
    throw InputError(e.what());
  }
  return m;
}

void DistanceMatrix::validate() const {
  const std::size_t n = size();
  if (values_.size() != n * n) throw InvariantError("matrix storage does not match label count");
  // Tiled pass first: large valid matrices are checked without strided column reads.
  constexpr std::size_t kTile = 32;
  bool clean = true;
  for (std::size_t bi = 0; bi < n && clean; bi += kTile)
    for (std::size_t bj = 0; bj <= bi && clean; bj += kTile)
      for (std::size_t i = bi; i < std::min(n, bi + kTile); ++i)
        for (std::size_t j = bj; j < std::min(n, bj + kTile); ++j) {
          double v = values_[i * n + j];
          if (!std::isfinite(v) || v < 0.0 || (i == j && v != 0.0) ||
              (j < i && !(std::fabs(v - values_[j * n + i]) <= 1e-9)))
            clean = false;
        }
  if (clean) return;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = (*this)(i, j);
      auto where = [&] { return "entry (" + label(i) + ", " + label(j) + ")"; };
      if (!std::isfinite(v)) throw InvariantError(where() + " is not finite");
      if (i == j) {
        if (v != 0.0) throw InvariantError(where() + ": diagonal must be zero");
        continue;
      }
      if (v < 0.0) throw InvariantError(where() + " is negative");
      if (j < i && std::fabs(v - (*this)(j, i)) > 1e-9) {
        std::ostringstream os;
        os << where() << ": asymmetric (" << v << " vs " << (*this)(j, i) << ")";
        throw InvariantError(os.str());
      }
    }
  }
}

const char* to_string(EntryKind kind) {
  switch (kind) {
    case EntryKind::raw_hamming: return "raw-hamming";
    case EntryKind::normalized_hamming: return "normalized-hamming";
    case EntryKind::jc_corrected: return "jc-corrected";
    case EntryKind::generic: return "generic";
  }
  return "generic";
}

}  // namespace distphylo

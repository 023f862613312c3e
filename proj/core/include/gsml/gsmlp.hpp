#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "gsml/feature_store.hpp"
#include "gsml/linalg.hpp"

namespace gsml {

/// Ordered list of sample indices (ascending for candidate sets, rank order
/// for rankings).
using CandidateSet = std::vector<std::size_t>;

/// Binary label vector over all n samples, owned by one sample whose own bit
/// is always set.
class MultiLabel {
 public:
  /// Single-class label: only the owner bit is set.
  MultiLabel(std::size_t n, std::size_t owner);
  /// Throws ValidationError unless bits[owner] == 1.
  MultiLabel(std::vector<std::uint8_t> bits, std::size_t owner);

  static MultiLabel from_positives(std::size_t n, std::size_t owner,
                                   std::span<const std::size_t> positives);

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t owner() const noexcept { return owner_; }
  bool operator[](std::size_t j) const noexcept { return bits_[j] != 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  /// Ascending indices of set bits.
  CandidateSet positives() const;
  std::size_t positive_count() const noexcept;

  friend bool operator==(const MultiLabel&, const MultiLabel&) = default;

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t owner_;
};

/// Thresholded cosine-similarity matrix M M^T. Entries below tau are zero and
/// the diagonal is exactly 1.
struct SoftAdjacency {
  Matrix matrix;
  double tau = 0.0;
  /// Rows of the source table that had never been written.
  std::size_t unwritten_rows = 0;
  /// Per-row flag copied from the table; unwritten rows are isolated nodes.
  std::vector<std::uint8_t> written;

  std::size_t size() const noexcept { return matrix.rows(); }
};

enum class Predictor { kGsmlp, kPss, kKnn };

Predictor parse_predictor(std::string_view name);
std::string_view to_string(Predictor p) noexcept;

/// Throws ValidationError unless tau is in (-1, 1].
void validate_tau(double tau);

SoftAdjacency build_adjacency(const LookupTable& table, double tau);

/// P+_i: indices with a non-zero adjacency entry, ascending. Always holds i.
CandidateSet positive_candidates(const SoftAdjacency& adj, std::size_t i);

/// Q_i: all n indices by ascending Euclidean distance between adjacency rows,
/// ties by index. Unwritten rows other than i go last.
CandidateSet neighbour_ranking(const SoftAdjacency& adj, std::size_t i);

/// GSMLP label: P+_i intersected with the first |P+_i| entries of Q_i.
MultiLabel predict_multilabel(const SoftAdjacency& adj, std::size_t i);

/// Pairwise-similarity baseline: every index in P+_i.
MultiLabel pss_predict(const SoftAdjacency& adj, std::size_t i);

/// Top-c nearest rows of the table by cosine similarity plus the self bit.
MultiLabel knn_predict(const LookupTable& table, std::size_t i, std::size_t c);

struct PredictorParams {
  Predictor predictor = Predictor::kGsmlp;
  double tau = 0.6;
  std::size_t knn_c = 4;
};

/// Labels for every row of the table with the chosen predictor.
std::vector<MultiLabel> predict_all(const LookupTable& table, const PredictorParams& params);

/// `index,positives` CSV, positives as a semicolon-separated ascending list.
void write_labels_csv(const std::filesystem::path& path, std::span<const MultiLabel> labels);
std::vector<MultiLabel> read_labels_csv(const std::filesystem::path& path);

}  // namespace gsml

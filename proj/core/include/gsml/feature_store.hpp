#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gsml/linalg.hpp"

namespace gsml {

/// Tolerance on |1 - ||z||| accepted for a unit feature.
inline constexpr double kUnitNormTolerance = 1e-6;

/// Below this norm an averaged row is treated as antipodal-degenerate.
inline constexpr double kDegenerateUpdateNorm = 1e-9;

/// A unit-L2-norm embedding. Construction validates the norm and finiteness.
class FeatureVector {
 public:
  explicit FeatureVector(std::vector<double> values);

  /// Normalizes `values`; throws ValidationError when the norm is zero or non-finite.
  static FeatureVector normalized(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<double> values_;
};

/// Cosine similarities s_j = z . m_j against every table row.
using SimilarityVector = std::vector<double>;

enum class UpdateStatus {
  kAveraged,     ///< row <- normalize(row + z)
  kInitialized,  ///< first write of a previously empty row: row <- z
  kDegenerate,   ///< row + z vanished; row left unchanged
};

/// In-memory look-up table of unit-norm features, one row per training sample.
///
/// Rows start out either copied from an initial feature set (init_table) or
/// empty (all zero). An empty row is "unwritten": it reads as zero similarity
/// and the label predictors exclude it until the first update_row() fills it.
///
/// Reads are safe from several threads on a table nobody is writing to.
class LookupTable {
 public:
  /// An n x d table with every row unwritten.
  LookupTable(std::size_t n, std::size_t d);

  std::size_t size() const noexcept { return rows_.rows(); }
  std::size_t dim() const noexcept { return rows_.cols(); }
  std::uint64_t step() const noexcept { return step_; }
  void set_step(std::uint64_t step) noexcept { step_ = step; }
  void advance_step() noexcept { ++step_; }

  std::span<const double> row(std::size_t i) const { return rows_.row(i); }
  const Matrix& rows() const noexcept { return rows_; }
  bool written(std::size_t i) const { return written_[i] != 0; }
  std::size_t unwritten_count() const noexcept;

  /// Running-average update of row i towards z followed by re-normalization.
  UpdateStatus update_row(std::size_t i, const FeatureVector& z);

  /// Overwrites every row with the matching feature; the step counter is kept.
  void reinitialize(std::span<const FeatureVector> features);

  /// Writes the "GSLT" little-endian snapshot.
  void save(const std::filesystem::path& path) const;
  static LookupTable load(const std::filesystem::path& path);

 private:
  Matrix rows_;
  std::vector<std::uint8_t> written_;
  std::uint64_t step_ = 0;
};

/// Table whose row i is features[i]; step 0.
LookupTable init_table(std::span<const FeatureVector> features);

SimilarityVector similarity_row(const LookupTable& table, std::span<const double> z);
inline SimilarityVector similarity_row(const LookupTable& table, const FeatureVector& z) {
  return similarity_row(table, z.values());
}

}  // namespace gsml

#include "gsml/feature_store.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gsml/error.hpp"
#include "snapshot.hpp"

namespace gsml {
namespace {

constexpr std::array<char, 4> kTableMagic{'G', 'S', 'L', 'T'};

}  // namespace

FeatureVector::FeatureVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw ValidationError("feature dimension must be >= 2");
  if (!all_finite(values_)) throw ValidationError("feature has non-finite entries");
  const double n = norm2(values_);
  if (std::abs(n - 1.0) > kUnitNormTolerance) {
    throw ValidationError("feature is not unit-norm (||z|| = " + std::to_string(n) + ")");
  }
}

FeatureVector FeatureVector::normalized(std::vector<double> values) {
  const double n = norm2(values);
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("cannot normalize a zero vector");
  for (auto& v : values) v /= n;
  return FeatureVector(std::move(values));
}

LookupTable::LookupTable(std::size_t n, std::size_t d) : rows_(n, d), written_(n, 0) {
  if (d < 2) throw ValidationError("table dimension must be >= 2");
}

std::size_t LookupTable::unwritten_count() const noexcept {
  return static_cast<std::size_t>(std::count(written_.begin(), written_.end(), 0));
}

UpdateStatus LookupTable::update_row(std::size_t i, const FeatureVector& z) {
  if (i >= size()) throw ValidationError("row index out of range");
  if (z.dim() != dim()) throw ValidationError("feature dimension does not match table");
  auto row = rows_.row(i);
  if (!written_[i]) {
    std::copy(z.values().begin(), z.values().end(), row.begin());
    written_[i] = 1;
    return UpdateStatus::kInitialized;
  }
  std::vector<double> sum(row.begin(), row.end());
  axpy(1.0, z.values(), sum);
  const double n = norm2(sum);
  if (n < kDegenerateUpdateNorm) return UpdateStatus::kDegenerate;
  for (std::size_t k = 0; k < sum.size(); ++k) row[k] = sum[k] / n;
  return UpdateStatus::kAveraged;
}

void LookupTable::reinitialize(std::span<const FeatureVector> features) {
  if (features.size() != size()) {
    throw ValidationError("reinitialize: expected " + std::to_string(size()) + " features, got " +
                          std::to_string(features.size()));
  }
  for (const auto& f : features) {
    if (f.dim() != dim()) throw ValidationError("reinitialize: feature dimension mismatch");
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    std::copy(features[i].values().begin(), features[i].values().end(), rows_.row(i).begin());
    written_[i] = 1;
  }
}

void LookupTable::save(const std::filesystem::path& path) const {
  if (size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("table too large for snapshot format");
  }
  detail::write_snapshot(path, kTableMagic, static_cast<std::uint32_t>(size()),
                         static_cast<std::uint32_t>(dim()), step_, rows_.data());
}

LookupTable LookupTable::load(const std::filesystem::path& path) {
  auto snap = detail::read_snapshot(path, kTableMagic);
  LookupTable table(snap.rows, snap.cols);
  std::copy(snap.values.begin(), snap.values.end(), table.rows_.data().begin());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double n = norm2(table.row(i));
    if (n == 0.0) continue;
    if (std::abs(n - 1.0) > kUnitNormTolerance) {
      throw IoError(path.string() + ": row " + std::to_string(i) + " is not unit-norm");
    }
    table.written_[i] = 1;
  }
  table.step_ = snap.step;
  return table;
}

LookupTable init_table(std::span<const FeatureVector> features) {
  if (features.empty()) throw ValidationError("init_table: no features");
  LookupTable table(features.size(), features.front().dim());
  table.reinitialize(features);
  table.set_step(0);
  return table;
}

SimilarityVector similarity_row(const LookupTable& table, std::span<const double> z) {
  if (z.size() != table.dim()) throw ValidationError("similarity_row: dimension mismatch");
  SimilarityVector s(table.size());
  for (std::size_t j = 0; j < table.size(); ++j) s[j] = dot(z, table.row(j));
  return s;
}

}  // namespace gsml

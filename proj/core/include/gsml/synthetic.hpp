#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gsml/linalg.hpp"

namespace gsml {

/// Parameters of the synthetic identity/camera generator.
struct DatasetSpec {
  std::size_t n_identities = 50;
  std::size_t images_per_identity = 8;
  std::size_t n_cameras = 4;
  std::size_t raw_dim = 64;
  std::size_t embed_dim = 32;
  /// Norm of the per-(identity, camera) appearance offset.
  double camera_shift = 0.3;
  /// Per-coordinate standard deviation of the per-sample Gaussian noise.
  double noise = 0.1;
  /// Pass every normalized sample through one fixed, ill-conditioned,
  /// invertible linear map.
  bool mixing = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Sample {
  std::size_t index = 0;
  std::size_t identity = 0;
  std::size_t camera = 0;
  std::vector<double> raw;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Samples indexed 0..n-1. identity/camera are ground truth for evaluation
/// only; training never reads them.
struct Dataset {
  std::vector<Sample> samples;
  std::size_t raw_dim = 0;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t identity_count() const;
  std::size_t camera_count() const;

  /// Checks index contiguity, uniform finite raw vectors.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Ratio between the largest and smallest singular value of the mixing map.
inline constexpr double kMixingConditionNumber = 100.0;

Dataset generate(const DatasetSpec& spec);

/// The mixing matrix used by generate(); depends on raw_dim and seed only.
Matrix mixing_matrix(std::size_t raw_dim, std::uint64_t seed);

/// CSV with header `index,identity,camera,x0,...,x{p-1}`.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace gsml

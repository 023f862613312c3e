#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>

#include "gsml/feature_store.hpp"
#include "gsml/linalg.hpp"

namespace gsml {

/// z = Wx / ||Wx||, the trainable embedding. W is d x p.
class LinearEncoder {
 public:
  LinearEncoder(Matrix weights, double epsilon = 1e-12);

  /// Entries i.i.d. uniform in [-1/sqrt(p), 1/sqrt(p)].
  static LinearEncoder random(std::size_t embed_dim, std::size_t raw_dim, std::uint64_t seed);

  std::size_t embed_dim() const noexcept { return weights_.rows(); }
  std::size_t raw_dim() const noexcept { return weights_.cols(); }
  double epsilon() const noexcept { return epsilon_; }
  const Matrix& weights() const noexcept { return weights_; }
  Matrix& weights() noexcept { return weights_; }

  /// `sample` only labels the DegenerateEmbedding error.
  FeatureVector encode(std::span<const double> x, std::size_t sample = 0) const;

  /// dL/dW given upstream = dL/dz at input x.
  Matrix encode_gradient(std::span<const double> x, std::span<const double> upstream,
                         std::size_t sample = 0) const;

  /// Adds dL/dW into `accum` without allocating a d x p temporary.
  void accumulate_gradient(std::span<const double> x, std::span<const double> upstream,
                           Matrix& accum, std::size_t sample = 0) const;

  /// "GSEW" snapshot: u32 rows = d, u32 cols = p, u64 step, then W row-major.
  void save(const std::filesystem::path& path, std::uint64_t step = 0) const;
  static LinearEncoder load(const std::filesystem::path& path, std::uint64_t* step = nullptr);

  friend bool operator==(const LinearEncoder&, const LinearEncoder&) = default;

 private:
  std::vector<double> project(std::span<const double> x) const;

  Matrix weights_;
  double epsilon_;
};

}  // namespace gsml

#include "gsml/encoder.hpp"

#include <cmath>
#include <random>
#include <string>

#include "gsml/error.hpp"
#include "snapshot.hpp"

namespace gsml {
namespace {

constexpr std::array<char, 4> kEncoderMagic{'G', 'S', 'E', 'W'};

}  // namespace

LinearEncoder::LinearEncoder(Matrix weights, double epsilon)
    : weights_(std::move(weights)), epsilon_(epsilon) {
  if (weights_.rows() < 2 || weights_.cols() < 1) {
    throw ValidationError("encoder needs d >= 2 and p >= 1");
  }
  if (!all_finite(weights_.data())) throw ValidationError("encoder weights must be finite");
  if (!(epsilon_ >= 0.0)) throw ValidationError("encoder epsilon must be >= 0");
}

LinearEncoder LinearEncoder::random(std::size_t embed_dim, std::size_t raw_dim,
                                    std::uint64_t seed) {
  if (raw_dim == 0) throw ValidationError("raw dimension must be >= 1");
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(raw_dim));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  Matrix w(embed_dim, raw_dim);
  for (auto& v : w.data()) v = uniform(rng);
  return LinearEncoder(std::move(w));
}

std::vector<double> LinearEncoder::project(std::span<const double> x) const {
  if (x.size() != raw_dim()) {
    throw ValidationError("encoder input has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(raw_dim()));
  }
  std::vector<double> u(embed_dim());
  for (std::size_t r = 0; r < embed_dim(); ++r) u[r] = dot(weights_.row(r), x);
  return u;
}

FeatureVector LinearEncoder::encode(std::span<const double> x, std::size_t sample) const {
  auto u = project(x);
  const double n = norm2(u);
  if (!(n > epsilon_) || !std::isfinite(n)) throw DegenerateEmbedding(sample, n);
  for (auto& v : u) v /= n;
  return FeatureVector(std::move(u));
}

void LinearEncoder::accumulate_gradient(std::span<const double> x,
                                        std::span<const double> upstream, Matrix& accum,
                                        std::size_t sample) const {
  if (upstream.size() != embed_dim()) throw ValidationError("upstream has wrong dimension");
  if (accum.rows() != embed_dim() || accum.cols() != raw_dim()) {
    throw ValidationError("gradient accumulator has wrong shape");
  }
  auto u = project(x);
  const double n = norm2(u);
  if (!(n > epsilon_) || !std::isfinite(n)) throw DegenerateEmbedding(sample, n);
  for (auto& v : u) v /= n;
  // dL/du = (I - z z^T) upstream / ||u||
  const double radial = dot(u, upstream);
  for (std::size_t r = 0; r < embed_dim(); ++r) {
    const double du = (upstream[r] - u[r] * radial) / n;
    if (du != 0.0) axpy(du, x, accum.row(r));
  }
}

Matrix LinearEncoder::encode_gradient(std::span<const double> x,
                                      std::span<const double> upstream,
                                      std::size_t sample) const {
  Matrix grad(embed_dim(), raw_dim());
  accumulate_gradient(x, upstream, grad, sample);
  return grad;
}

void LinearEncoder::save(const std::filesystem::path& path, std::uint64_t step) const {
  detail::write_snapshot(path, kEncoderMagic, static_cast<std::uint32_t>(embed_dim()),
                         static_cast<std::uint32_t>(raw_dim()), step, weights_.data());
}

LinearEncoder LinearEncoder::load(const std::filesystem::path& path, std::uint64_t* step) {
  auto snap = detail::read_snapshot(path, kEncoderMagic);
  Matrix w(snap.rows, snap.cols);
  std::copy(snap.values.begin(), snap.values.end(), w.data().begin());
  if (step != nullptr) *step = snap.step;
  return LinearEncoder(std::move(w));
}

}  // namespace gsml

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gsml/feature_store.hpp"
#include "gsml/gsmlp.hpp"

namespace gsml::testing {

inline std::vector<double> random_unit(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(d);
  double n = 0.0;
  do {
    for (auto& x : v) x = normal(rng);
    n = norm2(v);
  } while (n < 1e-6);
  for (auto& x : v) x /= n;
  return v;
}

inline std::vector<FeatureVector> random_features(std::mt19937_64& rng, std::size_t n,
                                                  std::size_t d) {
  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(random_unit(rng, d));
  return out;
}

inline LookupTable random_table(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  return init_table(random_features(rng, n, d));
}

// Planar points at 0, 10, 80 and 90 degrees.
inline LookupTable four_node_table() {
  const double pi = std::acos(-1.0);
  auto at = [&](double deg) {
    const double r = deg * pi / 180.0;
    return FeatureVector({std::cos(r), std::sin(r)});
  };
  std::vector<FeatureVector> f{at(0), at(10), at(80), at(90)};
  return init_table(f);
}

inline MultiLabel random_label(std::mt19937_64& rng, std::size_t n, std::size_t owner,
                               double p_positive) {
  std::bernoulli_distribution coin(p_positive);
  std::vector<std::uint8_t> bits(n, 0);
  for (auto& b : bits) b = coin(rng) ? 1 : 0;
  bits[owner] = 1;
  return MultiLabel(bits, owner);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("gsml_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({1e-8, std::abs(analytic), std::abs(numeric)});
}

}  // namespace gsml::testing

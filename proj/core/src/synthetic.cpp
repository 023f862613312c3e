#include "gsml/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "gsml/csv.hpp"
#include "gsml/error.hpp"

namespace gsml {
namespace {

constexpr std::uint64_t kMixingStream = 0x9E3779B97F4A7C15ULL;

std::vector<double> gaussian_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return v;
}

void normalize_in_place(std::vector<double>& v) {
  const double n = norm2(v);
  if (n > 0.0) {
    for (auto& x : v) x /= n;
  }
}

}  // namespace

void DatasetSpec::validate() const {
  if (n_identities < 1) throw ValidationError("n_identities must be >= 1");
  if (images_per_identity < 1) throw ValidationError("images_per_identity must be >= 1");
  if (n_cameras < 1) throw ValidationError("n_cameras must be >= 1");
  if (embed_dim < 2) throw ValidationError("embed_dim must be >= 2");
  if (raw_dim < embed_dim) throw ValidationError("raw_dim must be >= embed_dim");
  if (!(camera_shift >= 0.0) || !std::isfinite(camera_shift)) {
    throw ValidationError("camera_shift must be a finite value >= 0");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw ValidationError("noise must be a finite value >= 0");
  }
}

std::size_t Dataset::identity_count() const {
  std::set<std::size_t> ids;
  for (const auto& s : samples) ids.insert(s.identity);
  return ids.size();
}

std::size_t Dataset::camera_count() const {
  std::set<std::size_t> cams;
  for (const auto& s : samples) cams.insert(s.camera);
  return cams.size();
}

void Dataset::validate() const {
  if (samples.empty()) throw ValidationError("dataset is empty");
  if (raw_dim == 0) throw ValidationError("dataset raw dimension is zero");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.index != i) throw ValidationError("sample indices must be contiguous from 0");
    if (s.raw.size() != raw_dim) {
      throw ValidationError("sample " + std::to_string(i) + " has the wrong raw dimension");
    }
    if (!all_finite(s.raw)) {
      throw ValidationError("sample " + std::to_string(i) + " has non-finite values");
    }
  }
}

Matrix mixing_matrix(std::size_t raw_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ kMixingStream);
  // Random orthogonal basis by Gram-Schmidt on Gaussian vectors, then
  // log-spaced column scales spanning the condition number.
  Matrix q(raw_dim, raw_dim);
  for (std::size_t c = 0; c < raw_dim; ++c) {
    std::vector<double> v;
    double n = 0.0;
    do {
      v = gaussian_vector(rng, raw_dim);
      for (std::size_t prev = 0; prev < c; ++prev) {
        double proj = 0.0;
        for (std::size_t r = 0; r < raw_dim; ++r) proj += v[r] * q(r, prev);
        for (std::size_t r = 0; r < raw_dim; ++r) v[r] -= proj * q(r, prev);
      }
      n = norm2(v);
    } while (n < 1e-8);
    for (std::size_t r = 0; r < raw_dim; ++r) q(r, c) = v[r] / n;
  }
  const double log_kappa = std::log(kMixingConditionNumber);
  for (std::size_t c = 0; c < raw_dim; ++c) {
    const double frac = raw_dim > 1 ? static_cast<double>(c) / static_cast<double>(raw_dim - 1)
                                    : 0.0;
    const double scale = std::exp(log_kappa * (0.5 - frac));
    for (std::size_t r = 0; r < raw_dim; ++r) q(r, c) *= scale;
  }
  return q;
}

Dataset generate(const DatasetSpec& spec) {
  spec.validate();
  const std::size_t p = spec.raw_dim;
  std::mt19937_64 rng(spec.seed);

  std::vector<std::vector<double>> prototypes(spec.n_identities);
  for (auto& proto : prototypes) {
    proto = gaussian_vector(rng, p);
    normalize_in_place(proto);
  }
  // offsets[id][cam], each of norm camera_shift in a uniformly random direction
  std::vector<std::vector<std::vector<double>>> offsets(spec.n_identities);
  for (auto& per_camera : offsets) {
    per_camera.resize(spec.n_cameras);
    for (auto& off : per_camera) {
      off = gaussian_vector(rng, p);
      normalize_in_place(off);
      for (auto& v : off) v *= spec.camera_shift;
    }
  }

  Matrix mix;
  if (spec.mixing) mix = mixing_matrix(p, spec.seed);

  Dataset data;
  data.raw_dim = p;
  data.samples.reserve(spec.n_identities * spec.images_per_identity);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t id = 0; id < spec.n_identities; ++id) {
    for (std::size_t k = 0; k < spec.images_per_identity; ++k) {
      const std::size_t cam = k % spec.n_cameras;
      std::vector<double> x(p);
      for (std::size_t r = 0; r < p; ++r) {
        x[r] = prototypes[id][r] + offsets[id][cam][r] + spec.noise * normal(rng);
      }
      normalize_in_place(x);
      if (spec.mixing) {
        std::vector<double> y(p);
        for (std::size_t r = 0; r < p; ++r) y[r] = dot(mix.row(r), x);
        x = std::move(y);
      }
      Sample s;
      s.index = data.samples.size();
      s.identity = id;
      s.camera = cam;
      s.raw = std::move(x);
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
  dataset.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "index,identity,camera";
  for (std::size_t r = 0; r < dataset.raw_dim; ++r) out << ",x" << r;
  out << '\n';
  for (const auto& s : dataset.samples) {
    out << s.index << ',' << s.identity << ',' << s.camera;
    for (double v : s.raw) out << ',' << csv::format_double(v);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!csv::read_line(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = csv::split(line);
  if (header.size() < 4 || header[0] != "index" || header[1] != "identity" ||
      header[2] != "camera") {
    throw IoError(path.string() + ": expected header \"index,identity,camera,x0,...\"");
  }
  Dataset data;
  data.raw_dim = header.size() - 3;
  for (std::size_t r = 0; r < data.raw_dim; ++r) {
    if (header[3 + r] != "x" + std::to_string(r)) {
      throw IoError(path.string() + ": raw columns must be named x0..x{p-1}");
    }
  }
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != header.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " fields");
    }
    Sample s;
    s.index = csv::parse_index(fields[0]);
    s.identity = csv::parse_index(fields[1]);
    s.camera = csv::parse_index(fields[2]);
    s.raw.resize(data.raw_dim);
    for (std::size_t r = 0; r < data.raw_dim; ++r) s.raw[r] = csv::parse_double(fields[3 + r]);
    data.samples.push_back(std::move(s));
  }
  data.validate();
  return data;
}

}  // namespace gsml

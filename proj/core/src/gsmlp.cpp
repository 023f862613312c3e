#include "gsml/gsmlp.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>

#include "gsml/csv.hpp"
#include "gsml/error.hpp"

namespace gsml {
namespace {

void check_index(std::size_t i, std::size_t n) {
  if (i >= n) {
    throw ValidationError("index " + std::to_string(i) + " out of range for n = " +
                          std::to_string(n));
  }
}

// First `k` entries of the neighbour ranking of i. Self leads, then written
// rows by (squared distance, index), then unwritten rows by index.
CandidateSet ranking_prefix(const SoftAdjacency& adj, std::size_t i, std::size_t k) {
  const std::size_t n = adj.size();
  struct Key {
    std::uint8_t group;
    double dist;
    std::size_t index;
  };
  std::vector<Key> keys;
  keys.reserve(n);
  const auto a_i = adj.matrix.row(i);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      keys.push_back({0, 0.0, j});
    } else if (adj.written[j]) {
      keys.push_back({1, squared_distance(a_i, adj.matrix.row(j)), j});
    } else {
      keys.push_back({2, 0.0, j});
    }
  }
  auto less = [](const Key& a, const Key& b) {
    if (a.group != b.group) return a.group < b.group;
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.index < b.index;
  };
  k = std::min(k, n);
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(), less);
  CandidateSet out(k);
  for (std::size_t r = 0; r < k; ++r) out[r] = keys[r].index;
  return out;
}

}  // namespace

MultiLabel::MultiLabel(std::size_t n, std::size_t owner) : bits_(n, 0), owner_(owner) {
  check_index(owner, n);
  bits_[owner] = 1;
}

MultiLabel::MultiLabel(std::vector<std::uint8_t> bits, std::size_t owner)
    : bits_(std::move(bits)), owner_(owner) {
  check_index(owner, bits_.size());
  if (!bits_[owner]) throw ValidationError("multi-label must mark its owner as positive");
  for (auto& b : bits_) b = b ? 1 : 0;
}

MultiLabel MultiLabel::from_positives(std::size_t n, std::size_t owner,
                                      std::span<const std::size_t> positives) {
  MultiLabel label(n, owner);
  for (std::size_t j : positives) {
    check_index(j, n);
    label.bits_[j] = 1;
  }
  return label;
}

CandidateSet MultiLabel::positives() const {
  CandidateSet out;
  for (std::size_t j = 0; j < bits_.size(); ++j) {
    if (bits_[j]) out.push_back(j);
  }
  return out;
}

std::size_t MultiLabel::positive_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

Predictor parse_predictor(std::string_view name) {
  if (name == "gsmlp") return Predictor::kGsmlp;
  if (name == "pss") return Predictor::kPss;
  if (name == "knn") return Predictor::kKnn;
  throw ValidationError("unknown predictor \"" + std::string(name) + "\" (gsmlp|pss|knn)");
}

std::string_view to_string(Predictor p) noexcept {
  switch (p) {
    case Predictor::kGsmlp: return "gsmlp";
    case Predictor::kPss: return "pss";
    case Predictor::kKnn: return "knn";
  }
  return "?";
}

void validate_tau(double tau) {
  if (!(tau > -1.0 && tau <= 1.0)) {
    throw ValidationError("tau must lie in (-1, 1], got " + std::to_string(tau));
  }
}

SoftAdjacency build_adjacency(const LookupTable& table, double tau) {
  validate_tau(tau);
  const std::size_t n = table.size();
  SoftAdjacency adj;
  adj.matrix = Matrix(n, n);
  adj.tau = tau;
  adj.written.resize(n);
  for (std::size_t i = 0; i < n; ++i) adj.written[i] = table.written(i) ? 1 : 0;
  adj.unwritten_rows = table.unwritten_count();

  for (std::size_t i = 0; i < n; ++i) {
    adj.matrix(i, i) = 1.0;
    if (!adj.written[i]) continue;
    const auto m_i = table.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!adj.written[j]) continue;
      const double s = dot(m_i, table.row(j));
      const double v = s < tau ? 0.0 : s;
      adj.matrix(i, j) = v;
      adj.matrix(j, i) = v;
    }
  }
  return adj;
}

CandidateSet positive_candidates(const SoftAdjacency& adj, std::size_t i) {
  check_index(i, adj.size());
  CandidateSet out;
  const auto a_i = adj.matrix.row(i);
  for (std::size_t j = 0; j < a_i.size(); ++j) {
    if (a_i[j] != 0.0 || j == i) out.push_back(j);
  }
  return out;
}

CandidateSet neighbour_ranking(const SoftAdjacency& adj, std::size_t i) {
  check_index(i, adj.size());
  return ranking_prefix(adj, i, adj.size());
}

MultiLabel predict_multilabel(const SoftAdjacency& adj, std::size_t i) {
  const CandidateSet pos = positive_candidates(adj, i);
  const CandidateSet top = ranking_prefix(adj, i, pos.size());
  std::vector<std::uint8_t> in_top(adj.size(), 0);
  for (std::size_t j : top) in_top[j] = 1;
  std::vector<std::size_t> both;
  for (std::size_t j : pos) {
    if (in_top[j]) both.push_back(j);
  }
  return MultiLabel::from_positives(adj.size(), i, both);
}

MultiLabel pss_predict(const SoftAdjacency& adj, std::size_t i) {
  const CandidateSet pos = positive_candidates(adj, i);
  return MultiLabel::from_positives(adj.size(), i, pos);
}

MultiLabel knn_predict(const LookupTable& table, std::size_t i, std::size_t c) {
  const std::size_t n = table.size();
  check_index(i, n);
  if (c < 1 || c > n - 1) {
    throw ValidationError("knn: c must lie in [1, n-1], got " + std::to_string(c));
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(n);
  const auto m_i = table.row(i);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i || !table.written(j)) continue;
    scored.emplace_back(dot(m_i, table.row(j)), j);
  }
  const std::size_t take = std::min(c, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  std::vector<std::size_t> picked;
  for (std::size_t r = 0; r < take; ++r) picked.push_back(scored[r].second);
  return MultiLabel::from_positives(n, i, picked);
}

std::vector<MultiLabel> predict_all(const LookupTable& table, const PredictorParams& params) {
  std::vector<MultiLabel> labels;
  labels.reserve(table.size());
  if (params.predictor == Predictor::kKnn) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      labels.push_back(knn_predict(table, i, params.knn_c));
    }
    return labels;
  }
  const SoftAdjacency adj = build_adjacency(table, params.tau);
  for (std::size_t i = 0; i < table.size(); ++i) {
    labels.push_back(params.predictor == Predictor::kGsmlp ? predict_multilabel(adj, i)
                                                           : pss_predict(adj, i));
  }
  return labels;
}

void write_labels_csv(const std::filesystem::path& path, std::span<const MultiLabel> labels) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "index,positives\n";
  for (const auto& label : labels) {
    out << label.owner() << ',';
    bool first = true;
    for (std::size_t j : label.positives()) {
      if (!first) out << ';';
      out << j;
      first = false;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<MultiLabel> read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!csv::read_line(in, line) || csv::split(line) != std::vector<std::string_view>{"index", "positives"}) {
    throw IoError(path.string() + ": expected header \"index,positives\"");
  }
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> rows;
  while (csv::read_line(in, line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 2) throw IoError(path.string() + ": malformed row \"" + line + "\"");
    std::vector<std::size_t> pos;
    for (auto f : csv::split(fields[1], ';')) pos.push_back(csv::parse_index(f));
    rows.emplace_back(csv::parse_index(fields[0]), std::move(pos));
  }
  std::vector<MultiLabel> labels;
  labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].first != r) throw IoError(path.string() + ": indices must be contiguous from 0");
    for (std::size_t j : rows[r].second) {
      if (j >= rows.size()) throw IoError(path.string() + ": positive index out of range");
    }
    labels.push_back(MultiLabel::from_positives(rows.size(), r, rows[r].second));
  }
  return labels;
}

}  // namespace gsml

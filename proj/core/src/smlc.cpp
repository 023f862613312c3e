#include "gsml/smlc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gsml/error.hpp"

namespace gsml {
namespace {

void check_lengths(std::span<const double> s, const MultiLabel& label,
                   std::span<const std::uint8_t> eligible) {
  if (s.size() != label.size()) throw ValidationError("similarity and label lengths differ");
  if (!eligible.empty() && eligible.size() != s.size()) {
    throw ValidationError("eligibility mask length differs from similarity length");
  }
  if (!all_finite(s)) throw ValidationError("similarity vector has non-finite entries");
}

bool is_eligible(std::span<const std::uint8_t> eligible, std::size_t j) {
  return eligible.empty() || eligible[j] != 0;
}

std::vector<std::size_t> positive_terms(const MultiLabel& label, const SmlcConfig& config,
                                        std::span<const std::uint8_t> eligible) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < label.size(); ++j) {
    if (!label[j] || !is_eligible(eligible, j)) continue;
    if (config.exclude_self && j == label.owner()) continue;
    out.push_back(j);
  }
  return out;
}

std::span<const std::uint8_t> written_mask(const LookupTable& table,
                                           std::vector<std::uint8_t>& storage) {
  if (table.unwritten_count() == 0) return {};
  storage.resize(table.size());
  for (std::size_t j = 0; j < table.size(); ++j) storage[j] = table.written(j) ? 1 : 0;
  return storage;
}

}  // namespace

void validate_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ValidationError("gamma must lie in (0, 1], got " + std::to_string(gamma));
  }
}

std::size_t hard_negative_count(double gamma, std::size_t negatives) {
  if (negatives == 0) return 0;
  const double raw = gamma * static_cast<double>(negatives);
  // gamma = 0.1 and 30 negatives gives 3.0000000000000004 in floating point.
  auto count = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::size_t>(count, 1, negatives);
}

CandidateSet hard_negatives(std::span<const double> s, const MultiLabel& label, double gamma,
                            std::span<const std::uint8_t> eligible) {
  validate_gamma(gamma);
  check_lengths(s, label, eligible);
  CandidateSet negatives;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!label[j] && is_eligible(eligible, j)) negatives.push_back(j);
  }
  const std::size_t take = hard_negative_count(gamma, negatives.size());
  std::partial_sort(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(take),
                    negatives.end(), [&](std::size_t a, std::size_t b) {
                      if (s[a] != s[b]) return s[a] > s[b];
                      return a < b;
                    });
  negatives.resize(take);
  return negatives;
}

LossBreakdown smlc_loss(std::span<const double> s, const MultiLabel& label,
                        const SmlcConfig& config, std::span<const std::uint8_t> eligible) {
  LossBreakdown out;
  out.hard_negative_indices = hard_negatives(s, label, config.gamma, eligible);
  const auto positives = positive_terms(label, config, eligible);
  if (!positives.empty()) {
    double acc = 0.0;
    for (std::size_t j : positives) acc += (s[j] - 1.0) * (s[j] - 1.0);
    out.positive_part = acc / static_cast<double>(positives.size());
  }
  if (!out.hard_negative_indices.empty()) {
    double acc = 0.0;
    for (std::size_t k : out.hard_negative_indices) acc += (s[k] + 1.0) * (s[k] + 1.0);
    out.negative_part = acc / static_cast<double>(out.hard_negative_indices.size());
  }
  out.total = out.positive_part + out.negative_part;
  return out;
}

LossAndGradient smlc_loss_and_gradient(std::span<const double> z, const LookupTable& table,
                                       const MultiLabel& label, const SmlcConfig& config) {
  if (label.size() != table.size()) throw ValidationError("label length differs from table size");
  std::vector<std::uint8_t> storage;
  const auto eligible = written_mask(table, storage);
  const SimilarityVector s = similarity_row(table, z);

  LossAndGradient out;
  out.loss = smlc_loss(s, label, config, eligible);
  out.grad.assign(table.dim(), 0.0);

  const auto positives = positive_terms(label, config, eligible);
  if (!positives.empty()) {
    const double scale = 2.0 / static_cast<double>(positives.size());
    for (std::size_t j : positives) axpy(scale * (s[j] - 1.0), table.row(j), out.grad);
  }
  const auto& mined = out.loss.hard_negative_indices;
  if (!mined.empty()) {
    const double scale = 2.0 / static_cast<double>(mined.size());
    for (std::size_t k : mined) axpy(scale * (s[k] + 1.0), table.row(k), out.grad);
  }
  return out;
}

std::vector<double> smlc_gradient(std::span<const double> z, const LookupTable& table,
                                  const MultiLabel& label, double gamma) {
  return smlc_loss_and_gradient(z, table, label, SmlcConfig{gamma, false}).grad;
}

namespace {

// Softmax of s / T, max-subtracted; returns log of the partition sum too.
std::vector<double> softmax(std::span<const double> s, double temperature, double& log_z) {
  const double peak = *std::max_element(s.begin(), s.end()) / temperature;
  std::vector<double> p(s.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    p[k] = std::exp(s[k] / temperature - peak);
    sum += p[k];
  }
  for (auto& v : p) v /= sum;
  log_z = peak + std::log(sum);
  return p;
}

}  // namespace

double ce_baseline_loss(std::span<const double> s, const MultiLabel& label, double temperature) {
  if (!(temperature > 0.0)) throw ValidationError("temperature must be > 0");
  check_lengths(s, label, {});
  double log_z = 0.0;
  softmax(s, temperature, log_z);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!label[j]) continue;
    acc += log_z - s[j] / temperature;
    ++count;
  }
  return acc / static_cast<double>(count);
}

LossAndGradient ce_loss_and_gradient(std::span<const double> z, const LookupTable& table,
                                     const MultiLabel& label, double temperature) {
  if (label.size() != table.size()) throw ValidationError("label length differs from table size");
  const SimilarityVector s = similarity_row(table, z);
  LossAndGradient out;
  out.loss.total = ce_baseline_loss(s, label, temperature);
  out.loss.positive_part = out.loss.total;
  double log_z = 0.0;
  const auto p = softmax(s, temperature, log_z);
  const double inv_pos = 1.0 / static_cast<double>(label.positive_count());
  out.grad.assign(table.dim(), 0.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double ds = (p[k] - (label[k] ? inv_pos : 0.0)) / temperature;
    if (ds != 0.0) axpy(ds, table.row(k), out.grad);
  }
  return out;
}

}  // namespace gsml

#include "gsml/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

#include "gsml/encoder.hpp"
#include "gsml/error.hpp"

namespace gsml {

RetrievalProtocol standard_protocol(const Dataset& dataset) {
  RetrievalProtocol protocol;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> first;
  for (const auto& s : dataset.samples) first.try_emplace({s.identity, s.camera}, s.index);
  for (const auto& [key, index] : first) protocol.queries.push_back(index);
  std::sort(protocol.queries.begin(), protocol.queries.end());
  protocol.gallery.resize(dataset.size());
  std::iota(protocol.gallery.begin(), protocol.gallery.end(), std::size_t{0});
  return protocol;
}

std::vector<std::size_t> rank_gallery(std::span<const double> query,
                                      std::span<const FeatureVector> gallery) {
  if (gallery.empty()) throw ValidationError("rank_gallery: empty gallery");
  std::vector<double> score(gallery.size());
  for (std::size_t g = 0; g < gallery.size(); ++g) {
    if (gallery[g].dim() != query.size()) throw ValidationError("rank_gallery: dimension mismatch");
    score[g] = dot(query, gallery[g].values());
  }
  std::vector<std::size_t> order(gallery.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
  return order;
}

double RetrievalReport::rank(std::size_t k) const {
  if (cmc.empty() || k == 0) return 0.0;
  return cmc[std::min(k, cmc.size()) - 1];
}

RetrievalReport cmc_map(const Dataset& dataset, std::span<const FeatureVector> features,
                        const RetrievalProtocol& protocol) {
  if (features.size() != dataset.size()) {
    throw ValidationError("cmc_map: need one feature per dataset sample");
  }
  RetrievalReport report;
  std::vector<FeatureVector> gallery_features;
  gallery_features.reserve(protocol.gallery.size());
  for (std::size_t g : protocol.gallery) {
    if (g >= dataset.size()) throw ValidationError("cmc_map: gallery index out of range");
    gallery_features.push_back(features[g]);
  }
  std::vector<double> hits_at(protocol.gallery.size(), 0.0);
  double ap_sum = 0.0;

  for (std::size_t q : protocol.queries) {
    if (q >= dataset.size()) throw ValidationError("cmc_map: query index out of range");
    const auto& query = dataset.samples[q];
    const auto order = rank_gallery(features[q].values(), gallery_features);

    std::size_t rank = 0;
    std::size_t relevant = 0;
    std::size_t first_hit = 0;
    double precision_sum = 0.0;
    for (std::size_t pos : order) {
      const auto& g = dataset.samples[protocol.gallery[pos]];
      if (g.identity == query.identity && g.camera == query.camera) continue;
      ++rank;
      if (g.identity != query.identity) continue;
      ++relevant;
      if (relevant == 1) first_hit = rank;
      precision_sum += static_cast<double>(relevant) / static_cast<double>(rank);
    }
    if (relevant == 0) {
      ++report.skipped;
      continue;
    }
    ++report.evaluated;
    hits_at[first_hit - 1] += 1.0;
    ap_sum += precision_sum / static_cast<double>(relevant);
  }

  report.cmc.assign(protocol.gallery.size(), 0.0);
  if (report.evaluated > 0) {
    double running = 0.0;
    for (std::size_t k = 0; k < hits_at.size(); ++k) {
      running += hits_at[k];
      report.cmc[k] = running / static_cast<double>(report.evaluated);
    }
    report.map = ap_sum / static_cast<double>(report.evaluated);
  }
  return report;
}

LabelQualityReport label_quality(std::span<const MultiLabel> predicted, const Dataset& dataset) {
  if (predicted.size() != dataset.size()) {
    throw ValidationError("label_quality: need one label per sample");
  }
  std::map<std::size_t, std::size_t> identity_size;
  for (const auto& s : dataset.samples) ++identity_size[s.identity];

  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto& label = predicted[i];
    if (label.size() != dataset.size()) throw ValidationError("label_quality: label length");
    const std::size_t id = dataset.samples[i].identity;
    std::size_t hit = 0;
    for (std::size_t j = 0; j < label.size(); ++j) {
      if (!label[j]) continue;
      ++positives;
      if (j == i) continue;
      if (dataset.samples[j].identity == id) {
        ++hit;
      } else {
        ++fp;
      }
    }
    tp += hit;
    fn += identity_size[id] - 1 - hit;
  }
  LabelQualityReport report;
  report.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  report.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  report.mean_positives = static_cast<double>(positives) / static_cast<double>(predicted.size());
  return report;
}

std::vector<FeatureVector> encode_dataset(const LinearEncoder& encoder, const Dataset& dataset) {
  std::vector<FeatureVector> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples) out.push_back(encoder.encode(s.raw, s.index));
  return out;
}

std::vector<FeatureVector> normalized_raw(const Dataset& dataset) {
  std::vector<FeatureVector> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples) out.push_back(FeatureVector::normalized(s.raw));
  return out;
}

}  // namespace gsml

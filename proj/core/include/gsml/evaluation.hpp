#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gsml/feature_store.hpp"
#include "gsml/gsmlp.hpp"
#include "gsml/synthetic.hpp"

namespace gsml {

class LinearEncoder;

/// Query/gallery split over one dataset. Gallery entries sharing both identity
/// and camera with a query are dropped from that query's ranking.
struct RetrievalProtocol {
  std::vector<std::size_t> queries;
  std::vector<std::size_t> gallery;
};

/// First sample of every (identity, camera) pair queries the full dataset.
RetrievalProtocol standard_protocol(const Dataset& dataset);

/// Gallery positions sorted by descending cosine similarity, ties by position.
std::vector<std::size_t> rank_gallery(std::span<const double> query,
                                      std::span<const FeatureVector> gallery);

struct RetrievalReport {
  /// cmc[k-1] = fraction of evaluated queries with a correct match in the top k.
  std::vector<double> cmc;
  double map = 0.0;
  std::size_t evaluated = 0;
  /// Queries with no same-identity gallery entry left after exclusion.
  std::size_t skipped = 0;

  double rank(std::size_t k) const;
};

/// `features[i]` is the embedding of dataset sample i.
RetrievalReport cmc_map(const Dataset& dataset, std::span<const FeatureVector> features,
                        const RetrievalProtocol& protocol);

struct LabelQualityReport {
  double precision = 1.0;
  double recall = 0.0;
  double mean_positives = 1.0;
};

/// Pairwise precision/recall with self excluded from both sides; an empty
/// prediction set counts as precision 1.
LabelQualityReport label_quality(std::span<const MultiLabel> predicted, const Dataset& dataset);

std::vector<FeatureVector> encode_dataset(const LinearEncoder& encoder, const Dataset& dataset);

/// Raw vectors normalized to unit length.
std::vector<FeatureVector> normalized_raw(const Dataset& dataset);

}  // namespace gsml

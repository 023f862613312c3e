#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gsml/encoder.hpp"
#include "gsml/feature_store.hpp"
#include "gsml/gsmlp.hpp"
#include "gsml/synthetic.hpp"

namespace gsml {

enum class LossKind { kSmlc, kCrossEntropy };

LossKind parse_loss(std::string_view name);
std::string_view to_string(LossKind loss) noexcept;

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t batch_size = 128;
  double lr = 0.01;
  std::size_t lr_decay_every = 10;
  double lr_decay_factor = 0.1;
  double momentum = 0.9;
  std::size_t warmup_epochs = 5;
  std::size_t reinit_every = 5;
  double tau = 0.6;
  double gamma = 0.01;
  std::uint64_t seed = 0;

  std::size_t embed_dim = 32;
  LossKind loss = LossKind::kSmlc;
  Predictor predictor = Predictor::kGsmlp;
  std::size_t knn_c = 4;
  double ce_temperature = 0.1;
  /// Multi-labels are rebuilt at the start of every Nth epoch after warm-up.
  std::size_t refresh_every = 1;
  bool exclude_self_positive = false;

  void validate() const;
};

/// Learning rate in effect during `epoch` (0-based): step decay.
double learning_rate_at(const TrainConfig& config, std::size_t epoch);

struct EpochMetrics {
  std::size_t epoch = 0;  ///< 1-based
  double mean_loss = 0.0;
  double label_precision = 1.0;
  double label_recall = 0.0;
  double positives_per_sample = 1.0;
  double rank1 = 0.0;
  double rank5 = 0.0;
  double rank10 = 0.0;
  double map = 0.0;
  double lr = 0.0;

  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

using MetricsHistory = std::vector<EpochMetrics>;

struct TrainResult {
  LinearEncoder encoder;
  MetricsHistory history;
  LookupTable table;
  std::uint64_t steps = 0;
  /// Antipodal table updates skipped over the whole run.
  std::size_t degenerate_updates = 0;
};

/// Called after every epoch; used by the CLI for progress output.
using EpochCallback = std::function<void(const EpochMetrics&)>;

TrainResult train(const TrainConfig& config, const Dataset& dataset,
                  const EpochCallback& on_epoch = {});

/// Same as train() but starting from a given encoder instead of a random one.
TrainResult train_from(const TrainConfig& config, const Dataset& dataset, LinearEncoder encoder,
                       const EpochCallback& on_epoch = {});

/// Header `epoch,mean_loss,label_precision,label_recall,positives_per_sample,rank1,rank5,rank10,map,lr`.
std::string_view metrics_header() noexcept;
void write_metrics_row(std::ostream& out, const EpochMetrics& m);
void write_metrics_csv(const std::filesystem::path& path, std::span<const EpochMetrics> history);

}  // namespace gsml

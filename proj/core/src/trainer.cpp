#include "gsml/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "gsml/csv.hpp"
#include "gsml/error.hpp"
#include "gsml/evaluation.hpp"
#include "gsml/smlc.hpp"

namespace gsml {
namespace {

constexpr std::uint64_t kShuffleStream = 0xD1B54A32D192ED03ULL;

void require_count(std::size_t value, const char* name) {
  if (value < 1) throw ValidationError(std::string(name) + " must be >= 1");
}

void require_factor(double value, const char* name) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw ValidationError(std::string(name) + " must lie in (0, 1], got " + std::to_string(value));
  }
}

}  // namespace

LossKind parse_loss(std::string_view name) {
  if (name == "smlc") return LossKind::kSmlc;
  if (name == "ce") return LossKind::kCrossEntropy;
  throw ValidationError("unknown loss \"" + std::string(name) + "\" (smlc|ce)");
}

std::string_view to_string(LossKind loss) noexcept {
  return loss == LossKind::kSmlc ? "smlc" : "ce";
}

void TrainConfig::validate() const {
  require_count(epochs, "epochs");
  require_count(batch_size, "batch_size");
  require_count(lr_decay_every, "lr_decay_every");
  require_count(warmup_epochs, "warmup_epochs");
  require_count(reinit_every, "reinit_every");
  require_count(refresh_every, "refresh_every");
  require_count(knn_c, "knn_c");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("lr must be > 0");
  require_factor(lr_decay_factor, "lr_decay_factor");
  require_factor(momentum, "momentum");
  validate_tau(tau);
  validate_gamma(gamma);
  if (embed_dim < 2) throw ValidationError("embed_dim must be >= 2");
  if (!(ce_temperature > 0.0)) throw ValidationError("ce_temperature must be > 0");
}

double learning_rate_at(const TrainConfig& config, std::size_t epoch) {
  const auto decays = static_cast<double>(epoch / config.lr_decay_every);
  return config.lr * std::pow(config.lr_decay_factor, decays);
}

TrainResult train(const TrainConfig& config, const Dataset& dataset,
                  const EpochCallback& on_epoch) {
  config.validate();
  dataset.validate();
  return train_from(config, dataset,
                    LinearEncoder::random(config.embed_dim, dataset.raw_dim, config.seed),
                    on_epoch);
}

TrainResult train_from(const TrainConfig& config, const Dataset& dataset, LinearEncoder encoder,
                       const EpochCallback& on_epoch) {
  config.validate();
  dataset.validate();
  if (encoder.raw_dim() != dataset.raw_dim || encoder.embed_dim() != config.embed_dim) {
    throw ValidationError("encoder shape does not match dataset/config dimensions");
  }
  const std::size_t n = dataset.size();
  if (config.predictor == Predictor::kKnn && n > 1 && config.knn_c > n - 1) {
    throw ValidationError("knn_c must be <= n - 1");
  }

  std::mt19937_64 rng(config.seed ^ kShuffleStream);
  const RetrievalProtocol protocol = standard_protocol(dataset);
  const PredictorParams predictor{config.predictor, config.tau, config.knn_c};
  const SmlcConfig smlc{config.gamma, config.exclude_self_positive};

  LookupTable table = init_table(encode_dataset(encoder, dataset));
  Matrix velocity(encoder.embed_dim(), encoder.raw_dim());
  Matrix grad(encoder.embed_dim(), encoder.raw_dim());

  std::vector<MultiLabel> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.emplace_back(n, i);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{encoder, {}, table, 0, 0};
  std::uint64_t steps = 0;
  std::size_t degenerate = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = learning_rate_at(config, epoch);
    if (epoch > 0 && epoch % config.reinit_every == 0) {
      table.reinitialize(encode_dataset(encoder, dataset));
    }
    if (epoch >= config.warmup_epochs &&
        (epoch - config.warmup_epochs) % config.refresh_every == 0) {
      labels = predict_all(table, predictor);
    }
    const LabelQualityReport quality = label_quality(labels, dataset);

    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      grad.fill(0.0);
      std::vector<FeatureVector> batch_features;
      batch_features.reserve(stop - start);
      double batch_loss = 0.0;
      // Loss targets come from the table as it stood before this batch.
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t i = order[b];
        const auto& x = dataset.samples[i].raw;
        FeatureVector z = encoder.encode(x, i);
        const LossAndGradient lg =
            config.loss == LossKind::kSmlc
                ? smlc_loss_and_gradient(z.values(), table, labels[i], smlc)
                : ce_loss_and_gradient(z.values(), table, labels[i], config.ce_temperature);
        batch_loss += lg.loss.total;
        encoder.accumulate_gradient(x, lg.grad, grad, i);
        batch_features.push_back(std::move(z));
      }
      if (!std::isfinite(batch_loss) || !all_finite(grad.data())) {
        throw TrainingAborted("non-finite loss or gradient", epoch + 1, batch_index);
      }
      loss_sum += batch_loss;

      auto w = encoder.weights().data();
      auto v = velocity.data();
      const auto g = grad.data();
      // Batch gradient is the mean over samples, so lr is independent of batch size.
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = config.momentum * v[k] - lr * scale * g[k];
        w[k] += v[k];
      }
      ++steps;

      for (std::size_t b = start; b < stop; ++b) {
        if (table.update_row(order[b], batch_features[b - start]) == UpdateStatus::kDegenerate) {
          ++degenerate;
        }
      }
      table.advance_step();
    }

    const RetrievalReport retrieval = cmc_map(dataset, encode_dataset(encoder, dataset), protocol);
    EpochMetrics m;
    m.epoch = epoch + 1;
    m.mean_loss = loss_sum / static_cast<double>(n);
    m.label_precision = quality.precision;
    m.label_recall = quality.recall;
    m.positives_per_sample = quality.mean_positives;
    m.rank1 = retrieval.rank(1);
    m.rank5 = retrieval.rank(5);
    m.rank10 = retrieval.rank(10);
    m.map = retrieval.map;
    m.lr = lr;
    result.history.push_back(m);
    if (on_epoch) on_epoch(m);
  }

  result.encoder = std::move(encoder);
  result.table = std::move(table);
  result.steps = steps;
  result.degenerate_updates = degenerate;
  return result;
}

std::string_view metrics_header() noexcept {
  return "epoch,mean_loss,label_precision,label_recall,positives_per_sample,rank1,rank5,rank10,"
         "map,lr";
}

void write_metrics_row(std::ostream& out, const EpochMetrics& m) {
  out << m.epoch << ',' << csv::format_double(m.mean_loss) << ','
      << csv::format_double(m.label_precision) << ',' << csv::format_double(m.label_recall)
      << ',' << csv::format_double(m.positives_per_sample) << ',' << csv::format_double(m.rank1)
      << ',' << csv::format_double(m.rank5) << ',' << csv::format_double(m.rank10) << ','
      << csv::format_double(m.map) << ',' << csv::format_double(m.lr) << '\n';
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const EpochMetrics> history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << metrics_header() << '\n';
  for (const auto& m : history) write_metrics_row(out, m);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace gsml

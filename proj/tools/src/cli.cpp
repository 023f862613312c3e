#include "gsml_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gsml/csv.hpp"
#include "gsml/encoder.hpp"
#include "gsml/error.hpp"
#include "gsml/evaluation.hpp"
#include "gsml/gsmlp.hpp"
#include "gsml/smlc.hpp"
#include "gsml/synthetic.hpp"
#include "gsml/trainer.hpp"

namespace gsml::cli {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  DatasetSpec dataset;
  TrainConfig train;
  std::vector<std::size_t> ranks{1, 5, 10};
  fs::path out_dir = "out";
  std::optional<fs::path> data_path;
  std::optional<fs::path> encoder_path;
  std::string predictor = "gsmlp";
  std::string loss = "smlc";
  std::string sweep_param;
  std::vector<double> sweep_values;
  bool quiet = false;
};

void add_run_options(CLI::App& app, RunConfig& rc) {
  auto& ds = rc.dataset;
  auto& tc = rc.train;
  app.add_option("--seed", ds.seed, "Seed for data generation, init and shuffling")->capture_default_str();
  app.add_option("--ids", ds.n_identities, "Number of identities")->capture_default_str();
  app.add_option("--per-id", ds.images_per_identity, "Images per identity")->capture_default_str();
  app.add_option("--cameras", ds.n_cameras, "Number of cameras")->capture_default_str();
  app.add_option("--raw-dim", ds.raw_dim, "Raw input dimension p")->capture_default_str();
  app.add_option("--embed-dim", ds.embed_dim, "Embedding dimension d")->capture_default_str();
  app.add_option("--camera-shift", ds.camera_shift, "Norm of per-(identity, camera) offsets")
      ->capture_default_str();
  app.add_option("--noise", ds.noise, "Per-coordinate sample noise")->capture_default_str();
  app.add_option("--mixing", ds.mixing, "Apply the fixed linear distortion (true/false)")
      ->capture_default_str();
  app.add_option("--data", rc.data_path, "Read the dataset CSV instead of generating one");

  app.add_option("--epochs", tc.epochs)->capture_default_str();
  app.add_option("--batch", tc.batch_size)->capture_default_str();
  app.add_option("--lr", tc.lr)->capture_default_str();
  app.add_option("--lr-decay-every", tc.lr_decay_every)->capture_default_str();
  app.add_option("--lr-decay-factor", tc.lr_decay_factor)->capture_default_str();
  app.add_option("--momentum", tc.momentum)->capture_default_str();
  app.add_option("--warmup", tc.warmup_epochs, "Epochs trained on single-class labels")
      ->capture_default_str();
  app.add_option("--reinit-every", tc.reinit_every, "Table reinitialization period in epochs")
      ->capture_default_str();
  app.add_option("--refresh-every", tc.refresh_every, "Label refresh period in epochs")
      ->capture_default_str();
  app.add_option("--tau", tc.tau, "Adjacency threshold")->capture_default_str();
  app.add_option("--gamma", tc.gamma, "Hard-negative fraction")->capture_default_str();
  app.add_option("--knn-c", tc.knn_c, "Neighbours for the knn predictor")->capture_default_str();
  app.add_option("--ce-temperature", tc.ce_temperature)->capture_default_str();
  app.add_flag("--exclude-self", tc.exclude_self_positive, "Drop s_ii from the positive term");
  app.add_option("--predictor", rc.predictor, "gsmlp|pss|knn")->capture_default_str();
  app.add_option("--loss", rc.loss, "smlc|ce")->capture_default_str();
  app.add_option("--ranks", rc.ranks, "CMC ranks to report")->delimiter(',')->capture_default_str();
  app.add_option("--out", rc.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--quiet", rc.quiet, "Suppress per-epoch progress");
}

// Everything that can be checked without touching the file system.
void validate(RunConfig& rc) {
  rc.train.predictor = parse_predictor(rc.predictor);
  rc.train.loss = parse_loss(rc.loss);
  rc.train.seed = rc.dataset.seed;
  rc.train.embed_dim = rc.dataset.embed_dim;
  if (!rc.data_path) rc.dataset.validate();
  rc.train.validate();
  if (rc.ranks.empty()) throw ValidationError("--ranks needs at least one value");
  for (std::size_t k : rc.ranks) {
    if (k == 0) throw ValidationError("ranks are 1-based");
  }
  if (!rc.data_path && rc.train.predictor == Predictor::kKnn) {
    const std::size_t n = rc.dataset.n_identities * rc.dataset.images_per_identity;
    if (n < 2 || rc.train.knn_c > n - 1) throw ValidationError("--knn-c must be <= n - 1");
  }
}

Dataset load_dataset(const RunConfig& rc) {
  if (!rc.data_path) return generate(rc.dataset);
  Dataset data = read_dataset_csv(*rc.data_path);
  if (data.raw_dim < rc.dataset.embed_dim) {
    throw ValidationError("dataset raw dimension is below --embed-dim");
  }
  if (rc.train.predictor == Predictor::kKnn && rc.train.knn_c > data.size() - 1) {
    throw ValidationError("--knn-c must be <= n - 1");
  }
  return data;
}

LinearEncoder load_encoder(const RunConfig& rc, const Dataset& data) {
  if (!rc.encoder_path) {
    return LinearEncoder::random(rc.dataset.embed_dim, data.raw_dim, rc.dataset.seed);
  }
  if (!fs::exists(*rc.encoder_path)) {
    throw IoError("encoder snapshot not found: " + rc.encoder_path->string());
  }
  LinearEncoder enc = LinearEncoder::load(*rc.encoder_path);
  if (enc.raw_dim() != data.raw_dim) {
    throw ValidationError("encoder expects raw dimension " + std::to_string(enc.raw_dim()) +
                          ", dataset has " + std::to_string(data.raw_dim));
  }
  return enc;
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

EpochCallback progress(const RunConfig& rc, std::ostream& out) {
  if (rc.quiet) return {};
  const std::size_t total = rc.train.epochs;
  return [&out, total](const EpochMetrics& m) {
    const auto flags = out.flags();
    out << std::fixed << std::setprecision(4) << "epoch " << m.epoch << '/' << total << " loss "
        << m.mean_loss << " rank1 " << m.rank1 << " map " << m.map << '\n';
    out.flags(flags);
  };
}

int cmd_gen_data(RunConfig& rc, std::ostream& out) {
  validate(rc);
  if (rc.data_path) throw ValidationError("gen-data does not take --data");
  const Dataset data = generate(rc.dataset);
  prepare_out_dir(rc.out_dir);
  const fs::path path = rc.out_dir / "dataset.csv";
  write_dataset_csv(path, data);
  out << "wrote " << path.string() << ": " << data.size() << " samples, "
      << data.identity_count() << " identities, " << data.camera_count() << " cameras\n";
  return kOk;
}

int cmd_train(RunConfig& rc, std::ostream& out) {
  validate(rc);
  const Dataset data = load_dataset(rc);
  prepare_out_dir(rc.out_dir);
  const TrainResult result = train(rc.train, data, progress(rc, out));
  const fs::path metrics = rc.out_dir / "metrics.csv";
  const fs::path weights = rc.out_dir / "encoder.gsew";
  write_metrics_csv(metrics, result.history);
  result.encoder.save(weights, result.steps);
  out << "wrote " << metrics.string() << " and " << weights.string() << '\n';
  if (result.degenerate_updates > 0) {
    out << "note: " << result.degenerate_updates << " antipodal table updates were skipped\n";
  }
  return kOk;
}

int cmd_sweep(RunConfig& rc, std::ostream& out) {
  validate(rc);
  if (rc.sweep_values.empty()) throw ValidationError("--values needs at least one value");
  std::vector<TrainConfig> runs;
  for (double v : rc.sweep_values) {
    TrainConfig tc = rc.train;
    (rc.sweep_param == "tau" ? tc.tau : tc.gamma) = v;
    tc.validate();
    runs.push_back(tc);
  }
  const Dataset data = load_dataset(rc);
  prepare_out_dir(rc.out_dir);
  const fs::path path = rc.out_dir / "sweep.csv";
  std::ofstream csv_out(path, std::ios::trunc);
  if (!csv_out) throw IoError("cannot open " + path.string() + " for writing");
  csv_out << "parameter,value," << metrics_header() << '\n';
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (!rc.quiet) {
      out << rc.sweep_param << " = " << csv::format_double(rc.sweep_values[r]) << '\n';
    }
    const TrainResult result = train(runs[r], data, progress(rc, out));
    for (const auto& m : result.history) {
      csv_out << rc.sweep_param << ',' << csv::format_double(rc.sweep_values[r]) << ',';
      write_metrics_row(csv_out, m);
    }
  }
  if (!csv_out) throw IoError("write failed: " + path.string());
  out << "wrote " << path.string() << '\n';
  return kOk;
}

void print_quality(std::ostream& out, const LabelQualityReport& q) {
  out << "precision " << csv::format_double(q.precision) << " recall "
      << csv::format_double(q.recall) << " mean_positives " << csv::format_double(q.mean_positives)
      << '\n';
}

int cmd_labels(RunConfig& rc, std::ostream& out) {
  validate(rc);
  const Dataset data = load_dataset(rc);
  const LinearEncoder enc = load_encoder(rc, data);
  prepare_out_dir(rc.out_dir);
  const LookupTable table = init_table(encode_dataset(enc, data));
  const auto labels = predict_all(table, {rc.train.predictor, rc.train.tau, rc.train.knn_c});
  const LabelQualityReport q = label_quality(labels, data);

  write_labels_csv(rc.out_dir / "labels.csv", labels);
  const fs::path report = rc.out_dir / "label_quality.csv";
  std::ofstream rep(report, std::ios::trunc);
  if (!rep) throw IoError("cannot open " + report.string() + " for writing");
  rep << "predictor,tau,knn_c,precision,recall,mean_positives\n"
      << to_string(rc.train.predictor) << ',' << csv::format_double(rc.train.tau) << ','
      << rc.train.knn_c << ',' << csv::format_double(q.precision) << ','
      << csv::format_double(q.recall) << ',' << csv::format_double(q.mean_positives) << '\n';
  if (!rep) throw IoError("write failed: " + report.string());
  out << to_string(rc.train.predictor) << ": ";
  print_quality(out, q);
  return kOk;
}

int cmd_eval(RunConfig& rc, std::ostream& out) {
  validate(rc);
  const Dataset data = load_dataset(rc);
  const LinearEncoder enc = load_encoder(rc, data);
  prepare_out_dir(rc.out_dir);
  const auto features = encode_dataset(enc, data);
  const RetrievalReport rr = cmc_map(data, features, standard_protocol(data));
  const LookupTable table = init_table(features);
  const auto labels = predict_all(table, {rc.train.predictor, rc.train.tau, rc.train.knn_c});
  const LabelQualityReport q = label_quality(labels, data);

  double loss = 0.0;
  const SmlcConfig smlc{rc.train.gamma, rc.train.exclude_self_positive};
  for (std::size_t i = 0; i < data.size(); ++i) {
    loss += rc.train.loss == LossKind::kSmlc
                ? smlc_loss_and_gradient(features[i].values(), table, labels[i], smlc).loss.total
                : ce_loss_and_gradient(features[i].values(), table, labels[i],
                                       rc.train.ce_temperature)
                      .loss.total;
  }

  EpochMetrics m;
  m.epoch = 0;
  m.mean_loss = loss / static_cast<double>(data.size());
  m.label_precision = q.precision;
  m.label_recall = q.recall;
  m.positives_per_sample = q.mean_positives;
  m.rank1 = rr.rank(1);
  m.rank5 = rr.rank(5);
  m.rank10 = rr.rank(10);
  m.map = rr.map;
  m.lr = 0.0;
  write_metrics_csv(rc.out_dir / "eval.csv", std::span<const EpochMetrics>(&m, 1));

  for (std::size_t k : rc.ranks) out << "rank" << k << ' ' << csv::format_double(rr.rank(k)) << '\n';
  out << "map " << csv::format_double(rr.map) << " (" << rr.evaluated << " queries, "
      << rr.skipped << " skipped)\n";
  return kOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Unsupervised re-identification with graph-based multi-label prediction"};
  app.name("gsml");
  app.set_config("--config", "", "TOML/INI file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  add_run_options(app, rc);

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic dataset CSV");
  auto* trn = app.add_subcommand("train", "Train the encoder; write metrics CSV and weights");
  auto* swp = app.add_subcommand("sweep", "Train once per tau or gamma value");
  swp->add_option("--param", rc.sweep_param, "tau|gamma")
      ->required()
      ->check(CLI::IsMember({"tau", "gamma"}));
  swp->add_option("--values", rc.sweep_values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  auto* lab = app.add_subcommand("labels", "Predict multi-labels and score them");
  lab->add_option("--encoder", rc.encoder_path, "Encoder snapshot (default: random encoder)");
  auto* evl = app.add_subcommand("eval", "Report CMC and mAP for an encoder");
  evl->add_option("--encoder", rc.encoder_path, "Encoder snapshot (default: random encoder)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(rc, out);
    if (trn->parsed()) return cmd_train(rc, out);
    if (swp->parsed()) return cmd_sweep(rc, out);
    if (lab->parsed()) return cmd_labels(rc, out);
    return cmd_eval(rc, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

int run_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace gsml::cli

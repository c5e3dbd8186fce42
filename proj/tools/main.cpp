// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: prepare / train / eval / predict / ela.
// Every failure prints a single `error: <category>: <detail>` line to stderr
// and exits nonzero; warnings go to stderr prefixed `warning:`.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "elaspoof/checkpoint.hpp"
#include "elaspoof/dataset.hpp"
#include "elaspoof/ela.hpp"
#include "elaspoof/errors.hpp"
#include "elaspoof/image.hpp"
#include "elaspoof/metrics.hpp"
#include "elaspoof/model.hpp"
#include "elaspoof/trainer.hpp"

namespace {

using namespace elaspoof;

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t flag_value) {
  if (seed_opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("ELASPOOF_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw InvalidArgumentError(std::string("ELASPOOF_SEED must be an unsigned integer, got '") +
                                 env + "'");
    }
  }
  return flag_value;
}

std::optional<double> parse_amplify(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgumentError("--amplify must be 'auto' or a positive number, got '" + text +
                               "'");
  }
}

/// Decode -> ELA -> resize for every manifest record, in order; undecodable
/// records are skipped with a warning on stderr.
std::vector<Sample> load_samples(const DatasetManifest& manifest, const ElaConfig& ela) {
  std::vector<Sample> samples;
  samples.reserve(manifest.records.size());
  for (const ManifestRecord& record : manifest.records) {
    try {
      const RawImage image = decode_image(record.path);
      const RawImage map = ela_transform(image, ela);
      samples.push_back(
          Sample{resize_normalize(map, ela.target_size), record.label, record.path});
    } catch (const Error& e) {
      std::cerr << "warning: skipping " << record.path << ": " << e.what() << "\n";
    }
  }
  if (samples.empty()) {
    throw InvalidDatasetError("no manifest record could be decoded");
  }
  return samples;
}

void print_epoch(const EpochRecord& r, std::size_t total_epochs) {
  std::printf("epoch %zu/%zu  train_loss %.6f  train_acc %.4f  val_loss %.6f  val_acc %.4f\n",
              r.epoch, total_epochs, r.train_loss, r.train_accuracy, r.val_loss,
              r.val_accuracy);
  std::fflush(stdout);
}

struct PrepareArgs {
  std::string manifest;
  std::string train_out;
  std::string test_out;
  double split = 0.7;
  std::uint64_t seed = 0;
  double noise_threshold = kDefaultNoiseThreshold;
};

int run_prepare(const PrepareArgs& args) {
  const DatasetManifest manifest = load_manifest(args.manifest);
  const SplitIndices split = stratified_split(manifest, args.split, args.seed);

  DatasetManifest train_manifest;
  DatasetManifest test_manifest;
  for (const std::size_t i : split.train) train_manifest.records.push_back(manifest.records[i]);
  for (const std::size_t i : split.test) test_manifest.records.push_back(manifest.records[i]);
  save_manifest(train_manifest, args.train_out);
  save_manifest(test_manifest, args.test_out);

  std::size_t counts[2][2] = {{0, 0}, {0, 0}};  // [side][label]
  for (const ManifestRecord& r : train_manifest.records) ++counts[0][r.label];
  for (const ManifestRecord& r : test_manifest.records) ++counts[1][r.label];
  std::printf("train: %zu real, %zu fake -> %s\n", counts[0][kLabelReal],
              counts[0][kLabelFake], args.train_out.c_str());
  std::printf("test:  %zu real, %zu fake -> %s\n", counts[1][kLabelReal],
              counts[1][kLabelFake], args.test_out.c_str());

  std::size_t flagged = 0;
  for (const ManifestRecord& record : manifest.records) {
    try {
      const double score = noise_score(decode_image(record.path));
      if (score > args.noise_threshold) {
        ++flagged;
        std::cerr << "warning: noisy image (score " << score << " > " << args.noise_threshold
                  << "): " << record.path << "\n";
      }
    } catch (const Error& e) {
      std::cerr << "warning: cannot screen " << record.path << ": " << e.what() << "\n";
    }
  }
  std::printf("noise screen: %zu of %zu images flagged (threshold %g)\n", flagged,
              manifest.records.size(), args.noise_threshold);
  return 0;
}

struct TrainArgs {
  std::string manifest;
  std::string out;
  std::string history;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double val_split = 0.2;
  bool shuffle = true;
  double lr = 0.001;
  int ela_quality = 90;
  std::size_t input_size = 128;
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& args) {
  const DatasetManifest manifest = load_manifest(args.manifest);
  ElaConfig ela;
  ela.jpeg_quality = args.ela_quality;
  ela.target_size = args.input_size;

  const DatasetBuild build =
      build_dataset(manifest, ela, /*split_fraction=*/1.0, args.seed, /*shuffle=*/false);
  for (const std::string& warning : build.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  TrainConfig train_config;
  train_config.validation_split = args.val_split;
  train_config.shuffle = args.shuffle;
  train_config.epochs = args.epochs;
  train_config.batch_size = args.batch_size;
  train_config.learning_rate = args.lr;
  train_config.seed = args.seed;

  const ModelConfig model_config = default_model_config(args.input_size);
  TrainResult result = fit(model_config, build.train, train_config,
                           [&](const EpochRecord& r) { print_epoch(r, args.epochs); });

  checkpoint_save(args.out, make_checkpoint(result.network, train_config, ela));
  std::printf("checkpoint -> %s\n", args.out.c_str());
  if (!args.history.empty()) {
    history_to_csv(result.history, args.history);
    std::printf("history -> %s\n", args.history.c_str());
  }
  return 0;
}

struct EvalArgs {
  std::string manifest;
  std::string model;
  std::string report;
  double threshold = 0.5;
};

int run_eval(const EvalArgs& args) {
  const Checkpoint checkpoint = checkpoint_load(args.model);
  const Network network = restore_network(checkpoint);
  const DatasetManifest manifest = load_manifest(args.manifest);
  const std::vector<Sample> samples = load_samples(manifest, checkpoint.ela_config);

  const EvalResult eval = evaluate(network, samples);
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const Sample& sample : samples) labels.push_back(sample.label);

  const MetricsReport report = compute_metrics(
      confusion_from_predictions(eval.predictions, labels, args.threshold), args.threshold);

  std::printf("recall %.6f\n", report.recall);
  std::printf("precision %.6f\n", report.precision);
  std::printf("f1 %.6f\n", report.f1);
  std::printf("accuracy %.6f\n", report.accuracy);
  std::printf("loss %.6f\n", eval.loss);
  if (report.degenerate) std::printf("degenerate 1\n");

  if (!args.report.empty()) {
    const std::string body = args.report.size() >= 5 &&
                                     args.report.compare(args.report.size() - 5, 5, ".json") == 0
                                 ? report_to_json(report)
                                 : report_to_text(report);
    std::ofstream out(args.report, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + args.report + "' for writing");
    out << body;
    if (!out) throw IoError("failed writing report to '" + args.report + "'");
  }
  return 0;
}

struct PredictArgs {
  std::string image;
  std::string model;
};

int run_predict(const PredictArgs& args) {
  const Checkpoint checkpoint = checkpoint_load(args.model);
  const Network network = restore_network(checkpoint);

  const RawImage image = decode_image(args.image);
  const RawImage map = ela_transform(image, checkpoint.ela_config);
  const Tensor features = resize_normalize(map, checkpoint.ela_config.target_size);
  Shape batched{1};
  batched.insert(batched.end(), features.shape().begin(), features.shape().end());
  const double p = network.forward_inference(features.reshaped(batched)).data()[0];

  const double confidence = 100.0 * std::max(p, 1.0 - p);
  std::printf("Class: %s Confidence: %.2f\n", p >= 0.5 ? "Fake" : "Real", confidence);
  return 0;
}

struct ElaArgs {
  std::string image;
  std::string out;
  int quality = 90;
  std::string amplify = "auto";
};

int run_ela(const ElaArgs& args) {
  ElaConfig config;
  config.jpeg_quality = args.quality;
  config.amplification = parse_amplify(args.amplify);
  config.validate();

  const RawImage image = decode_image(args.image);
  write_png(ela_transform(image, config), args.out);
  std::printf("ela map -> %s\n", args.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elaspoof: error-level-analysis face-anti-spoofing toolkit"};
  app.require_subcommand(1);

  PrepareArgs prepare_args;
  CLI::App* prepare = app.add_subcommand(
      "prepare", "Stratified train/test manifest split plus a noise screen");
  prepare->add_option("--manifest", prepare_args.manifest, "input manifest CSV (path,label)")
      ->required();
  prepare->add_option("--train-out", prepare_args.train_out, "output training manifest")
      ->required();
  prepare->add_option("--test-out", prepare_args.test_out, "output test manifest")->required();
  prepare->add_option("--split", prepare_args.split,
                      "training fraction of each class (default 0.7)")
      ->capture_default_str();
  CLI::Option* prepare_seed =
      prepare->add_option("--seed", prepare_args.seed, "RNG seed (default ELASPOOF_SEED or 0)");
  prepare->add_option("--noise-threshold", prepare_args.noise_threshold,
                      "flag images whose noise score exceeds this (default 12.0)")
      ->capture_default_str();

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand(
      "train",
      "Train the classifier. Loss is binary cross-entropy, the optimizer is ADAM");
  train->add_option("--manifest", train_args.manifest, "training manifest CSV")->required();
  train->add_option("--out", train_args.out, "checkpoint output path")->required();
  train->add_option("--epochs", train_args.epochs, "training epochs (default 20)")
      ->capture_default_str();
  train->add_option("--batch-size", train_args.batch_size, "batch size (default 32)")
      ->capture_default_str();
  train->add_option("--val-split", train_args.val_split,
                    "validation split held out per class (default 0.2)")
      ->capture_default_str();
  train->add_flag("--shuffle,!--no-shuffle", train_args.shuffle,
                  "reshuffle the training order every epoch (default true)")
      ->capture_default_str();
  train->add_option("--lr", train_args.lr, "ADAM learning rate (default 0.001)")
      ->capture_default_str();
  train->add_option("--ela-quality", train_args.ela_quality,
                    "ELA re-encode JPEG quality (default 90)")
      ->capture_default_str();
  train->add_option("--input-size", train_args.input_size,
                    "network input side length in pixels (default 128)")
      ->capture_default_str();
  CLI::Option* train_seed =
      train->add_option("--seed", train_args.seed, "RNG seed (default ELASPOOF_SEED or 0)");
  train->add_option("--history", train_args.history, "write per-epoch loss/accuracy CSV here");

  EvalArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate a checkpoint against a labeled manifest");
  eval_cmd->add_option("--manifest", eval_args.manifest, "evaluation manifest CSV")->required();
  eval_cmd->add_option("--model", eval_args.model, "checkpoint path")->required();
  eval_cmd->add_option("--threshold", eval_args.threshold,
                       "probability threshold for the fake class (default 0.5)")
      ->capture_default_str();
  eval_cmd->add_option("--report", eval_args.report,
                       "write the metrics report here (.json for JSON, else text)");

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand("predict", "Classify a single image");
  predict->add_option("--image", predict_args.image, "image to classify")->required();
  predict->add_option("--model", predict_args.model, "checkpoint path")->required();

  ElaArgs ela_args;
  CLI::App* ela_cmd = app.add_subcommand("ela", "Write an image's ELA map as PNG");
  ela_cmd->add_option("--image", ela_args.image, "input image")->required();
  ela_cmd->add_option("--out", ela_args.out, "output PNG path")->required();
  ela_cmd->add_option("--quality", ela_args.quality, "JPEG re-encode quality (default 90)")
      ->capture_default_str();
  ela_cmd->add_option("--amplify", ela_args.amplify,
                      "difference multiplier, or 'auto' to map the max to 255 (default auto)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: invalid-argument: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*prepare) {
      prepare_args.seed = resolve_seed(prepare_seed, prepare_args.seed);
      return run_prepare(prepare_args);
    }
    if (*train) {
      train_args.seed = resolve_seed(train_seed, train_args.seed);
      return run_train(train_args);
    }
    if (*eval_cmd) return run_eval(eval_args);
    if (*predict) return run_predict(predict_args);
    if (*ela_cmd) return run_ela(ela_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

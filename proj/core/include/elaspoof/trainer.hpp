// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "elaspoof/dataset.hpp"
#include "elaspoof/model.hpp"
#include "elaspoof/tensor.hpp"

namespace elaspoof {

/// Training hyperparameters. Loss is binary cross-entropy and the optimizer
/// is ADAM; both are fixed for this model family.
struct TrainConfig {
  double validation_split = 0.2;  // in [0,1)
  bool shuffle = true;            // reshuffle training order every epoch
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 0.001;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

using TrainHistory = std::vector<EpochRecord>;

struct TrainResult {
  Network network;
  TrainHistory history;
};

/// Invoked after every completed epoch (progress reporting only; has no
/// effect on the numerics).
using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains a fresh network on `data`:
///  - splits off a stratified, seeded validation fraction before any
///    shuffling (empty validation reports zeros);
///  - per epoch: optionally reshuffles the training order, then runs
///    forward / loss / backward / ADAM per batch in a fixed order (the last
///    short batch is kept; epoch loss is weighted by actual batch sizes);
///  - records one history row per epoch; train metrics come from the
///    training-mode passes, validation from inference mode, both thresholded
///    at 0.5.
/// (seed, data, config) fully determine the history and final parameters.
/// Raises InvalidArgumentError on empty data or a missing class when
/// validation_split > 0, NumericError (with epoch/batch context) on a
/// non-finite loss.
TrainResult fit(const ModelConfig& model_config, const std::vector<Sample>& data,
                const TrainConfig& config, const EpochCallback& on_epoch = {});

struct EvalResult {
  double loss = 0.0;
  std::vector<double> predictions;  // P(fake) per sample, in input order
};

/// Inference-mode evaluation: mean BCE plus per-sample probabilities.
/// Deterministic; batching cannot change the per-sample numerics.
EvalResult evaluate(const Network& network, const std::vector<Sample>& data);

double accuracy_at_threshold(const std::vector<double>& predictions,
                             const std::vector<Sample>& data, double threshold);

struct GradientCheckReport {
  std::size_t coordinates_checked = 0;
  std::size_t dead_coordinates = 0;  // both analytic and numeric ~ 0; excluded
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Compares the analytic gradient of BCE(network(x), y) against central
/// finite differences (h = 1e-6) on a seeded random subset of at least
/// `min_coordinates` parameter coordinates (all of them when the model is
/// smaller). Dropout acts as the identity here so the loss surface is
/// deterministic. Coordinates where both gradients sit below the noise floor
/// are excluded from the ratio and reported as dead. pass = max relative
/// error strictly below tolerance over a nonempty checked set.
GradientCheckReport gradient_check(const ModelConfig& model_config, const Sample& sample,
                                   double tolerance, std::uint64_t seed,
                                   std::size_t min_coordinates = 200);

/// Same check against the network's current parameters (not reinitialized);
/// `seed` only drives coordinate selection.
GradientCheckReport gradient_check(Network& network, const Sample& sample, double tolerance,
                                   std::uint64_t seed, std::size_t min_coordinates = 200);

/// Stacks per-sample feature tensors [H,W,C] into a batch [B,H,W,C] and
/// labels into [B,1].
Tensor stack_features(const std::vector<Sample>& data, std::size_t begin, std::size_t end);
Tensor stack_labels(const std::vector<Sample>& data, std::size_t begin, std::size_t end);

}  // namespace elaspoof

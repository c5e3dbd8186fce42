// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_set>
#include <utility>

#include "elaspoof/errors.hpp"
#include "elaspoof/loss.hpp"
#include "elaspoof/optimizer.hpp"
#include "elaspoof/rng.hpp"

namespace elaspoof {
namespace {

// Below this magnitude a finite-difference quotient is dominated by rounding
// noise (loss eps / 2h ~ 1e-10), so agreement there is meaningless.
constexpr double kDeadGradientThreshold = 1e-10;
constexpr double kFiniteDifferenceStep = 1e-6;
constexpr std::size_t kEvalBatch = 32;

void check_sample_features(const Sample& sample, std::size_t index) {
  const Shape& s = sample.features.shape();
  if (s.size() != 3) {
    throw InvalidArgumentError("sample " + std::to_string(index) + " (" + sample.source_path +
                               "): features must be rank-3 [H,W,C], got rank " +
                               std::to_string(s.size()));
  }
  if (sample.label != kLabelReal && sample.label != kLabelFake) {
    throw InvalidLabelError("sample " + std::to_string(index) + " (" + sample.source_path +
                            "): label must be 0 (real) or 1 (fake), got " +
                            std::to_string(sample.label));
  }
}

void check_against_model(const ModelConfig& config, const std::vector<Sample>& data) {
  const Shape expected{config.input_height, config.input_width, config.input_channels};
  for (std::size_t i = 0; i < data.size(); ++i) {
    check_sample_features(data[i], i);
    if (data[i].features.shape() != expected) {
      throw InvalidArgumentError(
          "sample " + std::to_string(i) + " (" + data[i].source_path + "): feature shape " +
          shape_to_string(data[i].features.shape()) + " does not match the model input " +
          shape_to_string(expected));
    }
  }
}

Tensor gather_features(const std::vector<Sample>& data, const std::vector<std::size_t>& order,
                       std::size_t begin, std::size_t end) {
  const Shape& fs = data[order[begin]].features.shape();
  Shape batched;
  batched.push_back(end - begin);
  batched.insert(batched.end(), fs.begin(), fs.end());
  Tensor out = Tensor::zeros(batched);
  const std::size_t stride = data[order[begin]].features.size();
  for (std::size_t i = begin; i < end; ++i) {
    const Tensor& f = data[order[i]].features;
    std::memcpy(out.data() + (i - begin) * stride, f.data(), stride * sizeof(double));
  }
  return out;
}

Tensor gather_labels(const std::vector<Sample>& data, const std::vector<std::size_t>& order,
                     std::size_t begin, std::size_t end) {
  Tensor out = Tensor::zeros({end - begin, 1});
  for (std::size_t i = begin; i < end; ++i) {
    out.data()[i - begin] = static_cast<double>(data[order[i]].label);
  }
  return out;
}

struct ValidationSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

// Per class: seeded shuffle, first round(frac * class_count) indices go to
// validation, the rest train. Both halves are restored to ascending data
// order so the epoch-0 sequence is the input sequence when shuffle is off.
ValidationSplit split_validation(const std::vector<Sample>& data, double frac,
                                 std::uint64_t seed) {
  ValidationSplit out;
  if (frac <= 0.0) {
    out.train.resize(data.size());
    std::iota(out.train.begin(), out.train.end(), std::size_t{0});
    return out;
  }
  for (int label : {kLabelReal, kLabelFake}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i].label == label) idx.push_back(i);
    }
    if (idx.empty()) {
      throw InvalidArgumentError(
          std::string("validation split requires at least one '") + label_name(label) +
          "' sample, found none");
    }
    Rng rng = Rng::for_stream(seed, RngStream::kSplit, static_cast<std::uint64_t>(label));
    rng.shuffle(idx);
    const auto n_val =
        static_cast<std::size_t>(std::lround(frac * static_cast<double>(idx.size())));
    out.val.insert(out.val.end(), idx.begin(), idx.begin() + n_val);
    out.train.insert(out.train.end(), idx.begin() + n_val, idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  return out;
}

struct IndexedEval {
  double loss = 0.0;
  std::vector<double> predictions;
};

IndexedEval evaluate_indices(const Network& network, const std::vector<Sample>& data,
                             const std::vector<std::size_t>& order) {
  IndexedEval out;
  out.predictions.reserve(order.size());
  double loss_sum = 0.0;
  for (std::size_t begin = 0; begin < order.size(); begin += kEvalBatch) {
    const std::size_t end = std::min(begin + kEvalBatch, order.size());
    const Tensor x = gather_features(data, order, begin, end);
    const Tensor y = gather_labels(data, order, begin, end);
    const Tensor pred = network.forward_inference(x);
    loss_sum += bce_loss(pred, y) * static_cast<double>(end - begin);
    for (std::size_t i = 0; i < end - begin; ++i) out.predictions.push_back(pred.data()[i]);
  }
  out.loss = loss_sum / static_cast<double>(order.size());
  return out;
}

double accuracy_of(const Tensor& pred, const Tensor& target, double threshold) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int predicted = pred.data()[i] >= threshold ? kLabelFake : kLabelReal;
    if (predicted == static_cast<int>(target.data()[i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (!(validation_split >= 0.0 && validation_split < 1.0)) {
    throw InvalidConfigError("validation_split must lie in [0,1), got " +
                             std::to_string(validation_split));
  }
  if (epochs < 1) throw InvalidConfigError("epochs must be >= 1");
  if (batch_size < 1) throw InvalidConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidConfigError("learning_rate must be a positive finite number, got " +
                             std::to_string(learning_rate));
  }
}

Tensor stack_features(const std::vector<Sample>& data, std::size_t begin, std::size_t end) {
  if (begin >= end || end > data.size()) {
    throw InvalidArgumentError("stack_features: empty or out-of-range sample window");
  }
  const Shape& fs = data[begin].features.shape();
  for (std::size_t i = begin; i < end; ++i) {
    if (data[i].features.shape() != fs) {
      throw ShapeMismatchError("stack_features: sample " + std::to_string(i) + " has shape " +
                               shape_to_string(data[i].features.shape()) +
                               ", expected " + shape_to_string(fs));
    }
  }
  std::vector<std::size_t> order(end - begin);
  std::iota(order.begin(), order.end(), begin);
  return gather_features(data, order, 0, order.size());
}

Tensor stack_labels(const std::vector<Sample>& data, std::size_t begin, std::size_t end) {
  if (begin >= end || end > data.size()) {
    throw InvalidArgumentError("stack_labels: empty or out-of-range sample window");
  }
  std::vector<std::size_t> order(end - begin);
  std::iota(order.begin(), order.end(), begin);
  return gather_labels(data, order, 0, order.size());
}

TrainResult fit(const ModelConfig& model_config, const std::vector<Sample>& data,
                const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (data.empty()) throw InvalidArgumentError("fit requires a nonempty sample list");
  check_against_model(model_config, data);

  TrainResult result{Network(model_config), {}};
  Network& network = result.network;
  network.init_parameters(config.seed);

  const ValidationSplit split = split_validation(data, config.validation_split, config.seed);

  std::vector<ParamView> params = network.parameters();
  std::vector<AdamState> states;
  states.reserve(params.size());
  for (const ParamView& p : params) states.push_back(AdamState::for_param(*p.value));

  Rng dropout_rng = Rng::for_stream(config.seed, RngStream::kDropout);
  std::vector<std::size_t> order = split.train;
  result.history.reserve(config.epochs);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle) {
      Rng rng = Rng::for_stream(config.seed, RngStream::kShuffle, epoch);
      rng.shuffle(order);
    }

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(begin + config.batch_size, order.size());
      const std::size_t batch_index = begin / config.batch_size;
      const Tensor x = gather_features(data, order, begin, end);
      const Tensor y = gather_labels(data, order, begin, end);

      const Tensor pred = network.forward_training(x, dropout_rng, /*stochastic=*/true);
      const double loss = bce_loss(pred, y);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_index + 1));
      }
      network.backward(bce_grad(pred, y));
      try {
        for (std::size_t i = 0; i < params.size(); ++i) {
          adam_step(*params[i].value, *params[i].grad, states[i], config.learning_rate);
        }
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_index + 1) + ")");
      }

      loss_sum += loss * static_cast<double>(end - begin);
      for (std::size_t i = 0; i < end - begin; ++i) {
        const int predicted = pred.data()[i] >= 0.5 ? kLabelFake : kLabelReal;
        if (predicted == data[order[begin + i]].label) ++correct;
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(order.size());
    record.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    if (!split.val.empty()) {
      const IndexedEval val = evaluate_indices(network, data, split.val);
      record.val_loss = val.loss;
      std::size_t val_correct = 0;
      for (std::size_t i = 0; i < split.val.size(); ++i) {
        const int predicted = val.predictions[i] >= 0.5 ? kLabelFake : kLabelReal;
        if (predicted == data[split.val[i]].label) ++val_correct;
      }
      record.val_accuracy =
          static_cast<double>(val_correct) / static_cast<double>(split.val.size());
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  return result;
}

EvalResult evaluate(const Network& network, const std::vector<Sample>& data) {
  if (data.empty()) throw InvalidArgumentError("evaluate requires a nonempty sample list");
  check_against_model(network.config(), data);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  IndexedEval eval = evaluate_indices(network, data, order);
  return EvalResult{eval.loss, std::move(eval.predictions)};
}

double accuracy_at_threshold(const std::vector<double>& predictions,
                             const std::vector<Sample>& data, double threshold) {
  if (predictions.size() != data.size() || data.empty()) {
    throw InvalidArgumentError("accuracy_at_threshold: predictions and samples must be "
                               "nonempty and equally sized");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int predicted = predictions[i] >= threshold ? kLabelFake : kLabelReal;
    if (predicted == data[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

GradientCheckReport gradient_check(const ModelConfig& model_config, const Sample& sample,
                                   double tolerance, std::uint64_t seed,
                                   std::size_t min_coordinates) {
  Network network(model_config);
  network.init_parameters(seed);
  return gradient_check(network, sample, tolerance, seed, min_coordinates);
}

GradientCheckReport gradient_check(Network& network, const Sample& sample, double tolerance,
                                   std::uint64_t seed, std::size_t min_coordinates) {
  check_against_model(network.config(), {sample});

  const Tensor x = sample.features.reshaped([&] {
    Shape s{1};
    s.insert(s.end(), sample.features.shape().begin(), sample.features.shape().end());
    return s;
  }());
  Tensor y = Tensor::zeros({1, 1});
  y.data()[0] = static_cast<double>(sample.label);

  // Analytic pass. Dropout runs as the identity so the loss surface the
  // finite differences probe is the same one backward() differentiates.
  Rng unused = Rng::for_stream(seed, RngStream::kDropout);
  const Tensor pred = network.forward_training(x, unused, /*stochastic=*/false);
  network.backward(bce_grad(pred, y));

  std::vector<ParamView> params = network.parameters();
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  std::size_t total = 0;
  std::vector<std::size_t> offsets;  // global index of each parameter's first coordinate
  for (const ParamView& p : params) {
    analytic.push_back(*p.grad);
    offsets.push_back(total);
    total += p.value->size();
  }

  std::vector<std::size_t> chosen;
  if (total <= min_coordinates) {
    chosen.resize(total);
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  } else {
    Rng rng = Rng::for_stream(seed, RngStream::kGradCheck);
    std::unordered_set<std::size_t> seen;
    while (chosen.size() < min_coordinates) {
      const auto g = static_cast<std::size_t>(rng.next_below(total));
      if (seen.insert(g).second) chosen.push_back(g);
    }
  }

  GradientCheckReport report;
  report.tolerance = tolerance;
  const double h = kFiniteDifferenceStep;
  for (const std::size_t global : chosen) {
    std::size_t pi = offsets.size() - 1;
    while (offsets[pi] > global) --pi;
    const std::size_t flat = global - offsets[pi];

    double* slot = params[pi].value->data() + flat;
    const double original = *slot;
    *slot = original + h;
    const double loss_plus = bce_loss(network.forward_inference(x), y);
    *slot = original - h;
    const double loss_minus = bce_loss(network.forward_inference(x), y);
    *slot = original;

    const double numeric = (loss_plus - loss_minus) / (2.0 * h);
    const double a = analytic[pi].data()[flat];
    if (std::abs(a) < kDeadGradientThreshold && std::abs(numeric) < kDeadGradientThreshold) {
      ++report.dead_coordinates;
      continue;
    }
    const double rel = std::abs(a - numeric) / std::max(std::abs(a), std::abs(numeric));
    ++report.coordinates_checked;
    if (rel > report.max_relative_error) {
      report.max_relative_error = rel;
      report.worst_parameter = params[pi].name;
      report.worst_index = flat;
    }
  }
  report.pass = report.coordinates_checked > 0 && report.max_relative_error < tolerance;
  return report;
}

}  // namespace elaspoof

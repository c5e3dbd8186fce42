// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/model.hpp"

#include <cmath>

#include "elaspoof/errors.hpp"

namespace elaspoof {

bool ModelConfig::operator==(const ModelConfig& other) const {
  if (input_height != other.input_height || input_width != other.input_width ||
      input_channels != other.input_channels || layers.size() != other.layers.size())
    return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const bool same = std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          const T* b = std::get_if<T>(&other.layers[i]);
          if (!b) return false;
          if constexpr (std::is_same_v<T, Conv2dSpec>) {
            return a.out_channels == b->out_channels && a.kernel_h == b->kernel_h &&
                   a.kernel_w == b->kernel_w && a.stride == b->stride;
          } else if constexpr (std::is_same_v<T, MaxPool2dSpec>) {
            return a.pool_h == b->pool_h && a.pool_w == b->pool_w && a.stride == b->stride;
          } else if constexpr (std::is_same_v<T, DropoutSpec>) {
            return a.rate == b->rate;
          } else if constexpr (std::is_same_v<T, DenseSpec>) {
            return a.units == b->units;
          } else if constexpr (std::is_same_v<T, ActivationSpec>) {
            return a.kind == b->kind;
          } else {
            return true;  // Flatten
          }
        },
        layers[i]);
    if (!same) return false;
  }
  return true;
}

ModelConfig default_model_config(std::size_t input_size) {
  if (input_size < 32)
    throw InvalidConfigError("input size " + std::to_string(input_size) +
                             " is too small for the default cascade (minimum 32)");
  ModelConfig config;
  config.input_height = input_size;
  config.input_width = input_size;
  config.input_channels = 3;
  config.layers = {
      Conv2dSpec{32, 5, 5, 1},
      ActivationSpec{ActivationKind::kRelu},
      MaxPool2dSpec{2, 2, 2},
      Conv2dSpec{32, 5, 5, 1},
      ActivationSpec{ActivationKind::kRelu},
      MaxPool2dSpec{2, 2, 2},
      DropoutSpec{0.25},
      FlattenSpec{},
      DenseSpec{256},
      ActivationSpec{ActivationKind::kRelu},
      DenseSpec{1},
      ActivationSpec{ActivationKind::kSigmoid},
  };
  propagate_shapes(config);  // validates
  return config;
}

std::vector<Shape> propagate_shapes(const ModelConfig& config) {
  if (config.input_height < 1 || config.input_width < 1 || config.input_channels < 1)
    throw InvalidConfigError("model input dimensions must be >= 1");
  if (config.layers.empty()) throw InvalidConfigError("model has no layers");

  std::vector<Shape> shapes;
  shapes.reserve(config.layers.size());
  Shape cur = {config.input_height, config.input_width, config.input_channels};

  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    validate_layer_spec(config.layers[i]);
    const std::string where = "layer " + std::to_string(i);
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Conv2dSpec>) {
            if (cur.size() != 3)
              throw InvalidConfigError(where + ": conv2d needs a [H,W,C] input, got " +
                                       shape_to_string(cur));
            if (s.kernel_h > cur[0] || s.kernel_w > cur[1])
              throw InvalidConfigError(where + ": conv2d kernel " + std::to_string(s.kernel_h) +
                                       "x" + std::to_string(s.kernel_w) +
                                       " does not fit input " + shape_to_string(cur));
            cur = {(cur[0] - s.kernel_h) / s.stride + 1, (cur[1] - s.kernel_w) / s.stride + 1,
                   s.out_channels};
          } else if constexpr (std::is_same_v<T, MaxPool2dSpec>) {
            if (cur.size() != 3)
              throw InvalidConfigError(where + ": maxpool2d needs a [H,W,C] input, got " +
                                       shape_to_string(cur));
            if (s.pool_h > cur[0] || s.pool_w > cur[1])
              throw InvalidConfigError(where + ": maxpool2d window does not fit input " +
                                       shape_to_string(cur));
            cur = {(cur[0] - s.pool_h) / s.stride + 1, (cur[1] - s.pool_w) / s.stride + 1, cur[2]};
          } else if constexpr (std::is_same_v<T, FlattenSpec>) {
            std::size_t n = 1;
            for (std::size_t d : cur) n *= d;
            cur = {n};
          } else if constexpr (std::is_same_v<T, DenseSpec>) {
            if (cur.size() != 1)
              throw InvalidConfigError(where + ": dense needs a flat input, got " +
                                       shape_to_string(cur) + " (insert flatten)");
            cur = {s.units};
          }
          // Dropout and activations preserve the shape.
        },
        config.layers[i]);
    shapes.push_back(cur);
  }

  if (shapes.back() != Shape{1})
    throw InvalidConfigError("final layer must produce exactly 1 scalar per sample, got " +
                             shape_to_string(shapes.back()));
  return shapes;
}

ParamCounts param_count(const ModelConfig& config) {
  const std::vector<Shape> shapes = propagate_shapes(config);
  ParamCounts counts;
  Shape in = {config.input_height, config.input_width, config.input_channels};
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    std::size_t n = 0;
    if (const auto* conv = std::get_if<Conv2dSpec>(&config.layers[i])) {
      n = (conv->kernel_h * conv->kernel_w * in.back() + 1) * conv->out_channels;
    } else if (const auto* dense = std::get_if<DenseSpec>(&config.layers[i])) {
      n = (in[0] + 1) * dense->units;
    }
    counts.per_layer.push_back(n);
    counts.total += n;
    in = shapes[i];
  }
  return counts;
}

Network::Network(ModelConfig config)
    : config_(std::move(config)), output_shapes_(propagate_shapes(config_)) {
  Shape in = {config_.input_height, config_.input_width, config_.input_channels};
  for (std::size_t i = 0; i < config_.layers.size(); ++i) {
    LayerNode node;
    node.spec = config_.layers[i];
    if (const auto* conv = std::get_if<Conv2dSpec>(&node.spec)) {
      node.weights =
          Tensor::zeros({conv->kernel_h, conv->kernel_w, in.back(), conv->out_channels});
      node.bias = Tensor::zeros({conv->out_channels});
    } else if (const auto* dense = std::get_if<DenseSpec>(&node.spec)) {
      node.weights = Tensor::zeros({in[0], dense->units});
      node.bias = Tensor::zeros({dense->units});
    }
    if (!node.weights.empty()) {
      node.grad_weights = Tensor::zeros(node.weights.shape());
      node.grad_bias = Tensor::zeros(node.bias.shape());
    }
    nodes_.push_back(std::move(node));
    in = output_shapes_[i];
  }
}

void Network::init_parameters(std::uint64_t seed) {
  Rng rng = Rng::for_stream(seed, RngStream::kWeightInit);
  for (auto& node : nodes_) {
    if (node.weights.empty()) continue;
    double fan_in = 0.0, fan_out = 0.0;
    if (const auto* conv = std::get_if<Conv2dSpec>(&node.spec)) {
      const std::size_t in_ch = node.weights.dim(2);
      fan_in = static_cast<double>(conv->kernel_h * conv->kernel_w * in_ch);
      fan_out = static_cast<double>(conv->kernel_h * conv->kernel_w * conv->out_channels);
    } else {
      fan_in = static_cast<double>(node.weights.dim(0));
      fan_out = static_cast<double>(node.weights.dim(1));
    }
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : node.weights.values()) w = rng.next_double(-limit, limit);
    node.bias.fill(0.0);
  }
  has_cache_ = false;
}

std::vector<ParamView> Network::parameters() {
  std::vector<ParamView> params;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& node = nodes_[i];
    if (node.weights.empty()) continue;
    const char* kind = std::holds_alternative<Conv2dSpec>(node.spec) ? "conv2d" : "dense";
    const std::string base = "layer" + std::to_string(i) + "." + kind;
    params.push_back({base + ".weight", &node.weights, &node.grad_weights});
    params.push_back({base + ".bias", &node.bias, &node.grad_bias});
  }
  return params;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node.weights.size() + node.bias.size();
  return n;
}

void Network::check_input(const Tensor& input) const {
  if (input.rank() != 4 || input.dim(1) != config_.input_height ||
      input.dim(2) != config_.input_width || input.dim(3) != config_.input_channels)
    throw ShapeMismatchError(
        "network input must be [B," + std::to_string(config_.input_height) + "," +
        std::to_string(config_.input_width) + "," + std::to_string(config_.input_channels) +
        "], got " + shape_to_string(input.shape()));
}

Tensor Network::run_forward(const Tensor& input, Rng* dropout_rng, bool stochastic,
                            std::vector<LayerNode>* cache_nodes) const {
  check_input(input);
  const std::size_t batch = input.dim(0);
  Tensor cur = input;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const LayerNode& node = nodes_[i];
    LayerNode* cache = cache_nodes ? &(*cache_nodes)[i] : nullptr;
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Conv2dSpec>) {
            cur = conv2d_forward(cur, node.weights, node.bias, s.stride,
                                 cache ? &cache->conv_cache : nullptr);
          } else if constexpr (std::is_same_v<T, MaxPool2dSpec>) {
            MaxPoolResult r = maxpool_forward(cur, s.pool_h, s.pool_w, s.stride);
            cur = r.output;
            if (cache) cache->pool_cache = std::move(r);
          } else if constexpr (std::is_same_v<T, DropoutSpec>) {
            if (cache && stochastic) {
              DropoutResult r = dropout_forward(cur, s.rate, true, *dropout_rng);
              cur = std::move(r.output);
              cache->dropout_mask = std::move(r.mask);
            } else if (cache) {
              cache->dropout_mask = Tensor::filled(cur.shape(), 1.0);
            }
            // inference: identity
          } else if constexpr (std::is_same_v<T, FlattenSpec>) {
            if (cache) cache->flatten_input_shape = cur.shape();
            std::size_t per_sample = cur.size() / batch;
            cur = cur.reshaped({batch, per_sample});
          } else if constexpr (std::is_same_v<T, DenseSpec>) {
            cur = dense_forward(cur, node.weights, node.bias,
                                cache ? &cache->dense_cache : nullptr);
          } else {  // ActivationSpec
            Tensor out = activation_forward(s.kind, cur);
            if (cache) {
              cache->act_input = std::move(cur);
              cache->act_output = out;
            }
            cur = std::move(out);
          }
        },
        node.spec);
  }
  return cur;
}

Tensor Network::forward_training(const Tensor& input, Rng& dropout_rng, bool stochastic) {
  Tensor out = run_forward(input, &dropout_rng, stochastic, &nodes_);
  has_cache_ = true;
  return out;
}

Tensor Network::forward_inference(const Tensor& input) const {
  return run_forward(input, nullptr, false, nullptr);
}

void Network::backward(const Tensor& grad_output) {
  if (!has_cache_)
    throw IllegalStateError("backward requires a prior training-mode forward pass");
  Tensor grad = grad_output;
  for (std::size_t idx = nodes_.size(); idx-- > 0;) {
    LayerNode& node = nodes_[idx];
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Conv2dSpec>) {
            Conv2dGrads g = conv2d_backward(node.conv_cache, node.weights, grad);
            node.grad_weights = std::move(g.grad_weights);
            node.grad_bias = std::move(g.grad_bias);
            grad = std::move(g.grad_input);
          } else if constexpr (std::is_same_v<T, MaxPool2dSpec>) {
            if (!node.pool_cache)
              throw IllegalStateError("maxpool backward without forward cache");
            grad = maxpool_backward(*node.pool_cache, grad);
          } else if constexpr (std::is_same_v<T, DropoutSpec>) {
            grad = dropout_backward(node.dropout_mask, grad);
          } else if constexpr (std::is_same_v<T, FlattenSpec>) {
            grad = grad.reshaped(node.flatten_input_shape);
          } else if constexpr (std::is_same_v<T, DenseSpec>) {
            DenseGrads g = dense_backward(node.dense_cache, node.weights, grad);
            node.grad_weights = std::move(g.grad_weights);
            node.grad_bias = std::move(g.grad_bias);
            grad = std::move(g.grad_input);
          } else {
            grad = activation_backward(s.kind, node.act_input, node.act_output, grad);
          }
        },
        node.spec);
  }
}

}  // namespace elaspoof

// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elaspoof/layers.hpp"
#include "elaspoof/rng.hpp"
#include "elaspoof/tensor.hpp"

namespace elaspoof {

/// Declarative description of the classifier: input geometry plus an ordered
/// layer cascade. Everything downstream (parameter shapes, counts, the
/// checkpoint layout) derives from this.
struct ModelConfig {
  std::size_t input_height = 128;
  std::size_t input_width = 128;
  std::size_t input_channels = 3;
  std::vector<LayerSpec> layers;

  bool operator==(const ModelConfig& other) const;
};

/// The standard binary-classifier cascade for square RGB inputs:
///   Conv2D(32, 5x5, stride 1, valid) -> ReLU -> MaxPool2D(2x2, stride 2)
///   -> Conv2D(32, 5x5) -> ReLU -> MaxPool2D(2x2, stride 2)
///   -> Dropout(0.25) -> Flatten -> Dense(256) -> ReLU -> Dense(1) -> Sigmoid
/// Throws InvalidConfigError when input_size is too small for the two valid
/// 5x5 convolutions and poolings.
ModelConfig default_model_config(std::size_t input_size);

/// Per-sample output shape of every layer (no batch dimension), in order.
/// Throws InvalidConfigError when any layer would receive an impossible input
/// shape or the final layer does not produce exactly one scalar.
std::vector<Shape> propagate_shapes(const ModelConfig& config);

struct ParamCounts {
  std::vector<std::size_t> per_layer;  // zero for unparameterized layers
  std::size_t total = 0;
};

/// Conv2D: (kh*kw*in_ch + 1) * out_ch. Dense: (in_features + 1) * units.
ParamCounts param_count(const ModelConfig& config);

/// A named view of one parameter tensor and its gradient slot.
struct ParamView {
  std::string name;
  Tensor* value;
  Tensor* grad;
};

/// The runnable network: owns the parameter tensors, gradient slots and the
/// per-layer caches the backward pass consumes.
///
/// Parameters are read-only during a pass; the caches make a Network object
/// single-writer, so give each concurrent evaluation its own instance (the
/// inference path is const and cache-free).
class Network {
 public:
  explicit Network(ModelConfig config);

  const ModelConfig& config() const noexcept { return config_; }
  const std::vector<Shape>& layer_output_shapes() const noexcept { return output_shapes_; }

  /// Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases,
  /// drawn from the weight-init stream of `seed` in layer order.
  void init_parameters(std::uint64_t seed);

  std::vector<ParamView> parameters();
  std::size_t parameter_count() const;

  /// Training-mode forward over a batch [B,H,W,C]: retains per-layer caches
  /// for backward(). Dropout draws from `dropout_rng` when `stochastic`,
  /// otherwise acts as the identity (still cached, still differentiable).
  /// Returns probabilities [B,1].
  Tensor forward_training(const Tensor& input, Rng& dropout_rng, bool stochastic = true);

  /// Inference-mode forward: dropout is the identity, no caches are written.
  Tensor forward_inference(const Tensor& input) const;

  /// Backpropagates d(loss)/d(output) through the cached pass, filling every
  /// parameter's gradient slot. IllegalStateError without a prior
  /// forward_training call.
  void backward(const Tensor& grad_output);

 private:
  struct LayerNode {
    LayerSpec spec;
    Tensor weights;  // empty for unparameterized layers
    Tensor bias;
    Tensor grad_weights;
    Tensor grad_bias;

    // forward caches (training mode only)
    Conv2dCache conv_cache;
    DenseCache dense_cache;
    std::optional<MaxPoolResult> pool_cache;
    Tensor dropout_mask;
    Tensor act_input;
    Tensor act_output;
    Shape flatten_input_shape;
  };

  // Caches are written through `cache_nodes` (null for cache-free inference).
  Tensor run_forward(const Tensor& input, Rng* dropout_rng, bool stochastic,
                     std::vector<LayerNode>* cache_nodes) const;
  void check_input(const Tensor& input) const;

  ModelConfig config_;
  std::vector<Shape> output_shapes_;
  std::vector<LayerNode> nodes_;
  bool has_cache_ = false;
};

}  // namespace elaspoof

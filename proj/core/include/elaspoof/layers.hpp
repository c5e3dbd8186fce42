// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "elaspoof/rng.hpp"
#include "elaspoof/tensor.hpp"

namespace elaspoof {

// Layer shape conventions, used everywhere:
//   activations  [batch, height, width, channels]   (row-major)
//   conv weights [kernel_h, kernel_w, in_channels, out_channels]
//   conv bias    [out_channels]
//   dense input  [batch, features], weights [features, units], bias [units]
// Convolutions use valid padding only: H' = floor((H - kernel_h)/stride) + 1.

struct Conv2dSpec {
  std::size_t out_channels = 1;
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;
  std::size_t stride = 1;
};

struct MaxPool2dSpec {
  std::size_t pool_h = 2;
  std::size_t pool_w = 2;
  std::size_t stride = 2;
};

struct DropoutSpec {
  double rate = 0.25;  // fraction zeroed during training, in [0, 1)
};

struct FlattenSpec {};

struct DenseSpec {
  std::size_t units = 1;
};

enum class ActivationKind { kRelu, kSigmoid };

struct ActivationSpec {
  ActivationKind kind = ActivationKind::kRelu;
};

using LayerSpec =
    std::variant<Conv2dSpec, MaxPool2dSpec, DropoutSpec, FlattenSpec, DenseSpec, ActivationSpec>;

/// Throws InvalidConfigError when a spec violates its field invariants
/// (kernel/pool/stride/units >= 1, dropout rate in [0,1)).
void validate_layer_spec(const LayerSpec& spec);

// ---------------------------------------------------------------------------
// Conv2D

struct Conv2dCache {
  Tensor input;  // retained for the backward pass
  std::size_t stride = 1;
};

struct Conv2dGrads {
  Tensor grad_input;
  Tensor grad_weights;
  Tensor grad_bias;
};

/// out[b,i,j,f] = bias[f] + sum_{u,v,c} input[b, i*s+u, j*s+v, c] * weights[u,v,c,f].
/// Pass a cache to retain what the backward pass needs.
Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias,
                      std::size_t stride, Conv2dCache* cache = nullptr);

/// Exact analytic gradients of conv2d_forward. Requires the cache of a
/// matching forward pass (IllegalStateError otherwise).
Conv2dGrads conv2d_backward(const Conv2dCache& cache, const Tensor& weights,
                            const Tensor& grad_out);

// ---------------------------------------------------------------------------
// MaxPool2D

struct MaxPoolResult {
  Tensor output;
  // Flat index into the input tensor of each output cell's max. Ties break to
  // the first occurrence in row-major window scan order.
  std::vector<std::size_t> argmax;
  Shape input_shape;
};

MaxPoolResult maxpool_forward(const Tensor& input, std::size_t pool_h, std::size_t pool_w,
                              std::size_t stride);

/// Routes grad_out entries to the recorded argmax positions; everything else
/// is zero. Overlapping windows accumulate.
Tensor maxpool_backward(const MaxPoolResult& cache, const Tensor& grad_out);

// ---------------------------------------------------------------------------
// Dropout (inverted: survivors scaled by 1/(1-rate) so inference is identity)

struct DropoutResult {
  Tensor output;
  Tensor mask;  // elements are 0 or 1/(1-rate); all ones at inference
};

DropoutResult dropout_forward(const Tensor& input, double rate, bool training, Rng& rng);

/// Re-applies a frozen mask; used by the backward pass and by gradient tests.
Tensor dropout_apply_mask(const Tensor& input, const Tensor& mask);

Tensor dropout_backward(const Tensor& mask, const Tensor& grad_out);

// ---------------------------------------------------------------------------
// Dense

struct DenseCache {
  Tensor input;
};

struct DenseGrads {
  Tensor grad_input;
  Tensor grad_weights;
  Tensor grad_bias;
};

/// out = input . weights + bias (bias broadcast over the batch).
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias,
                     DenseCache* cache = nullptr);

DenseGrads dense_backward(const DenseCache& cache, const Tensor& weights, const Tensor& grad_out);

// ---------------------------------------------------------------------------
// Activations

/// relu: max(0,x). sigmoid: 1/(1+e^-x), numerically stable and clamped into
/// the open interval (0,1) for all finite inputs.
Tensor activation_forward(ActivationKind kind, const Tensor& input);

/// relu grad: 1 for x>0, else 0 (0 at exactly 0). sigmoid grad: s(1-s) from
/// the forward output.
Tensor activation_backward(ActivationKind kind, const Tensor& input, const Tensor& output,
                           const Tensor& grad_out);

double sigmoid(double x);

}  // namespace elaspoof

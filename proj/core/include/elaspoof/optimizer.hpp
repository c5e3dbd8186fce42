// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "elaspoof/tensor.hpp"

namespace elaspoof {

/// ADAM moment estimates for one parameter tensor. m and v always share the
/// parameter's shape; v stays elementwise nonnegative; t advances by exactly
/// one per accepted step.
struct AdamState {
  Tensor m;
  Tensor v;
  std::uint64_t t = 0;

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  static AdamState for_param(const Tensor& param) {
    return AdamState{Tensor::zeros(param.shape()), Tensor::zeros(param.shape()), 0};
  }
};

/// One bias-corrected ADAM update:
///   t <- t+1;  m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
///   param <- param - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
/// A non-finite gradient raises NumericError and leaves param and state
/// untouched.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state, double learning_rate);

}  // namespace elaspoof

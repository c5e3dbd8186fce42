// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "elaspoof/tensor.hpp"

namespace elaspoof {

/// Clamp applied to predicted probabilities before the logs; keeps the loss
/// finite without measurably moving any reported metric.
inline constexpr double kProbabilityClamp = 1e-7;

/// Mean binary cross-entropy over a batch:
///   -(1/B) sum_i [ y_i ln p_i + (1-y_i) ln(1-p_i) ]
/// pred and target must both be [B,1]; targets must be exactly 0 or 1
/// (InvalidLabelError otherwise). Predictions are clamped to
/// [kProbabilityClamp, 1-kProbabilityClamp].
double bce_loss(const Tensor& pred, const Tensor& target);

/// Gradient of bce_loss with respect to pred, on the clamped values:
/// (1/B) * (p - y) / (p (1-p)), shape [B,1].
Tensor bce_grad(const Tensor& pred, const Tensor& target);

}  // namespace elaspoof

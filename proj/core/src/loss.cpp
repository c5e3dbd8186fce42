// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/loss.hpp"

#include <cmath>

#include "elaspoof/errors.hpp"

namespace elaspoof {

namespace {

void check_pair(const Tensor& pred, const Tensor& target) {
  if (pred.rank() != 2 || pred.dim(1) != 1)
    throw ShapeMismatchError("bce pred must be [B,1], got " + shape_to_string(pred.shape()));
  if (target.shape() != pred.shape())
    throw ShapeMismatchError("bce target shape " + shape_to_string(target.shape()) +
                             " does not match pred " + shape_to_string(pred.shape()));
  if (pred.dim(0) == 0) throw InvalidArgumentError("bce batch must be nonempty");
  for (double y : target.values())
    if (y != 0.0 && y != 1.0)
      throw InvalidLabelError("bce target must be 0 or 1, got " + std::to_string(y));
}

double clamp_prob(double p) {
  if (p < kProbabilityClamp) return kProbabilityClamp;
  if (p > 1.0 - kProbabilityClamp) return 1.0 - kProbabilityClamp;
  return p;
}

}  // namespace

double bce_loss(const Tensor& pred, const Tensor& target) {
  check_pair(pred, target);
  const std::size_t batch = pred.dim(0);
  double sum = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    const double p = clamp_prob(pred[i]);
    const double y = target[i];
    sum += y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  return -sum / static_cast<double>(batch);
}

Tensor bce_grad(const Tensor& pred, const Tensor& target) {
  check_pair(pred, target);
  const std::size_t batch = pred.dim(0);
  Tensor grad = Tensor::zeros(pred.shape());
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const double p = clamp_prob(pred[i]);
    grad[i] = inv_b * (p - target[i]) / (p * (1.0 - p));
  }
  return grad;
}

}  // namespace elaspoof

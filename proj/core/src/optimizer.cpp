// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/optimizer.hpp"

#include <cmath>

#include "elaspoof/errors.hpp"

namespace elaspoof {

void adam_step(Tensor& param, const Tensor& grad, AdamState& state, double learning_rate) {
  if (param.shape() != grad.shape() || param.shape() != state.m.shape() ||
      param.shape() != state.v.shape())
    throw ShapeMismatchError("adam_step shapes disagree: param " + shape_to_string(param.shape()) +
                             ", grad " + shape_to_string(grad.shape()));
  if (!(learning_rate > 0.0)) throw InvalidArgumentError("learning rate must be > 0");

  for (double g : grad.values())
    if (!std::isfinite(g)) throw NumericError("non-finite gradient, optimizer step aborted");

  state.t += 1;
  const double b1_corr = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(state.t));
  const double b2_corr = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(state.t));

  double* p = param.data();
  double* m = state.m.data();
  double* v = state.v.data();
  const double* g = grad.data();
  const std::size_t count = param.size();
  for (std::size_t i = 0; i < count; ++i) {
    m[i] = AdamState::kBeta1 * m[i] + (1.0 - AdamState::kBeta1) * g[i];
    v[i] = AdamState::kBeta2 * v[i] + (1.0 - AdamState::kBeta2) * g[i] * g[i];
    const double m_hat = m[i] / b1_corr;
    const double v_hat = v[i] / b2_corr;
    p[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + AdamState::kEpsilon);
  }
}

}  // namespace elaspoof

// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/layers.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "elaspoof/errors.hpp"

namespace elaspoof {

namespace {

void require_rank4(const Tensor& t, const char* what) {
  if (t.rank() != 4)
    throw ShapeMismatchError(std::string(what) + " must be rank 4 [B,H,W,C], got " +
                             shape_to_string(t.shape()));
}

// Patch matrix for one sample: row (i,j) holds the window at output position
// (i,j), columns ordered (u,v,c) to line up with the [kh,kw,C,F] weight layout.
void im2col(const double* in, std::size_t h, std::size_t w, std::size_t c, std::size_t kh,
            std::size_t kw, std::size_t stride, std::size_t ho, std::size_t wo, double* col) {
  const std::size_t row_len = kh * kw * c;
  for (std::size_t i = 0; i < ho; ++i) {
    for (std::size_t j = 0; j < wo; ++j) {
      double* dst = col + (i * wo + j) * row_len;
      for (std::size_t u = 0; u < kh; ++u) {
        const double* src = in + ((i * stride + u) * w + j * stride) * c;
        std::memcpy(dst, src, kw * c * sizeof(double));
        dst += kw * c;
      }
    }
  }
}

}  // namespace

void validate_layer_spec(const LayerSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Conv2dSpec>) {
          if (s.out_channels < 1 || s.kernel_h < 1 || s.kernel_w < 1 || s.stride < 1)
            throw InvalidConfigError("conv2d kernel, stride and out_channels must be >= 1");
        } else if constexpr (std::is_same_v<T, MaxPool2dSpec>) {
          if (s.pool_h < 1 || s.pool_w < 1 || s.stride < 1)
            throw InvalidConfigError("maxpool2d pool and stride must be >= 1");
        } else if constexpr (std::is_same_v<T, DropoutSpec>) {
          if (!(s.rate >= 0.0 && s.rate < 1.0))
            throw InvalidConfigError("dropout rate must lie in [0,1)");
        } else if constexpr (std::is_same_v<T, DenseSpec>) {
          if (s.units < 1) throw InvalidConfigError("dense units must be >= 1");
        }
      },
      spec);
}

Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias,
                      std::size_t stride, Conv2dCache* cache) {
  require_rank4(input, "conv2d input");
  if (weights.rank() != 4)
    throw ShapeMismatchError("conv2d weights must be rank 4 [kh,kw,C,F], got " +
                             shape_to_string(weights.shape()));
  const std::size_t batch = input.dim(0), h = input.dim(1), w = input.dim(2), c = input.dim(3);
  const std::size_t kh = weights.dim(0), kw = weights.dim(1), wc = weights.dim(2),
                    filters = weights.dim(3);
  if (stride < 1) throw InvalidArgumentError("conv2d stride must be >= 1");
  if (wc != c)
    throw ShapeMismatchError("conv2d channel mismatch: input has " + std::to_string(c) +
                             ", weights expect " + std::to_string(wc));
  if (bias.rank() != 1 || bias.dim(0) != filters)
    throw ShapeMismatchError("conv2d bias must be [out_channels]");
  if (kh > h || kw > w)
    throw ShapeMismatchError("conv2d kernel " + std::to_string(kh) + "x" + std::to_string(kw) +
                             " larger than input " + std::to_string(h) + "x" + std::to_string(w));

  const std::size_t ho = (h - kh) / stride + 1;
  const std::size_t wo = (w - kw) / stride + 1;
  const std::size_t row_len = kh * kw * c;
  const std::size_t out_rows = ho * wo;

  Tensor out = Tensor::zeros({batch, ho, wo, filters});
  std::vector<double> col(out_rows * row_len);
  for (std::size_t b = 0; b < batch; ++b) {
    const double* in = input.data() + b * h * w * c;
    double* ob = out.data() + b * out_rows * filters;
    im2col(in, h, w, c, kh, kw, stride, ho, wo, col.data());
    detail::gemm(col.data(), weights.data(), ob, out_rows, row_len, filters);
    const double* bp = bias.data();
    for (std::size_t r = 0; r < out_rows; ++r) {
      double* orow = ob + r * filters;
      for (std::size_t f = 0; f < filters; ++f) orow[f] += bp[f];
    }
  }

  if (cache) {
    cache->input = input;
    cache->stride = stride;
  }
  return out;
}

Conv2dGrads conv2d_backward(const Conv2dCache& cache, const Tensor& weights,
                            const Tensor& grad_out) {
  if (cache.input.empty())
    throw IllegalStateError("conv2d backward requires the cache of a forward pass");
  const Tensor& input = cache.input;
  const std::size_t stride = cache.stride;
  const std::size_t batch = input.dim(0), h = input.dim(1), w = input.dim(2), c = input.dim(3);
  const std::size_t kh = weights.dim(0), kw = weights.dim(1), filters = weights.dim(3);
  const std::size_t ho = (h - kh) / stride + 1;
  const std::size_t wo = (w - kw) / stride + 1;
  if (grad_out.shape() != Shape{batch, ho, wo, filters})
    throw ShapeMismatchError("conv2d grad_out shape " + shape_to_string(grad_out.shape()) +
                             " does not match forward output");

  const std::size_t row_len = kh * kw * c;
  const std::size_t out_rows = ho * wo;

  Conv2dGrads grads{Tensor::zeros(input.shape()), Tensor::zeros(weights.shape()),
                    Tensor::zeros({filters})};

  // grad_bias: plain sum over batch and positions.
  {
    const double* g = grad_out.data();
    double* gb = grads.grad_bias.data();
    for (std::size_t r = 0; r < batch * out_rows; ++r)
      for (std::size_t f = 0; f < filters; ++f) gb[f] += g[r * filters + f];
  }

  std::vector<double> col(out_rows * row_len);
  std::vector<double> grad_col(out_rows * row_len);
  for (std::size_t b = 0; b < batch; ++b) {
    const double* in = input.data() + b * h * w * c;
    const double* gb = grad_out.data() + b * out_rows * filters;

    // grad_weights += im2col(x_b)^T . grad_out_b, batch index ascending.
    im2col(in, h, w, c, kh, kw, stride, ho, wo, col.data());
    detail::gemm_tn_acc(col.data(), gb, grads.grad_weights.data(), out_rows, row_len, filters);

    // grad_input_b = col2im(grad_out_b . W^T)
    detail::gemm_nt(gb, weights.data(), grad_col.data(), out_rows, filters, row_len);
    double* gi = grads.grad_input.data() + b * h * w * c;
    for (std::size_t i = 0; i < ho; ++i) {
      for (std::size_t j = 0; j < wo; ++j) {
        const double* src = grad_col.data() + (i * wo + j) * row_len;
        for (std::size_t u = 0; u < kh; ++u) {
          double* dst = gi + ((i * stride + u) * w + j * stride) * c;
          const double* s = src + u * kw * c;
          for (std::size_t t = 0; t < kw * c; ++t) dst[t] += s[t];
        }
      }
    }
  }
  return grads;
}

MaxPoolResult maxpool_forward(const Tensor& input, std::size_t pool_h, std::size_t pool_w,
                              std::size_t stride) {
  require_rank4(input, "maxpool input");
  if (pool_h < 1 || pool_w < 1 || stride < 1)
    throw InvalidArgumentError("maxpool pool and stride must be >= 1");
  const std::size_t batch = input.dim(0), h = input.dim(1), w = input.dim(2), c = input.dim(3);
  if (pool_h > h || pool_w > w)
    throw ShapeMismatchError("maxpool window " + std::to_string(pool_h) + "x" +
                             std::to_string(pool_w) + " larger than input " + std::to_string(h) +
                             "x" + std::to_string(w));
  const std::size_t ho = (h - pool_h) / stride + 1;
  const std::size_t wo = (w - pool_w) / stride + 1;

  MaxPoolResult result{Tensor::zeros({batch, ho, wo, c}), {}, input.shape()};
  result.argmax.resize(batch * ho * wo * c);

  const double* in = input.data();
  double* out = result.output.data();
  std::size_t* am = result.argmax.data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < ho; ++i) {
      for (std::size_t j = 0; j < wo; ++j) {
        for (std::size_t ch = 0; ch < c; ++ch) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_idx = 0;
          for (std::size_t u = 0; u < pool_h; ++u) {
            for (std::size_t v = 0; v < pool_w; ++v) {
              const std::size_t idx =
                  ((b * h + i * stride + u) * w + j * stride + v) * c + ch;
              if (in[idx] > best) {  // strict: first occurrence wins ties
                best = in[idx];
                best_idx = idx;
              }
            }
          }
          const std::size_t o = ((b * ho + i) * wo + j) * c + ch;
          out[o] = best;
          am[o] = best_idx;
        }
      }
    }
  }
  return result;
}

Tensor maxpool_backward(const MaxPoolResult& cache, const Tensor& grad_out) {
  if (grad_out.shape() != cache.output.shape())
    throw ShapeMismatchError("maxpool grad_out shape " + shape_to_string(grad_out.shape()) +
                             " does not match forward output " +
                             shape_to_string(cache.output.shape()));
  Tensor grad_input = Tensor::zeros(cache.input_shape);
  const double* g = grad_out.data();
  double* gi = grad_input.data();
  for (std::size_t o = 0; o < cache.argmax.size(); ++o) gi[cache.argmax[o]] += g[o];
  return grad_input;
}

DropoutResult dropout_forward(const Tensor& input, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw InvalidArgumentError("dropout rate must lie in [0,1), got " + std::to_string(rate));
  DropoutResult result{input, Tensor::filled(input.shape(), 1.0)};
  if (!training || rate == 0.0) return result;

  const double keep_scale = 1.0 / (1.0 - rate);
  double* mask = result.mask.data();
  double* out = result.output.data();
  const std::size_t count = input.size();
  for (std::size_t i = 0; i < count; ++i) {
    if (rng.next_double() < rate) {
      mask[i] = 0.0;
      out[i] = 0.0;
    } else {
      mask[i] = keep_scale;
      out[i] *= keep_scale;
    }
  }
  return result;
}

Tensor dropout_apply_mask(const Tensor& input, const Tensor& mask) {
  if (input.shape() != mask.shape())
    throw ShapeMismatchError("dropout mask shape does not match input");
  Tensor out = input;
  const double* m = mask.data();
  double* o = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) o[i] *= m[i];
  return out;
}

Tensor dropout_backward(const Tensor& mask, const Tensor& grad_out) {
  return dropout_apply_mask(grad_out, mask);
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias,
                     DenseCache* cache) {
  if (input.rank() != 2)
    throw ShapeMismatchError("dense input must be rank 2 [B,features], got " +
                             shape_to_string(input.shape()));
  if (weights.rank() != 2 || weights.dim(0) != input.dim(1))
    throw ShapeMismatchError("dense weights " + shape_to_string(weights.shape()) +
                             " incompatible with input " + shape_to_string(input.shape()));
  const std::size_t batch = input.dim(0), features = input.dim(1), units = weights.dim(1);
  if (bias.rank() != 1 || bias.dim(0) != units)
    throw ShapeMismatchError("dense bias must be [units]");

  Tensor out = Tensor::zeros({batch, units});
  detail::gemm(input.data(), weights.data(), out.data(), batch, features, units);
  const double* bp = bias.data();
  double* op = out.data();
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t u = 0; u < units; ++u) op[b * units + u] += bp[u];

  if (cache) cache->input = input;
  return out;
}

DenseGrads dense_backward(const DenseCache& cache, const Tensor& weights, const Tensor& grad_out) {
  if (cache.input.empty())
    throw IllegalStateError("dense backward requires the cache of a forward pass");
  const Tensor& input = cache.input;
  const std::size_t batch = input.dim(0), features = input.dim(1), units = weights.dim(1);
  if (grad_out.shape() != Shape{batch, units})
    throw ShapeMismatchError("dense grad_out shape " + shape_to_string(grad_out.shape()) +
                             " does not match forward output");

  DenseGrads grads{Tensor::zeros(input.shape()), Tensor::zeros(weights.shape()),
                   Tensor::zeros({units})};
  // grad_W = X^T . G, grad_X = G . W^T, grad_b = column sums of G.
  detail::gemm_tn_acc(input.data(), grad_out.data(), grads.grad_weights.data(), batch, features,
                      units);
  detail::gemm_nt(grad_out.data(), weights.data(), grads.grad_input.data(), batch, units,
                  features);
  const double* g = grad_out.data();
  double* gb = grads.grad_bias.data();
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t u = 0; u < units; ++u) gb[u] += g[b * units + u];
  return grads;
}

double sigmoid(double x) {
  // Stable in both tails, then clamped so every finite input maps strictly
  // inside (0,1).
  double s;
  if (x >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return s < lo ? lo : (s > hi ? hi : s);
}

Tensor activation_forward(ActivationKind kind, const Tensor& input) {
  if (kind == ActivationKind::kRelu) return map(input, [](double x) { return x > 0.0 ? x : 0.0; });
  return map(input, sigmoid);
}

Tensor activation_backward(ActivationKind kind, const Tensor& input, const Tensor& output,
                           const Tensor& grad_out) {
  if (grad_out.shape() != input.shape())
    throw ShapeMismatchError("activation grad_out shape does not match input");
  Tensor grad = grad_out;
  double* g = grad.data();
  const std::size_t count = grad.size();
  if (kind == ActivationKind::kRelu) {
    const double* x = input.data();
    for (std::size_t i = 0; i < count; ++i)
      if (x[i] <= 0.0) g[i] = 0.0;
  } else {
    const double* s = output.data();
    for (std::size_t i = 0; i < count; ++i) g[i] *= s[i] * (1.0 - s[i]);
  }
  return grad;
}

}  // namespace elaspoof

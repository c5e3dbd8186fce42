// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: the im2col convolution that dominates
// training time, whole-network passes, and the JPEG-based preprocessing.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "elaspoof/ela.hpp"
#include "elaspoof/image.hpp"
#include "elaspoof/layers.hpp"
#include "elaspoof/loss.hpp"
#include "elaspoof/model.hpp"
#include "elaspoof/rng.hpp"
#include "elaspoof/tensor.hpp"

namespace {

using namespace elaspoof;

Tensor random_tensor(const Shape& shape, Rng& rng, double lo, double hi) {
  Tensor t = Tensor::zeros(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.next_double(lo, hi);
  return t;
}

RawImage random_image(std::size_t side, Rng& rng) {
  RawImage image;
  image.height = side;
  image.width = side;
  image.data.resize(3 * side * side);
  for (auto& value : image.data) {
    value = static_cast<std::uint8_t>(rng.next_below(256));
  }
  return image;
}

// First convolution of the default model: 5x5x3 -> 32 filters, stride 1.
void Conv2dForward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  Rng rng = Rng::for_stream(1, RngStream::kSynthetic);
  const Tensor input = random_tensor({1, side, side, 3}, rng, 0.0, 1.0);
  const Tensor weights = random_tensor({5, 5, 3, 32}, rng, -0.1, 0.1);
  const Tensor bias = Tensor::zeros({32});
  for (auto _ : state) {
    Tensor out = conv2d_forward(input, weights, bias, 1);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>((side - 4) * (side - 4) * 32 * 75));
}
BENCHMARK(Conv2dForward)->Arg(64)->Arg(128);

void Conv2dBackward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  Rng rng = Rng::for_stream(2, RngStream::kSynthetic);
  const Tensor input = random_tensor({1, side, side, 3}, rng, 0.0, 1.0);
  const Tensor weights = random_tensor({5, 5, 3, 32}, rng, -0.1, 0.1);
  const Tensor bias = Tensor::zeros({32});
  Conv2dCache cache;
  const Tensor out = conv2d_forward(input, weights, bias, 1, &cache);
  const Tensor grad_out = random_tensor(out.shape(), rng, -1.0, 1.0);
  for (auto _ : state) {
    Conv2dGrads grads = conv2d_backward(cache, weights, grad_out);
    benchmark::DoNotOptimize(grads.grad_input.data());
  }
}
BENCHMARK(Conv2dBackward)->Arg(64)->Arg(128);

void DenseForward(benchmark::State& state) {
  Rng rng = Rng::for_stream(3, RngStream::kSynthetic);
  const Tensor input = random_tensor({32, 26912}, rng, 0.0, 1.0);
  const Tensor weights = random_tensor({26912, 256}, rng, -0.01, 0.01);
  const Tensor bias = Tensor::zeros({256});
  for (auto _ : state) {
    Tensor out = dense_forward(input, weights, bias);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(DenseForward);

void NetworkInference(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  Network network(default_model_config(side));
  network.init_parameters(7);
  Rng rng = Rng::for_stream(4, RngStream::kSynthetic);
  const Tensor input = random_tensor({1, side, side, 3}, rng, 0.0, 1.0);
  for (auto _ : state) {
    Tensor out = network.forward_inference(input);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(NetworkInference)->Arg(64)->Arg(128);

// One optimizer-free training step: stochastic forward, loss gradient,
// full backward pass.
void NetworkTrainingStep(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  Network network(default_model_config(side));
  network.init_parameters(7);
  Rng data_rng = Rng::for_stream(5, RngStream::kSynthetic);
  Rng dropout_rng = Rng::for_stream(5, RngStream::kDropout);
  const Tensor input = random_tensor({8, side, side, 3}, data_rng, 0.0, 1.0);
  Tensor labels = Tensor::zeros({8, 1});
  for (std::size_t i = 0; i < 8; ++i) labels.data()[i] = static_cast<double>(i % 2);
  for (auto _ : state) {
    const Tensor pred = network.forward_training(input, dropout_rng);
    network.backward(bce_grad(pred, labels));
    benchmark::DoNotOptimize(network.parameters().front().grad);
  }
}
BENCHMARK(NetworkTrainingStep)->Arg(64);

void ElaTransform(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  Rng rng = Rng::for_stream(6, RngStream::kSynthetic);
  const RawImage image = random_image(side, rng);
  const ElaConfig config;  // quality 90, auto amplification
  for (auto _ : state) {
    RawImage map = ela_transform(image, config);
    benchmark::DoNotOptimize(map.data.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(image.data.size()));
}
BENCHMARK(ElaTransform)->Arg(128)->Arg(256)->Arg(512);

void NoiseScore(benchmark::State& state) {
  Rng rng = Rng::for_stream(7, RngStream::kSynthetic);
  const RawImage image = random_image(256, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(noise_score(image));
  }
}
BENCHMARK(NoiseScore);

void ResizeNormalize(benchmark::State& state) {
  Rng rng = Rng::for_stream(8, RngStream::kSynthetic);
  const RawImage image = random_image(512, rng);
  for (auto _ : state) {
    Tensor features = resize_normalize(image, 128);
    benchmark::DoNotOptimize(features.data());
  }
}
BENCHMARK(ResizeNormalize);

}  // namespace

BENCHMARK_MAIN();

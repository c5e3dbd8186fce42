// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/ela.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "elaspoof/errors.hpp"

namespace elaspoof {
namespace {

void require_valid(const RawImage& image, const char* op) {
  if (image.height < 1 || image.width < 1 ||
      image.data.size() != 3 * image.height * image.width) {
    throw InvalidArgumentError(std::string(op) +
                               ": image must be nonempty 8-bit RGB with data length "
                               "3*height*width");
  }
}

}  // namespace

void ElaConfig::validate() const {
  if (jpeg_quality < 1 || jpeg_quality > 100) {
    throw InvalidConfigError("ELA jpeg_quality must lie in [1,100], got " +
                             std::to_string(jpeg_quality));
  }
  if (amplification && (!(*amplification > 0.0) || !std::isfinite(*amplification))) {
    throw InvalidConfigError("ELA amplification must be a positive finite multiplier");
  }
  if (target_size < 1) {
    throw InvalidConfigError("ELA target_size must be >= 1");
  }
}

RawImage ela_transform(const RawImage& image, const ElaConfig& config) {
  require_valid(image, "ela_transform");
  config.validate();

  const std::vector<std::uint8_t> reencoded = encode_jpeg(image, config.jpeg_quality);
  const RawImage decoded = decode_jpeg(reencoded.data(), reencoded.size());
  if (decoded.height != image.height || decoded.width != image.width) {
    throw ProcessingError("JPEG round-trip changed image dimensions");
  }

  std::vector<int> diff(image.data.size());
  int max_diff = 0;
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    diff[i] = std::abs(static_cast<int>(image.data[i]) - static_cast<int>(decoded.data[i]));
    max_diff = std::max(max_diff, diff[i]);
  }

  double amplification;
  if (config.amplification) {
    amplification = *config.amplification;
  } else {
    amplification = max_diff == 0 ? 0.0 : 255.0 / static_cast<double>(max_diff);
  }

  RawImage out;
  out.height = image.height;
  out.width = image.width;
  out.data.resize(image.data.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const long amplified = std::lround(static_cast<double>(diff[i]) * amplification);
    out.data[i] = static_cast<std::uint8_t>(std::clamp(amplified, 0L, 255L));
  }
  return out;
}

double noise_score(const RawImage& image) {
  require_valid(image, "noise_score");
  const std::size_t h = image.height;
  const std::size_t w = image.width;

  std::vector<double> gray(h * w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      gray[y * w + x] = 0.299 * image.at(y, x, 0) + 0.587 * image.at(y, x, 1) +
                        0.114 * image.at(y, x, 2);
    }
  }

  // 3x3 median with replicated borders.
  double deviation_sum = 0.0;
  double window[9];
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const auto yy = static_cast<std::size_t>(
              std::clamp<long>(static_cast<long>(y) + dy, 0, static_cast<long>(h) - 1));
          const auto xx = static_cast<std::size_t>(
              std::clamp<long>(static_cast<long>(x) + dx, 0, static_cast<long>(w) - 1));
          window[n++] = gray[yy * w + xx];
        }
      }
      std::nth_element(window, window + 4, window + 9);
      deviation_sum += std::abs(gray[y * w + x] - window[4]);
    }
  }
  return deviation_sum / static_cast<double>(h * w);
}

Tensor resize_normalize(const RawImage& image, std::size_t target) {
  require_valid(image, "resize_normalize");
  if (target < 1) throw InvalidArgumentError("resize_normalize: target must be >= 1");

  const std::size_t h = image.height;
  const std::size_t w = image.width;
  Tensor out = Tensor::zeros({target, target, 3});
  double* dst = out.data();

  const double scale_y = static_cast<double>(h) / static_cast<double>(target);
  const double scale_x = static_cast<double>(w) / static_cast<double>(target);
  for (std::size_t ty = 0; ty < target; ++ty) {
    // Half-pixel-center mapping: output cell centers sample input cell centers.
    const double sy =
        std::clamp((static_cast<double>(ty) + 0.5) * scale_y - 0.5, 0.0,
                   static_cast<double>(h - 1));
    const auto y0 = static_cast<std::size_t>(sy);
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t tx = 0; tx < target; ++tx) {
      const double sx =
          std::clamp((static_cast<double>(tx) + 0.5) * scale_x - 0.5, 0.0,
                     static_cast<double>(w - 1));
      const auto x0 = static_cast<std::size_t>(sx);
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double fx = sx - static_cast<double>(x0);
      for (std::size_t c = 0; c < 3; ++c) {
        const double top = (1.0 - fx) * image.at(y0, x0, c) + fx * image.at(y0, x1, c);
        const double bottom = (1.0 - fx) * image.at(y1, x0, c) + fx * image.at(y1, x1, c);
        dst[(ty * target + tx) * 3 + c] = ((1.0 - fy) * top + fy * bottom) / 255.0;
      }
    }
  }
  return out;
}

}  // namespace elaspoof

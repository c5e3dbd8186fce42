// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "elaspoof/image.hpp"
#include "elaspoof/tensor.hpp"

namespace elaspoof {

/// Error-level-analysis settings. Amplification is either a fixed positive
/// multiplier or automatic: scale so the largest channel difference maps to
/// exactly 255 (an identically-zero difference stays all zeros).
struct ElaConfig {
  int jpeg_quality = 90;                    // 1..100
  std::optional<double> amplification;      // nullopt = auto
  std::size_t target_size = 128;            // network input side length

  void validate() const;
};

/// Re-encodes the image as JPEG at cfg.jpeg_quality, decodes it, takes the
/// per-pixel per-channel absolute difference against the input, amplifies and
/// clamps to [0,255]. Output dimensions always equal input dimensions.
RawImage ela_transform(const RawImage& image, const ElaConfig& config);

/// Noise screening score: mean absolute deviation between the grayscale image
/// and its 3x3 median-filtered version (replicated borders). Zero for
/// constant images; higher means noisier.
double noise_score(const RawImage& image);

/// Default threshold above which a sample is flagged as noisy in screening
/// reports.
inline constexpr double kDefaultNoiseThreshold = 12.0;

/// Bilinear resize to target x target, then scale into [0,1].
/// Returns a [target, target, 3] tensor.
Tensor resize_normalize(const RawImage& image, std::size_t target);

}  // namespace elaspoof

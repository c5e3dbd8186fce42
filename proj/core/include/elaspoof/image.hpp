// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace elaspoof {

/// 8-bit RGB image, row-major, three bytes per pixel.
struct RawImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> data;  // length 3*height*width

  std::uint8_t& at(std::size_t y, std::size_t x, std::size_t c) {
    return data[(y * width + x) * 3 + c];
  }
  std::uint8_t at(std::size_t y, std::size_t x, std::size_t c) const {
    return data[(y * width + x) * 3 + c];
  }
};

/// Decodes a JPEG or PNG file to 8-bit RGB. Grayscale is expanded to three
/// channels, alpha is dropped, 16-bit PNG is reduced to 8-bit. Unreadable or
/// undecodable files raise DecodeError carrying the path.
RawImage decode_image(const std::string& path);

/// JPEG round-trip in memory, quality in [1,100].
std::vector<std::uint8_t> encode_jpeg(const RawImage& image, int quality);
RawImage decode_jpeg(const std::uint8_t* bytes, std::size_t size);

void write_jpeg(const RawImage& image, const std::string& path, int quality);
void write_png(const RawImage& image, const std::string& path);

}  // namespace elaspoof

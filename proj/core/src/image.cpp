// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/image.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "elaspoof/errors.hpp"

namespace elaspoof {
namespace {

void validate_raw(const RawImage& image, const char* op) {
  if (image.height < 1 || image.width < 1 ||
      image.data.size() != 3 * image.height * image.width) {
    throw InvalidArgumentError(std::string(op) + ": image must be nonempty 8-bit RGB with " +
                               "data length 3*height*width");
  }
}

// --- libjpeg plumbing -------------------------------------------------------
// libjpeg's default error handler exits the process; this one records the
// message and longjmps back so we can throw. Warnings are swallowed to keep
// the CLI's error stream machine-greppable.

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit_fn(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_output_silent(j_common_ptr) {}

void install_jpeg_handler(jpeg_error_mgr*& slot, JpegErrorMgr& err) {
  slot = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit_fn;
  err.pub.output_message = jpeg_output_silent;
  err.message[0] = '\0';
}

// --- libpng plumbing --------------------------------------------------------

struct PngMemReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t count) {
  auto* reader = static_cast<PngMemReader*>(png_get_io_ptr(png));
  if (reader->size - reader->pos < count) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, reader->data + reader->pos, count);
  reader->pos += count;
}

void png_error_fn(png_structp png, png_const_charp message) {
  auto* errmsg = static_cast<std::string*>(png_get_error_ptr(png));
  if (errmsg) *errmsg = message;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

bool looks_like_png(const std::uint8_t* bytes, std::size_t size) {
  return size >= 8 && png_sig_cmp(bytes, 0, 8) == 0;
}

bool looks_like_jpeg(const std::uint8_t* bytes, std::size_t size) {
  return size >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

RawImage decode_png(const std::uint8_t* bytes, std::size_t size) {
  std::string errmsg;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &errmsg, png_error_fn, png_warning_fn);
  if (!png) throw ProcessingError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw ProcessingError("png_create_info_struct failed");
  }

  PngMemReader reader{bytes, size, 0};
  RawImage image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError(errmsg.empty() ? "PNG decode failed" : errmsg);
  }

  png_set_read_fn(png, &reader, png_mem_read);
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_strip_16(png);
  if ((color_type & PNG_COLOR_MASK_ALPHA) != 0 || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_read_update_info(png, info);

  image.height = png_get_image_height(png, info);
  image.width = png_get_image_width(png, info);
  if (image.height < 1 || image.width < 1 ||
      png_get_rowbytes(png, info) != image.width * 3) {
    png_error(png, "PNG did not reduce to 8-bit RGB");
  }
  image.data.resize(3 * image.height * image.width);
  rows.resize(image.height);
  for (std::size_t y = 0; y < image.height; ++y) {
    rows[y] = image.data.data() + y * image.width * 3;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError(path + ": cannot open file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw DecodeError(path + ": read failed");
  return bytes;
}

}  // namespace

RawImage decode_jpeg(const std::uint8_t* bytes, std::size_t size) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr jerr;
  install_jpeg_handler(cinfo.err, jerr);

  RawImage image;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError(jerr.message[0] ? jerr.message : "JPEG decode failed");
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, const_cast<unsigned char*>(bytes), static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;  // grayscale/YCbCr both land on 8-bit RGB
  jpeg_start_decompress(&cinfo);

  image.height = cinfo.output_height;
  image.width = cinfo.output_width;
  image.data.resize(3 * image.height * image.width);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = image.data.data() +
                   static_cast<std::size_t>(cinfo.output_scanline) * image.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return image;
}

std::vector<std::uint8_t> encode_jpeg(const RawImage& image, int quality) {
  validate_raw(image, "encode_jpeg");
  if (quality < 1 || quality > 100) {
    throw InvalidArgumentError("encode_jpeg: quality must lie in [1,100], got " +
                               std::to_string(quality));
  }

  jpeg_compress_struct cinfo;
  JpegErrorMgr jerr;
  install_jpeg_handler(cinfo.err, jerr);

  unsigned char* out_buf = nullptr;
  unsigned long out_size = 0;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(out_buf);
    throw ProcessingError(jerr.message[0] ? jerr.message : "JPEG encode failed");
  }

  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &out_buf, &out_size);
  cinfo.image_width = static_cast<JDIMENSION>(image.width);
  cinfo.image_height = static_cast<JDIMENSION>(image.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(
        image.data.data() + static_cast<std::size_t>(cinfo.next_scanline) * image.width * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  std::vector<std::uint8_t> bytes(out_buf, out_buf + out_size);
  std::free(out_buf);
  return bytes;
}

RawImage decode_image(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  try {
    if (looks_like_jpeg(bytes.data(), bytes.size())) {
      return decode_jpeg(bytes.data(), bytes.size());
    }
    if (looks_like_png(bytes.data(), bytes.size())) {
      return decode_png(bytes.data(), bytes.size());
    }
  } catch (const DecodeError& e) {
    throw DecodeError(path + ": " + e.what());
  }
  throw DecodeError(path + ": not a JPEG or PNG file");
}

void write_jpeg(const RawImage& image, const std::string& path, int quality) {
  const std::vector<std::uint8_t> bytes = encode_jpeg(image, quality);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing JPEG to '" + path + "'");
}

void write_png(const RawImage& image, const std::string& path) {
  validate_raw(image, "write_png");
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open '" + path + "' for writing");

  std::string errmsg;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &errmsg, png_error_fn, png_warning_fn);
  if (!png) {
    std::fclose(fp);
    throw ProcessingError("png_create_write_struct failed");
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    std::fclose(fp);
    throw ProcessingError("png_create_info_struct failed");
  }

  std::vector<png_bytep> rows(image.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("failed writing PNG to '" + path + "'" +
                  (errmsg.empty() ? "" : ": " + errmsg));
  }

  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < image.height; ++y) {
    rows[y] = const_cast<png_bytep>(image.data.data() + y * image.width * 3);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw IoError("failed closing '" + path + "'");
}

}  // namespace elaspoof

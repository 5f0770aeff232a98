// Copyright 2026 The armaseg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <png.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>

#include "armaseg/errors.hpp"
#include "armaseg/io.hpp"

namespace armaseg {

namespace {

std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path, "cannot open image");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// Cursor over a PNM header: whitespace-separated tokens with '#' comments.
class PnmHeader {
 public:
  PnmHeader(const std::vector<unsigned char>& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  long next_int(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw FormatError(path_, std::string("malformed PGM header at ") + what);
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1L << 30)) throw FormatError(path_, "PGM header value too large");
    }
    return v;
  }

  // Binary rasters start after exactly one whitespace byte.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError(path_, "missing whitespace before PGM raster");
    }
    return pos_ + 1;
  }

  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  const std::string& path_;
  std::size_t pos_ = 2;
};

}  // namespace

GrayImage read_pgm(const std::string& path) {
  const auto bytes = slurp(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw FormatError(path, "not a PGM file (expected P5 or P2)");
  }
  const bool binary = bytes[1] == '5';
  PnmHeader h(bytes, path);
  const long width = h.next_int("width");
  const long height = h.next_int("height");
  const long maxval = h.next_int("maxval");
  if (width <= 0 || height <= 0) throw FormatError(path, "empty PGM image");
  if (maxval <= 0 || maxval > 65535) throw FormatError(path, "invalid PGM maxval");

  GrayImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  const std::size_t count = static_cast<std::size_t>(width) * height;
  img.pixels.resize(count);
  auto to8 = [maxval](long v) {
    return static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval);
  };

  if (binary) {
    const std::size_t start = h.raster_start();
    const std::size_t sample = maxval > 255 ? 2 : 1;
    if (bytes.size() < start + count * sample) {
      throw FormatError(path, "truncated PGM raster");
    }
    for (std::size_t i = 0; i < count; ++i) {
      long v = bytes[start + i * sample];
      if (sample == 2) v = (v << 8) | bytes[start + i * sample + 1];
      if (v > maxval) throw FormatError(path, "PGM sample exceeds maxval");
      img.pixels[i] = to8(v);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = h.next_int("sample");
      if (v > maxval) throw FormatError(path, "PGM sample exceeds maxval");
      img.pixels[i] = to8(v);
    }
  }
  return img;
}

void write_pgm(const std::string& path, const GrayImage& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw ShapeError("write_pgm: pixel buffer does not match dimensions");
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError(path, "cannot open for writing");
  os << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(image.pixels.data()),
           static_cast<std::streamsize>(image.pixels.size()));
  if (!os) throw FormatError(path, "write failed");
}

GrayImage read_png(const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "rb"),
                                                     &std::fclose);
  if (!fp) throw FormatError(path, "cannot open image");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path, "not a PNG file");
  }
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw FormatError(path, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw FormatError(path, "libpng initialisation failed");
  }

  GrayImage img;
  std::vector<png_bytep> rows;
  // libpng reports errors through longjmp; nothing with a destructor may be
  // created between setjmp and the end of decoding except what is declared
  // above.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path, "corrupt PNG data");
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE) {
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  }
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<png_size_t>(img.width)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path, "unsupported PNG pixel layout");
  }
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  rows.resize(static_cast<std::size_t>(img.height));
  for (int r = 0; r < img.height; ++r) {
    rows[r] = img.pixels.data() + static_cast<std::size_t>(r) * img.width;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

GrayImage read_gray_image(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path, "cannot open image");
  char sig[2] = {0, 0};
  is.read(sig, 2);
  if (sig[0] == 'P' && (sig[1] == '5' || sig[1] == '2')) return read_pgm(path);
  if (static_cast<unsigned char>(sig[0]) == 0x89 && sig[1] == 'P') {
    return read_png(path);
  }
  throw FormatError(path, "unrecognised image format (expected PGM or PNG)");
}

}  // namespace armaseg

// Copyright 2026 The gaussot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gaussot/image_io.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gaussot/error.h"

namespace gaussot {
namespace {

// Frees libpng's internal state on every exit path.
class PngImage {
 public:
  PngImage() {
    image_ = {};
    image_.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image_); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;

  png_image* get() { return &image_; }
  png_image* operator->() { return &image_; }

 private:
  png_image image_;
};

}  // namespace

PixelImage read_image(const std::filesystem::path& path) {
  PngImage png;
  if (!png_image_begin_read_from_file(png.get(), path.c_str())) {
    throw FormatError(FormatErrorCode::kUnsupportedImage,
                      path.string() + ": " + png->message);
  }
  png->format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(*png.get()));
  if (!png_image_finish_read(png.get(), nullptr, buffer.data(), 0, nullptr)) {
    throw FormatError(FormatErrorCode::kUnsupportedImage,
                      path.string() + ": " + png->message);
  }
  PixelImage image;
  image.width = static_cast<int>(png->width);
  image.height = static_cast<int>(png->height);
  const Eigen::Index n = static_cast<Eigen::Index>(image.width) * image.height;
  image.rgb.resize(n, 3);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (int c = 0; c < 3; ++c) {
      image.rgb(p, c) = buffer[static_cast<std::size_t>(3 * p + c)] / 255.0;
    }
  }
  return image;
}

void write_image(const std::filesystem::path& path, const PixelImage& image) {
  const Eigen::Index n = static_cast<Eigen::Index>(image.width) * image.height;
  if (image.width < 1 || image.height < 1 || image.rgb.rows() != n ||
      image.rgb.cols() != 3) {
    throw DimensionError("image buffer does not match its width and height");
  }
  std::vector<png_byte> buffer(static_cast<std::size_t>(3 * n));
  for (Eigen::Index p = 0; p < n; ++p) {
    for (int c = 0; c < 3; ++c) {
      const double v = std::clamp(image.rgb(p, c), 0.0, 1.0);
      buffer[static_cast<std::size_t>(3 * p + c)] =
          static_cast<png_byte>(std::lround(v * 255.0));
    }
  }
  PngImage png;
  png->width = static_cast<png_uint_32>(image.width);
  png->height = static_cast<png_uint_32>(image.height);
  png->format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(png.get(), path.c_str(), 0, buffer.data(), 0,
                               nullptr)) {
    throw FormatError(FormatErrorCode::kIo,
                      path.string() + ": " + png->message);
  }
}

}  // namespace gaussot

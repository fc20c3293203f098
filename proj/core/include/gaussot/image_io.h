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

#ifndef GAUSSOT_IMAGE_IO_H_
#define GAUSSOT_IMAGE_IO_H_

#include <filesystem>

#include "gaussot/gaussian_ot.h"

namespace gaussot {

// RGB image with channel values nominally in [0, 1]. Values outside that
// range are allowed in memory and clamped when written.
struct PixelImage {
  int width = 0;
  int height = 0;
  RowMatrix rgb;  // (height * width) x 3, row-major pixel order
};

// Reads an 8-bit PNG (gray, palette and alpha are converted to RGB) and maps
// each channel by v / 255.
PixelImage read_image(const std::filesystem::path& path);

// Writes an 8-bit RGB PNG, quantizing round(clamp(v, 0, 1) * 255).
void write_image(const std::filesystem::path& path, const PixelImage& image);

}  // namespace gaussot

#endif  // GAUSSOT_IMAGE_IO_H_

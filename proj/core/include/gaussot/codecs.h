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

// Feature codecs: the encode/decode pair between images and sample
// matrices. A codec exposes R levels; level 1 is the finest and level R the
// coarsest.

#ifndef GAUSSOT_CODECS_H_
#define GAUSSOT_CODECS_H_

#include <concepts>
#include <functional>

#include "gaussot/gaussian_ot.h"
#include "gaussot/image_io.h"
#include "gaussot/tensor_io.h"

namespace gaussot {

struct Encoded {
  SampleMatrix samples;
  FeatureShape shape;
};

template <typename Image>
struct Decoded {
  Image image;
  // Fraction of decoded samples that had to be clamped into range.
  double clamp_fraction = 0.0;
};

template <typename C>
concept FeatureCodec = requires(C& codec, const typename C::Image& image,
                                const SampleMatrix& samples,
                                const FeatureShape& shape, int level) {
  { codec.levels() } -> std::convertible_to<int>;
  { codec.encode(level, image) } -> std::same_as<Encoded>;
  { codec.decode(level, samples, shape) }
      -> std::same_as<Decoded<typename C::Image>>;
};

// Single-level codec on RGB pixels (m = 3). Encoding is exact; decoding
// clamps to [0, 1] and reports the fraction of pixels with any channel out
// of range.
class PixelCodec {
 public:
  using Image = PixelImage;

  int levels() const { return 1; }
  Encoded encode(int level, const PixelImage& image) const;
  Decoded<PixelImage> decode(int level, const SampleMatrix& samples,
                             const FeatureShape& shape) const;
};

// Codec backed by tensor files listed in a Manifest. Neural encoding and
// decoding happen out of process: `decode` writes the level's output tensor,
// and before a decoded result is re-encoded at another level the bridge
// callback runs so it can refresh that level's input tensor.
class FileTensorCodec {
 public:
  struct Image {
    int style = -1;       // index into ManifestLevel::styles; -1 = content
    int decoded_at = 0;   // level whose output this image came from, or 0
  };
  using Bridge = std::function<void(int decoded_level, int next_level)>;

  explicit FileTensorCodec(Manifest manifest, Bridge bridge = {});

  int levels() const { return manifest_.depth(); }
  const Manifest& manifest() const { return manifest_; }

  Encoded encode(int level, const Image& image);
  Decoded<Image> decode(int level, const SampleMatrix& samples,
                        const FeatureShape& shape);

 private:
  Manifest manifest_;
  Bridge bridge_;
};

static_assert(FeatureCodec<PixelCodec>);
static_assert(FeatureCodec<FileTensorCodec>);

}  // namespace gaussot

#endif  // GAUSSOT_CODECS_H_

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

#include "gaussot/tensor_io.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "gaussot/error.h"
#include "gaussot/image_io.h"
#include "gtest/gtest.h"
#include "support/test_support.h"

namespace gaussot {
namespace {

namespace fs = std::filesystem;
using Bytes = std::vector<unsigned char>;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("gaussot_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

Bytes read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_bytes(const fs::path& p, const Bytes& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// Little-endian encoders written independently of the library.
void put_u32(Bytes& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_f32(Bytes& b, float f) { put_u32(b, std::bit_cast<std::uint32_t>(f)); }

Bytes tensor_header(std::vector<std::uint32_t> dims, std::uint32_t version = 1,
                    unsigned char dtype = 1) {
  Bytes b = {'G', 'O', 'T', 'F'};
  put_u32(b, version);
  b.push_back(dtype);
  b.push_back(static_cast<unsigned char>(dims.size()));
  for (auto d : dims) put_u32(b, d);
  return b;
}

FormatErrorCode code_of(const fs::path& p) {
  try {
    read_tensor(p);
  } catch (const FormatError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no FormatError for " << p;
  return FormatErrorCode::kIo;
}

RowMatrix float_matrix(Eigen::Index n, Eigen::Index m, testing::Rng& rng) {
  const Eigen::MatrixXd g = testing::random_gaussian_matrix(n, m, rng);
  return g.cast<float>().cast<double>();
}

TEST(TensorIoTest, RoundTripIsBitIdentical) {
  TempDir dir;
  testing::Rng rng(1);
  const SampleMatrix x(float_matrix(4, 7, rng));
  write_tensor(dir / "a.gotf", x, {4, 7});
  const Tensor t = read_tensor(dir / "a.gotf");
  EXPECT_EQ(t.dims, (std::vector<std::uint32_t>{4, 7}));
  EXPECT_EQ(t.samples.data(), x.data());
  write_tensor(dir / "b.gotf", t.samples, t.dims);
  EXPECT_EQ(read_bytes(dir / "a.gotf"), read_bytes(dir / "b.gotf"));
  EXPECT_EQ(read_bytes(dir / "a.gotf").size(), 4u + 4 + 1 + 1 + 8 + 4 * 28);
}

TEST(TensorIoTest, HandWrittenChannelFirstFile) {
  TempDir dir;
  // (C, H, W) = (3, 2, 2), values 0..11 in row-major order.
  Bytes b = tensor_header({3, 2, 2});
  for (int v = 0; v < 12; ++v) put_f32(b, static_cast<float>(v));
  write_bytes(dir / "chw.gotf", b);
  const Tensor t = read_tensor(dir / "chw.gotf");
  ASSERT_EQ(t.samples.n(), 4);
  ASSERT_EQ(t.samples.m(), 3);
  for (int pixel = 0; pixel < 4; ++pixel) {
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(t.samples.data()(pixel, c), 4.0 * c + pixel);
    }
  }
  EXPECT_EQ(feature_shape(t.dims), (FeatureShape{3, 2, 2}));
  // Writing it back reproduces the hand-written bytes.
  write_tensor(dir / "again.gotf", t.samples, t.dims);
  EXPECT_EQ(read_bytes(dir / "again.gotf"), b);
}

TEST(TensorIoTest, BatchOneAndVectorShapes) {
  TempDir dir;
  Bytes b = tensor_header({1, 2, 1, 3});
  for (int v = 0; v < 6; ++v) put_f32(b, static_cast<float>(v));
  write_bytes(dir / "nchw.gotf", b);
  const Tensor t = read_tensor(dir / "nchw.gotf");
  EXPECT_EQ(t.samples.n(), 3);
  EXPECT_EQ(t.samples.m(), 2);
  EXPECT_EQ(t.samples.data()(2, 1), 5.0);
  EXPECT_EQ(feature_shape(t.dims), (FeatureShape{2, 1, 3}));

  Bytes v = tensor_header({3});
  for (int i = 0; i < 3; ++i) put_f32(v, 0.5f * static_cast<float>(i));
  write_bytes(dir / "vec.gotf", v);
  const Tensor tv = read_tensor(dir / "vec.gotf");
  EXPECT_EQ(tv.samples.n(), 3);
  EXPECT_EQ(tv.samples.m(), 1);
  EXPECT_EQ(tv.samples.data()(2, 0), 1.0);
  EXPECT_THROW(feature_shape(tv.dims), FormatError);
}

TEST(TensorIoTest, DistinctErrorsForEachDefect) {
  TempDir dir;
  Bytes good = tensor_header({2, 2});
  for (int v = 0; v < 4; ++v) put_f32(good, 1.0f);

  Bytes magic = good;
  std::memcpy(magic.data(), "XXXX", 4);
  write_bytes(dir / "magic", magic);
  EXPECT_EQ(code_of(dir / "magic"), FormatErrorCode::kBadMagic);

  Bytes version = tensor_header({2, 2}, 2);
  version.insert(version.end(), good.begin() + 18, good.end());
  write_bytes(dir / "version", version);
  EXPECT_EQ(code_of(dir / "version"), FormatErrorCode::kBadVersion);

  Bytes dtype = tensor_header({2, 2}, 1, 2);
  dtype.insert(dtype.end(), good.begin() + 18, good.end());
  write_bytes(dir / "dtype", dtype);
  EXPECT_EQ(code_of(dir / "dtype"), FormatErrorCode::kBadDtype);

  Bytes truncated(good.begin(), good.end() - 2);
  write_bytes(dir / "truncated", truncated);
  EXPECT_EQ(code_of(dir / "truncated"), FormatErrorCode::kTruncated);
  write_bytes(dir / "header_only", Bytes(good.begin(), good.begin() + 7));
  EXPECT_EQ(code_of(dir / "header_only"), FormatErrorCode::kTruncated);

  Bytes nonfinite = tensor_header({2, 2});
  for (float f : {1.0f, std::numeric_limits<float>::quiet_NaN(), 1.0f, 1.0f}) {
    put_f32(nonfinite, f);
  }
  write_bytes(dir / "nan", nonfinite);
  EXPECT_EQ(code_of(dir / "nan"), FormatErrorCode::kNonFinite);

  Bytes trailing = good;
  trailing.push_back(0);
  write_bytes(dir / "trailing", trailing);
  EXPECT_EQ(code_of(dir / "trailing"), FormatErrorCode::kBadShape);

  Bytes zero_dim = tensor_header({0, 2});
  write_bytes(dir / "zero", zero_dim);
  EXPECT_EQ(code_of(dir / "zero"), FormatErrorCode::kBadShape);

  EXPECT_EQ(code_of(dir / "missing"), FormatErrorCode::kIo);
}

TEST(TensorIoTest, WriteRejectsDimsThatDoNotMatchSamples) {
  TempDir dir;
  testing::Rng rng(2);
  const SampleMatrix x(float_matrix(4, 3, rng));
  EXPECT_THROW(write_tensor(dir / "x", x, {3, 3, 3}), DimensionError);
  EXPECT_NO_THROW(write_tensor(dir / "x", x, {3, 2, 2}));
  EXPECT_EQ(dims_of(FeatureShape{3, 2, 2}), (std::vector<std::uint32_t>{3, 2, 2}));
}

TEST(StatsIoTest, RoundTripIsBitIdentical) {
  TempDir dir;
  testing::Rng rng(3);
  const GaussianStats g(testing::random_vector(5, rng),
                        testing::random_spd(5, 1e3, rng), 1234);
  write_stats(dir / "s.gots", g);
  const GaussianStats r = read_stats(dir / "s.gots");
  EXPECT_EQ(r.mean(), g.mean());
  EXPECT_EQ(r.cov().matrix(), g.cov().matrix());
  EXPECT_EQ(r.n_samples(), 1234);
  EXPECT_EQ(read_bytes(dir / "s.gots").size(), 4u + 4 + 4 + 8 + 8 * (5 + 25));
  write_stats(dir / "t.gots", r);
  EXPECT_EQ(read_bytes(dir / "s.gots"), read_bytes(dir / "t.gots"));
}

TEST(StatsIoTest, RejectsCorruptFiles) {
  TempDir dir;
  const GaussianStats g(Eigen::Vector2d(1, 2), SpdMatrix::Identity(2), 10);
  write_stats(dir / "s.gots", g);
  Bytes bytes = read_bytes(dir / "s.gots");

  Bytes magic = bytes;
  magic[3] = 'F';
  write_bytes(dir / "magic", magic);
  try {
    read_stats(dir / "magic");
    ADD_FAILURE();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.code(), FormatErrorCode::kBadMagic);
  }
  write_bytes(dir / "short", Bytes(bytes.begin(), bytes.end() - 8));
  EXPECT_THROW(read_stats(dir / "short"), FormatError);

  // Indefinite covariance: diag(1, -1).
  Bytes indefinite = bytes;
  const double minus_one = -1.0;
  std::memcpy(indefinite.data() + indefinite.size() - 8, &minus_one, 8);
  write_bytes(dir / "indefinite", indefinite);
  EXPECT_THROW(read_stats(dir / "indefinite"), NumericError);
}

TEST(ManifestTest, RoundTripAndRelativePaths) {
  TempDir dir;
  fs::create_directories(dir / "sub");
  Manifest m;
  for (int level = 1; level <= 2; ++level) {
    ManifestLevel l;
    l.level = level;
    l.input = dir / ("in" + std::to_string(level) + ".gotf");
    l.output = dir / ("out" + std::to_string(level) + ".gotf");
    l.shape = FeatureShape{8 * level, 16 / level, 16 / level};
    l.styles = {dir / ("s" + std::to_string(level) + ".gotf")};
    m.levels.push_back(l);
  }
  write_manifest(dir / "m.json", m);
  const Manifest r = read_manifest(dir / "m.json");
  ASSERT_EQ(r.depth(), 2);
  EXPECT_EQ(r.at(2).shape, (FeatureShape{16, 8, 8}));
  EXPECT_EQ(r.at(1).input, m.levels[0].input);
  EXPECT_EQ(r.at(2).styles, m.levels[1].styles);
  EXPECT_THROW(r.at(3), DimensionError);

  std::ofstream(dir / "sub" / "rel.json")
      << R"({"version": 1, "levels": [{"level": 1, "input": "a.gotf",)"
      << R"( "output": "b.gotf", "shape": [3, 4, 5]}]})";
  const Manifest rel = read_manifest(dir / "sub" / "rel.json");
  EXPECT_EQ(rel.at(1).input, dir / "sub" / "a.gotf");
  EXPECT_TRUE(rel.at(1).styles.empty());
}

TEST(ManifestTest, RejectsMalformedDocuments) {
  TempDir dir;
  auto code = [&](const std::string& text) {
    std::ofstream(dir / "m.json") << text;
    try {
      read_manifest(dir / "m.json");
    } catch (const FormatError& e) {
      return e.code();
    }
    return FormatErrorCode::kIo;
  };
  const std::string level =
      R"("input": "a", "output": "b", "shape": [1, 1, 1])";
  EXPECT_EQ(code("{not json"), FormatErrorCode::kBadManifest);
  EXPECT_EQ(code(R"({"version": 1, "levels": []})"), FormatErrorCode::kBadManifest);
  EXPECT_EQ(code(R"({"version": 1, "levels": [{"level": 2, )" + level + "}]}"),
            FormatErrorCode::kBadManifest);
  EXPECT_EQ(code(R"({"version": 7, "levels": [{"level": 1, )" + level + "}]}"),
            FormatErrorCode::kBadManifest);
  EXPECT_EQ(code(R"({"version": 1, "levels": [{"level": 1, "input": "a",)"
                 R"( "output": "b", "shape": [1, 0, 1]}]})"),
            FormatErrorCode::kBadManifest);
}

TEST(ImageIoTest, BlackAndWhitePixels) {
  TempDir dir;
  for (double v : {0.0, 1.0}) {
    PixelImage img{1, 1, RowMatrix::Constant(1, 3, v)};
    write_image(dir / "p.png", img);
    const PixelImage r = read_image(dir / "p.png");
    EXPECT_EQ(r.width, 1);
    EXPECT_EQ(r.height, 1);
    EXPECT_EQ(r.rgb, RowMatrix::Constant(1, 3, v));
  }
}

TEST(ImageIoTest, EightBitRoundTripsExactly) {
  TempDir dir;
  PixelImage img{5, 3, RowMatrix(15, 3)};
  for (Eigen::Index i = 0; i < img.rgb.size(); ++i) {
    img.rgb.data()[i] = static_cast<double>((i * 37) % 256) / 255.0;
  }
  write_image(dir / "a.png", img);
  const PixelImage r = read_image(dir / "a.png");
  EXPECT_EQ(r.rgb, img.rgb);
  write_image(dir / "b.png", r);
  EXPECT_EQ(read_bytes(dir / "a.png"), read_bytes(dir / "b.png"));
}

TEST(ImageIoTest, ClampsOnWriteAndConvertsGray) {
  TempDir dir;
  PixelImage img{2, 1, RowMatrix(2, 3)};
  img.rgb << -0.5, 0.5, 2.0, 1.0 / 255.0, 0.0, 1.0;
  write_image(dir / "c.png", img);
  const PixelImage r = read_image(dir / "c.png");
  EXPECT_EQ(r.rgb(0, 0), 0.0);
  EXPECT_EQ(r.rgb(0, 1), 128.0 / 255.0);
  EXPECT_EQ(r.rgb(0, 2), 1.0);
  EXPECT_EQ(r.rgb(1, 0), 1.0 / 255.0);

  const PixelImage gray = read_image(fs::path(GAUSSOT_TEST_DATA_DIR) / "gray_2x1.png");
  EXPECT_EQ(gray.width, 2);
  EXPECT_EQ(gray.rgb.row(1), RowMatrix::Constant(1, 3, 51.0 / 255.0));
}

TEST(ImageIoTest, RejectsNonPngAndBadBuffers) {
  TempDir dir;
  try {
    read_image(fs::path(GAUSSOT_TEST_DATA_DIR) / "not_a_png.png");
    ADD_FAILURE();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.code(), FormatErrorCode::kUnsupportedImage);
  }
  EXPECT_THROW(read_image(dir / "missing.png"), FormatError);
  EXPECT_THROW(write_image(dir / "x.png", PixelImage{2, 2, RowMatrix(3, 3)}),
               DimensionError);
}

}  // namespace
}  // namespace gaussot

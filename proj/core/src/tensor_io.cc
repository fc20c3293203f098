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

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gaussot/error.h"

namespace gaussot {
namespace {

constexpr std::array<char, 4> kTensorMagic = {'G', 'O', 'T', 'F'};
constexpr std::array<char, 4> kStatsMagic = {'G', 'O', 'T', 'S'};

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
void put_le(std::string& out, T value) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.append(bytes.data(), bytes.size());
}

class ByteReader {
 public:
  ByteReader(std::string data, std::string name)
      : data_(std::move(data)), name_(std::move(name)) {}

  template <typename T>
  T get() {
    std::array<char, sizeof(T)> bytes;
    take(bytes.data(), bytes.size());
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(bytes.begin(), bytes.end());
    }
    return std::bit_cast<T>(bytes);
  }

  void take(char* dst, std::size_t n) {
    if (data_.size() - pos_ < n) {
      throw FormatError(FormatErrorCode::kTruncated,
                        name_ + ": file is truncated");
    }
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string data_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError(FormatErrorCode::kIo,
                      "cannot open " + path.string() + " for reading");
  }
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spill(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError(FormatErrorCode::kIo,
                      "cannot open " + path.string() + " for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw FormatError(FormatErrorCode::kIo, "write failed: " + path.string());
  }
}

void expect_magic(ByteReader& r, const std::array<char, 4>& magic,
                  const std::string& name) {
  std::array<char, 4> got;
  r.take(got.data(), got.size());
  if (got != magic) {
    throw FormatError(FormatErrorCode::kBadMagic,
                      name + ": bad magic (expected " +
                          std::string(magic.data(), 4) + ")");
  }
}

struct Layout {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  bool channels_first = false;  // (C, H, W): payload index c * n + p
};

Layout layout_of(const std::vector<std::uint32_t>& dims) {
  auto bad = [&](const std::string& why) {
    return FormatError(FormatErrorCode::kBadShape, "tensor shape: " + why);
  };
  for (auto d : dims) {
    if (d == 0) throw bad("zero-sized dimension");
  }
  switch (dims.size()) {
    case 1:
      return {dims[0], 1, false};
    case 2:
      return {dims[0], dims[1], false};
    case 3:
      return {static_cast<Eigen::Index>(dims[1]) * dims[2], dims[0], true};
    case 4:
      if (dims[0] != 1) throw bad("4-D tensors must have batch size 1");
      return {static_cast<Eigen::Index>(dims[2]) * dims[3], dims[1], true};
    default:
      throw bad("unsupported rank " + std::to_string(dims.size()));
  }
}

}  // namespace

std::vector<std::uint32_t> dims_of(const FeatureShape& shape) {
  return {static_cast<std::uint32_t>(shape.channels),
          static_cast<std::uint32_t>(shape.height),
          static_cast<std::uint32_t>(shape.width)};
}

FeatureShape feature_shape(const std::vector<std::uint32_t>& dims) {
  if (dims.size() == 3) {
    return {static_cast<int>(dims[0]), static_cast<int>(dims[1]),
            static_cast<int>(dims[2])};
  }
  if (dims.size() == 4 && dims[0] == 1) {
    return {static_cast<int>(dims[1]), static_cast<int>(dims[2]),
            static_cast<int>(dims[3])};
  }
  throw FormatError(FormatErrorCode::kBadShape,
                    "tensor is not a (C, H, W) feature map");
}

Tensor read_tensor(const std::filesystem::path& path) {
  const std::string name = path.string();
  ByteReader r(slurp(path), name);
  expect_magic(r, kTensorMagic, name);
  const auto version = r.get<std::uint32_t>();
  if (version != kTensorFormatVersion) {
    throw FormatError(FormatErrorCode::kBadVersion,
                      name + ": unsupported version " + std::to_string(version));
  }
  const auto dtype = r.get<std::uint8_t>();
  if (dtype != kDtypeFloat32) {
    throw FormatError(FormatErrorCode::kBadDtype,
                      name + ": unsupported dtype " + std::to_string(dtype));
  }
  const auto ndim = r.get<std::uint8_t>();
  std::vector<std::uint32_t> dims(ndim);
  for (auto& d : dims) d = r.get<std::uint32_t>();
  const Layout layout = layout_of(dims);

  const std::size_t count = static_cast<std::size_t>(layout.n * layout.m);
  if (r.remaining() < count * sizeof(float)) {
    throw FormatError(FormatErrorCode::kTruncated,
                      name + ": payload is truncated");
  }
  if (r.remaining() > count * sizeof(float)) {
    throw FormatError(FormatErrorCode::kBadShape,
                      name + ": trailing bytes after payload");
  }
  RowMatrix data(layout.n, layout.m);
  for (std::size_t k = 0; k < count; ++k) {
    const float v = r.get<float>();
    if (!std::isfinite(v)) {
      throw FormatError(FormatErrorCode::kNonFinite,
                        name + ": non-finite value at index " +
                            std::to_string(k));
    }
    if (layout.channels_first) {
      data(static_cast<Eigen::Index>(k) % layout.n,
           static_cast<Eigen::Index>(k) / layout.n) = v;
    } else {
      data(static_cast<Eigen::Index>(k) / layout.m,
           static_cast<Eigen::Index>(k) % layout.m) = v;
    }
  }
  return {SampleMatrix(std::move(data)), std::move(dims)};
}

void write_tensor(const std::filesystem::path& path,
                  const SampleMatrix& samples,
                  const std::vector<std::uint32_t>& dims) {
  if (dims.size() > 255) {
    throw FormatError(FormatErrorCode::kBadShape, "too many tensor dims");
  }
  const Layout layout = layout_of(dims);
  if (layout.n != samples.n() || layout.m != samples.m()) {
    std::ostringstream msg;
    msg << "tensor dims describe " << layout.n << "x" << layout.m
        << " samples, got " << samples.n() << "x" << samples.m();
    throw DimensionError(msg.str());
  }
  std::string out;
  out.reserve(16 + 4 * dims.size() +
              static_cast<std::size_t>(layout.n * layout.m) * sizeof(float));
  out.append(kTensorMagic.data(), kTensorMagic.size());
  put_le(out, kTensorFormatVersion);
  put_le(out, kDtypeFloat32);
  put_le(out, static_cast<std::uint8_t>(dims.size()));
  for (auto d : dims) put_le(out, d);
  const RowMatrix& x = samples.data();
  if (layout.channels_first) {
    for (Eigen::Index c = 0; c < layout.m; ++c) {
      for (Eigen::Index p = 0; p < layout.n; ++p) {
        put_le(out, static_cast<float>(x(p, c)));
      }
    }
  } else {
    for (Eigen::Index i = 0; i < layout.n; ++i) {
      for (Eigen::Index j = 0; j < layout.m; ++j) {
        put_le(out, static_cast<float>(x(i, j)));
      }
    }
  }
  spill(path, out);
}

GaussianStats read_stats(const std::filesystem::path& path) {
  const std::string name = path.string();
  ByteReader r(slurp(path), name);
  expect_magic(r, kStatsMagic, name);
  const auto version = r.get<std::uint32_t>();
  if (version != kStatsFormatVersion) {
    throw FormatError(FormatErrorCode::kBadVersion,
                      name + ": unsupported version " + std::to_string(version));
  }
  const auto m = static_cast<Eigen::Index>(r.get<std::uint32_t>());
  const auto n_samples = r.get<std::uint64_t>();
  if (m == 0) throw FormatError(FormatErrorCode::kBadShape, name + ": m = 0");
  const std::size_t expected =
      static_cast<std::size_t>(m + m * m) * sizeof(double);
  if (r.remaining() < expected) {
    throw FormatError(FormatErrorCode::kTruncated, name + ": file is truncated");
  }
  if (r.remaining() > expected) {
    throw FormatError(FormatErrorCode::kBadShape,
                      name + ": trailing bytes after covariance");
  }
  Eigen::VectorXd mean(m);
  for (Eigen::Index i = 0; i < m; ++i) mean(i) = r.get<double>();
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) cov(i, j) = r.get<double>();
  }
  if (!mean.allFinite() || !cov.allFinite()) {
    throw FormatError(FormatErrorCode::kNonFinite, name + ": non-finite value");
  }
  return GaussianStats(std::move(mean), SpdMatrix(cov),
                       static_cast<std::int64_t>(n_samples));
}

void write_stats(const std::filesystem::path& path, const GaussianStats& stats) {
  const Eigen::Index m = stats.dim();
  std::string out;
  out.append(kStatsMagic.data(), kStatsMagic.size());
  put_le(out, kStatsFormatVersion);
  put_le(out, static_cast<std::uint32_t>(m));
  put_le(out, static_cast<std::uint64_t>(stats.n_samples()));
  for (Eigen::Index i = 0; i < m; ++i) put_le(out, stats.mean()(i));
  const Eigen::MatrixXd& cov = stats.cov().matrix();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) put_le(out, cov(i, j));
  }
  spill(path, out);
}

const ManifestLevel& Manifest::at(int level) const {
  if (level < 1 || level > depth()) {
    throw DimensionError("manifest has no level " + std::to_string(level));
  }
  return levels[static_cast<std::size_t>(level - 1)];
}

Manifest read_manifest(const std::filesystem::path& path) {
  const std::string name = path.string();
  auto bad = [&](const std::string& why) {
    return FormatError(FormatErrorCode::kBadManifest, name + ": " + why);
  };
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw bad(e.what());
  }
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path q(p);
    return q.is_absolute() ? q : base / q;
  };

  Manifest manifest;
  try {
    if (doc.value("version", 1) != 1) throw bad("unsupported version");
    for (const auto& entry : doc.at("levels")) {
      ManifestLevel level;
      level.level = entry.at("level").get<int>();
      level.input = resolve(entry.at("input").get<std::string>());
      level.output = resolve(entry.at("output").get<std::string>());
      const auto shape = entry.at("shape").get<std::vector<int>>();
      if (shape.size() != 3 || shape[0] < 1 || shape[1] < 1 || shape[2] < 1) {
        throw bad("shape must be three positive integers [C, H, W]");
      }
      level.shape = {shape[0], shape[1], shape[2]};
      if (entry.contains("styles")) {
        for (const auto& s : entry.at("styles")) {
          level.styles.push_back(resolve(s.get<std::string>()));
        }
      }
      manifest.levels.push_back(std::move(level));
    }
  } catch (const nlohmann::json::exception& e) {
    throw bad(e.what());
  }
  if (manifest.levels.empty()) throw bad("no levels");
  std::sort(manifest.levels.begin(), manifest.levels.end(),
            [](const auto& a, const auto& b) { return a.level < b.level; });
  for (std::size_t i = 0; i < manifest.levels.size(); ++i) {
    if (manifest.levels[i].level != static_cast<int>(i) + 1) {
      throw bad("levels must be contiguous from 1");
    }
  }
  return manifest;
}

void write_manifest(const std::filesystem::path& path,
                    const Manifest& manifest) {
  nlohmann::json levels = nlohmann::json::array();
  for (const ManifestLevel& l : manifest.levels) {
    nlohmann::json entry = {
        {"level", l.level},
        {"input", l.input.string()},
        {"output", l.output.string()},
        {"shape", {l.shape.channels, l.shape.height, l.shape.width}},
    };
    if (!l.styles.empty()) {
      nlohmann::json styles = nlohmann::json::array();
      for (const auto& s : l.styles) styles.push_back(s.string());
      entry["styles"] = std::move(styles);
    }
    levels.push_back(std::move(entry));
  }
  const nlohmann::json doc = {{"version", 1}, {"levels", std::move(levels)}};
  spill(path, doc.dump(2) + "\n");
}

}  // namespace gaussot

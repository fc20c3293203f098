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

#include "cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gaussot/gaussian_ot.h"
#include "gaussot/image_io.h"
#include "gaussot/tensor_io.h"
#include "gtest/gtest.h"

namespace gaussot {
namespace {

namespace fs = std::filesystem;

const fs::path kData = GAUSSOT_TEST_DATA_DIR;

struct Outcome {
  int code = -1;
  std::map<std::string, std::string> values;
  std::string err;

  double number(const std::string& key) const { return std::stod(values.at(key)); }
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = cli::run(args, out, err);
  std::istringstream lines(out.str());
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) o.values[line.substr(0, eq)] = line.substr(eq + 1);
  }
  o.err = err.str();
  return o;
}

std::string bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("gaussot_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string scalar_stats(const std::string& name, double mean, double var) {
    write_stats(dir_ / name, GaussianStats(Eigen::VectorXd::Constant(1, mean),
                                           SpdMatrix::Diagonal(Eigen::VectorXd::Constant(1, var))));
    return path(name);
  }

  fs::path dir_;
};

const std::string kContent = (kData / "content_64.png").string();
const std::string kStyle = (kData / "style_64.png").string();

TEST_F(CliTest, DistanceOfIdenticalStatsIsZero) {
  ASSERT_EQ(run({"stats", kStyle, "-o", path("s.gots")}).code, 0);
  const Outcome o = run({"distance", "--metric", "w2", path("s.gots"), path("s.gots")});
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.values.at("w2_sq"), "0.0");
  for (const std::string m : {"bures", "fisher-rao", "frobenius"}) {
    const Outcome d = run({"distance", "--metric", m, path("s.gots"), kContent});
    EXPECT_EQ(d.code, 0) << d.err;
    EXPECT_EQ(d.values.size(), 1u);
  }
}

TEST_F(CliTest, ZeroStepTransferReproducesContent) {
  const Outcome o = run({"transfer", "--content", kContent, "--style", kStyle,
                         "--t", "0", "-o", path("out.png")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(read_image(path("out.png")).rgb, read_image(kContent).rgb);
  EXPECT_EQ(o.number("clamp_fraction"), 0.0);
}

TEST_F(CliTest, BarycenterOfScalarStyles) {
  const auto a = scalar_stats("a.gots", 0.0, 1.0);
  const auto b = scalar_stats("b.gots", 2.0, 4.0);
  Outcome o = run({"barycenter", "--mean", "wasserstein", "--weights", "0.5,0.5",
                   a, b, "-o", path("bar.gots")});
  ASSERT_EQ(o.code, 0) << o.err;
  GaussianStats g = read_stats(path("bar.gots"));
  EXPECT_NEAR(g.cov().matrix()(0, 0), 2.25, 1e-12);
  EXPECT_NEAR(g.mean()(0), 1.0, 1e-15);

  // Weights are rescaled; arithmetic mean of 1 and 4 is 2.5.
  o = run({"barycenter", "--mean", "arithmetic", "--weights", "1,1", a, b, "-o",
           path("ar.gots")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.values.at("weights"), "0.5,0.5");
  EXPECT_NEAR(read_stats(path("ar.gots")).cov().matrix()(0, 0), 2.5, 1e-15);
}

TEST_F(CliTest, OptimalTransferMatchesStyleBeforeClamping) {
  const Outcome o = run({"transfer", "--map", "ot", "--t", "1", "--content", kContent,
                         "--style", kStyle, "-o", path("out.png"), "--features-out",
                         path("features.gotf")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_LT(o.number("clamp_fraction"), 0.05);
  const GaussianStats style = estimate_stats(SampleMatrix(read_image(kStyle).rgb));
  const GaussianStats got = estimate_stats(read_tensor(path("features.gotf")).samples);
  EXPECT_LT((got.mean() - style.mean()).norm() / style.mean().norm(), 1e-5);
  EXPECT_LT((got.cov().matrix() - style.cov().matrix()).norm() /
                style.cov().matrix().norm(),
            1e-5);
  EXPECT_LT(o.number("cov_rel_err"), 1e-9);
}

TEST_F(CliTest, StyleBankStatsGiveTheSameTransfer) {
  ASSERT_EQ(run({"stats", kStyle, "-o", path("s.gots")}).code, 0);
  ASSERT_EQ(run({"transfer", "--content", kContent, "--style", kStyle, "-o",
                 path("a.png")}).code, 0);
  ASSERT_EQ(run({"transfer", "--content", kContent, "--style", path("s.gots"), "-o",
                 path("b.png")}).code, 0);
  EXPECT_EQ(bytes(path("a.png")), bytes(path("b.png")));
}

TEST_F(CliTest, MixWithOneStyleEqualsTransfer) {
  ASSERT_EQ(run({"transfer", "--content", kContent, "--style", kStyle, "-o",
                 path("t.png")}).code, 0);
  const Outcome o = run({"mix", "--content", kContent, "--style", kStyle, "-o",
                         path("m.png")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(bytes(path("t.png")), bytes(path("m.png")));
  EXPECT_EQ(o.values.count("level.1.residual"), 1u);

  const Outcome c = run({"mix", "--content", kContent, "--style", kStyle,
                         "--with-content", "--weights", "0,1", "-o", path("c.png")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(read_image(path("c.png")).rgb, read_image(kContent).rgb);
}

TEST_F(CliTest, GridCornersEqualSingleTransfers) {
  const std::vector<std::string> styles{kStyle, (kData / "style2_64.png").string(),
                                        (kData / "style3_64.png").string(), kContent};
  const Outcome o = run({"grid", "--corners", "4", "--resolution", "5", "--content",
                         kContent, "--style", styles[0], "--style", styles[1],
                         "--style", styles[2], "--style", styles[3], "--out-dir",
                         path("grid"), "--jobs", "3"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.values.at("cells"), "25");
  int pngs = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "grid")) {
    if (e.path().filename().string().rfind("cell_", 0) == 0) ++pngs;
  }
  EXPECT_EQ(pngs, 25);
  const std::vector<std::string> corners{"r0c0", "r0c4", "r4c0", "r4c4"};
  for (std::size_t k = 0; k < 4; ++k) {
    ASSERT_EQ(run({"transfer", "--content", kContent, "--style", styles[k], "-o",
                   path("single.png")}).code, 0);
    EXPECT_EQ(bytes(path("grid/cell_" + corners[k] + ".png")), bytes(path("single.png")))
        << corners[k];
  }
  const PixelImage montage = read_image(path("grid/montage.png"));
  EXPECT_EQ(montage.width, 5 * 64 + 4 * 2);
  EXPECT_EQ(montage.height, 5 * 64 + 4 * 2);
}

TEST_F(CliTest, GridIsDeterministicAcrossJobCounts) {
  const std::vector<std::string> base{"grid", "--corners", "3", "--resolution", "4",
                                      "--content", kContent, "--style", kStyle,
                                      "--style", (kData / "style2_64.png").string(),
                                      "--with-content"};
  auto one = base;
  one.insert(one.end(), {"--out-dir", path("one"), "--jobs", "1"});
  auto many = base;
  many.insert(many.end(), {"--out-dir", path("many"), "--jobs", "4"});
  const Outcome a = run(one);
  const Outcome b = run(many);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.values.at("cells"), "10");
  EXPECT_EQ(bytes(path("one/montage.png")), bytes(path("many/montage.png")));
  EXPECT_EQ(a.values.at("cell.r3c3.weights"), "0.0,0.0,1.0");
}

TEST_F(CliTest, UsageErrorsExitWithOne) {
  const auto a = scalar_stats("a.gots", 0.0, 1.0);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"transfer", "--content", kContent, "--style", kStyle, "--t", "2",
                 "-o", path("o.png")}).code, 1);
  EXPECT_EQ(run({"transfer", "--content", kContent, "--style", kStyle, "--map",
                 "magic", "-o", path("o.png")}).code, 1);
  EXPECT_EQ(run({"transfer", "--content", kContent, "--style", kStyle, "-o",
                 path("o.jpg")}).code, 1);
  EXPECT_EQ(run({"barycenter", a, a, "--weights", "1", "-o", path("b.gots")}).code, 1);
  EXPECT_EQ(run({"barycenter", a, a, "--weights", "0,0", "-o", path("b.gots")}).code, 1);
  EXPECT_EQ(run({"barycenter", a, a, "--weights", "-1,2", "-o", path("b.gots")}).code, 1);
  EXPECT_EQ(run({"barycenter", a, "--max-iter", "0", "-o", path("b.gots")}).code, 1);
  EXPECT_EQ(run({"grid", "--content", kContent, "--style", kStyle, "--corners", "4",
                 "--out-dir", path("g")}).code, 1);
  EXPECT_EQ(run({"grid", "--content", kContent, "--style", kStyle, "--style", kStyle,
                 "--corners", "2", "--resolution", "1", "--out-dir", path("g")}).code, 1);
  EXPECT_EQ(run({"transfer", "--codec", "tensor"}).code, 1);
  EXPECT_FALSE(fs::exists(dir_ / "g"));
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, DataErrorsExitWithTwo) {
  std::ofstream(path("bad.gots")) << "GOTX";
  const auto a = scalar_stats("a.gots", 0.0, 1.0);
  Outcome o = run({"distance", path("bad.gots"), a});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("error"), std::string::npos);
  ASSERT_EQ(run({"stats", kStyle, "-o", path("s.gots")}).code, 0);
  EXPECT_EQ(run({"distance", a, path("s.gots")}).code, 2);
  EXPECT_EQ(run({"transfer", "--content", (kData / "not_a_png.png").string(),
                 "--style", kStyle, "-o", path("o.png")}).code, 2);
  EXPECT_EQ(run({"transfer", "--content", kContent, "--style", a, "-o",
                 path("o.png")}).code, 2);
}

class CliTensorTest : public CliTest {
 protected:
  // Two-level manifest: level 2 is (3, 2, 2), level 1 is (3, 4, 4).
  void write_manifest_files(bool two_levels) {
    Manifest m;
    for (int level = 1; level <= (two_levels ? 2 : 1); ++level) {
      const int side = level == 1 ? 4 : 2;
      ManifestLevel l;
      l.level = level;
      l.input = dir_ / ("in" + std::to_string(level) + ".gotf");
      l.output = dir_ / ("out" + std::to_string(level) + ".gotf");
      l.shape = FeatureShape{3, side, side};
      for (int s = 0; s < 2; ++s) {
        l.styles.push_back(dir_ / ("style" + std::to_string(s) + "_" +
                                   std::to_string(level) + ".gotf"));
        write_tensor(l.styles.back(), pattern(side * side * 4, s + 1), {3, 2u * side, 2u * side});
      }
      write_tensor(l.input, pattern(side * side, 7), {3, 1u * side, 1u * side});
      m.levels.push_back(l);
    }
    write_manifest(dir_ / "manifest.json", m);
  }

  static SampleMatrix pattern(int n, int seed) {
    RowMatrix x(n, 3);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < 3; ++c) {
        x(i, c) = static_cast<float>(std::sin(0.7 * i * (c + 1) + seed) + 0.1 * seed * c);
      }
    }
    return SampleMatrix(x);
  }
};

TEST_F(CliTensorTest, SingleLevelTransfer) {
  write_manifest_files(false);
  const Outcome o = run({"transfer", "--codec", "tensor", "--manifest",
                         path("manifest.json"), "--style-index", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  const GaussianStats got = estimate_stats(read_tensor(path("out1.gotf")).samples);
  const GaussianStats want = estimate_stats(read_tensor(path("style1_1.gotf")).samples);
  EXPECT_LT((got.cov().matrix() - want.cov().matrix()).norm(), 1e-5 * want.cov().matrix().norm());
  EXPECT_EQ(o.values.at("output"), path("out1.gotf"));
}

TEST_F(CliTensorTest, TwoLevelsNeedABridge) {
  write_manifest_files(true);
  const Outcome missing = run({"mix", "--codec", "tensor", "--manifest",
                               path("manifest.json"), "--weights", "0.3,0.7"});
  EXPECT_EQ(missing.code, 2);

  // The bridge stands in for an external decoder/encoder: it copies a
  // prepared level-1 tensor into place and records its arguments.
  write_tensor(dir_ / "prepared.gotf", pattern(16, 3), {3, 4, 4});
  std::ofstream(path("bridge.sh"))
      << "#!/bin/sh\necho \"$2 $3\" >> '" << path("calls.txt") << "'\n"
      << "cp '" << path("prepared.gotf") << "' '" << path("in1.gotf") << "'\n";
  fs::permissions(dir_ / "bridge.sh", fs::perms::owner_all);
  const Outcome o = run({"mix", "--codec", "tensor", "--manifest", path("manifest.json"),
                         "--weights", "0.3,0.7", "--bridge", path("bridge.sh")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(bytes(path("calls.txt")), "2 1\n");
  EXPECT_EQ(o.values.count("level.2.residual"), 1u);
  EXPECT_EQ(o.values.count("level.1.residual"), 1u);
  EXPECT_TRUE(fs::exists(dir_ / "out2.gotf"));
  EXPECT_TRUE(fs::exists(dir_ / "out1.gotf"));
}

}  // namespace
}  // namespace gaussot

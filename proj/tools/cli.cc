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

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#ifdef GAUSSOT_SINGLE_HEADER_CLI11
#include "CLI11.hpp"
#else
#include "CLI/CLI.hpp"
#endif

#include "gaussot/codecs.h"
#include "gaussot/error.h"
#include "gaussot/frechet_means.h"
#include "gaussot/gaussian_ot.h"
#include "gaussot/image_io.h"
#include "gaussot/pipeline.h"
#include "gaussot/psd_linalg.h"
#include "gaussot/tensor_io.h"

namespace gaussot::cli {
namespace {

namespace fs = std::filesystem;

// Bad flag combinations found after parsing but before any computation.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Codec { kPixel, kTensor };

// Shortest round-trip form, always with a decimal point or exponent.
std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

class Emitter {
 public:
  explicit Emitter(std::ostream& out) : out_(out) {}

  void put(std::string_view key, double v) { line(key, number(v)); }
  void put(std::string_view key, long long v) { line(key, std::to_string(v)); }
  void put(std::string_view key, int v) { put(key, static_cast<long long>(v)); }
  void put(std::string_view key, const std::string& v) { line(key, v); }
  void put(std::string_view key, const fs::path& p) { line(key, p.string()); }
  void put(std::string_view key, const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ",") + number(x);
    line(key, s);
  }

 private:
  void line(std::string_view key, const std::string& value) {
    out_ << key << '=' << value << '\n';
  }
  std::ostream& out_;
};

std::string extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

void require_extension(const fs::path& p, std::initializer_list<std::string_view> allowed,
                       std::string_view role) {
  const std::string ext = extension(p);
  for (auto a : allowed) {
    if (ext == a) return;
  }
  std::string list;
  for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw UsageError(std::string(role) + " '" + p.string() + "' must be one of: " + list);
}

SampleMatrix load_samples(const fs::path& p) {
  if (extension(p) == ".png") return SampleMatrix(read_image(p).rgb);
  return std::move(read_tensor(p).samples);
}

// Stats files load as stored; images and tensors are estimated.
GaussianStats load_stats(const fs::path& p, const TransferOptions& options) {
  if (extension(p) == ".gots") return read_stats(p);
  return feature_stats(load_samples(p), options);
}

std::vector<GaussianStats> load_all_stats(const std::vector<fs::path>& paths,
                                          const TransferOptions& options) {
  std::vector<GaussianStats> stats;
  stats.reserve(paths.size());
  for (const auto& p : paths) stats.push_back(load_stats(p, options));
  return stats;
}

const std::map<std::string, FrechetMetric> kMeanNames{
    {"wasserstein", FrechetMetric::kBures},
    {"fisherrao", FrechetMetric::kFisherRao},
    {"arithmetic", FrechetMetric::kArithmetic},
    {"harmonic", FrechetMetric::kHarmonic}};

const std::map<std::string, MapKind> kMapNames{
    {"ot", MapKind::kOt}, {"wct", MapKind::kWct}, {"adain", MapKind::kAdaIn}};

const std::map<std::string, Direction> kDirectionNames{
    {"coarse-to-fine", Direction::kCoarseToFine},
    {"fine-to-coarse", Direction::kFineToCoarse}};

const std::map<std::string, Codec> kCodecNames{{"pixel", Codec::kPixel},
                                               {"tensor", Codec::kTensor}};

struct PipelineFlags {
  double shrink = kPipelineShrink;
  double rel_trunc = kDefaultRelTrunc;

  void add(CLI::App* cmd) {
    cmd->add_option("--shrink", shrink, "Ridge on rank-deficient covariances, relative to trace/m")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--rel-trunc", rel_trunc, "Relative eigenvalue truncation")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }
  TransferOptions options() const {
    TransferOptions o;
    o.shrink = shrink;
    o.rel_trunc = rel_trunc;
    return o;
  }
};

struct MeanFlags {
  FrechetMetric metric = FrechetMetric::kBures;
  std::vector<double> weights;
  int max_iter = 50;
  double step = 0.01;
  double rel_tol = 1e-9;
  bool backtracking = false;
  bool pseudo_inverse = false;

  void add(CLI::App* cmd, bool with_weights) {
    cmd->add_option("--mean", metric, "Mean of the covariances")
        ->transform(CLI::CheckedTransformer(kMeanNames, CLI::ignore_case))
        ->default_str("wasserstein");
    if (with_weights) {
      cmd->add_option("--weights", weights,
                      "Comma-separated weights, rescaled to sum to one (default uniform)")
          ->delimiter(',')
          ->allow_extra_args(false)
          ->check(CLI::NonNegativeNumber);
    }
    cmd->add_option("--max-iter", max_iter, "Iteration budget")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--step", step, "Fisher-Rao gradient step")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--rel-tol", rel_tol, "Early-stop tolerance")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_flag("--backtracking", backtracking,
                  "Halve the Fisher-Rao step when the objective rises");
    cmd->add_flag("--pseudo-inverse", pseudo_inverse,
                  "Allow rank-deficient inputs to the harmonic mean");
  }

  FrechetSpec spec(const std::vector<double>& w, std::size_t count,
                   double rel_trunc) const {
    FrechetSpec s;
    s.metric = metric;
    s.max_iter = max_iter;
    s.step = step;
    s.rel_tol = rel_tol;
    s.rel_trunc = rel_trunc;
    s.backtracking = backtracking;
    s.allow_pseudo_inverse = pseudo_inverse;
    if (w.empty()) {
      s.weights.assign(count, 1.0 / static_cast<double>(count));
    } else {
      if (w.size() != count) {
        throw UsageError("expected " + std::to_string(count) + " weights, got " +
                         std::to_string(w.size()));
      }
      double total = 0.0;
      for (double x : w) total += x;
      if (!(total > 0.0)) throw UsageError("weights must not all be zero");
      for (double x : w) s.weights.push_back(x / total);
    }
    try {
      s.validate(count);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return s;
  }
  FrechetSpec spec(std::size_t count, double rel_trunc) const {
    return spec(weights, count, rel_trunc);
  }
};

struct MapFlags {
  MapKind kind = MapKind::kOt;
  double t = 1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--map", kind, "Transport map")
        ->transform(CLI::CheckedTransformer(kMapNames, CLI::ignore_case))
        ->default_str("ot");
    cmd->add_option("-t,--t", t, "Interpolation from content (0) to style (1)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }
};

struct TensorFlags {
  Codec codec = Codec::kPixel;
  fs::path manifest;
  std::string bridge;
  Direction direction = Direction::kCoarseToFine;

  void add(CLI::App* cmd) {
    cmd->add_option("--codec", codec, "pixel (PNG images) or tensor (manifest)")
        ->transform(CLI::CheckedTransformer(kCodecNames, CLI::ignore_case))
        ->default_str("pixel");
    cmd->add_option("--manifest", manifest, "Level manifest for --codec tensor")
        ->check(CLI::ExistingFile);
    cmd->add_option("--bridge", bridge,
                    "Command run as: CMD MANIFEST DECODED_LEVEL NEXT_LEVEL to re-encode "
                    "a decoded level for the next one");
    cmd->add_option("--direction", direction, "Level order")
        ->transform(CLI::CheckedTransformer(kDirectionNames, CLI::ignore_case))
        ->default_str("coarse-to-fine");
  }

  void check() const {
    if (codec == Codec::kTensor && manifest.empty()) {
      throw UsageError("--codec tensor requires --manifest");
    }
    if (codec == Codec::kPixel && (!manifest.empty() || !bridge.empty())) {
      throw UsageError("--manifest and --bridge apply to --codec tensor only");
    }
  }
};

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

FileTensorCodec::Bridge make_bridge(const std::string& command,
                                    const fs::path& manifest) {
  if (command.empty()) return {};
  return [command, manifest](int from, int to) {
    const std::string line = command + " " + shell_quote(manifest.string()) + " " +
                             std::to_string(from) + " " + std::to_string(to);
    if (std::system(line.c_str()) != 0) {
      throw FormatError(FormatErrorCode::kIo, "bridge command failed: " + line);
    }
  };
}

void emit_levels(Emitter& emit, const std::vector<LevelReport>& levels) {
  for (const auto& l : levels) {
    const std::string key = "level." + std::to_string(l.level) + ".";
    emit.put(key + "clamp_fraction", l.clamp_fraction);
    emit.put(key + "residual", l.barycenter_residual);
    emit.put(key + "iterations", l.barycenter_iterations);
  }
}

// Runs the manifest pipeline with every listed style (or one of them).
void run_tensor(const TensorFlags& flags, MixRequest request,
                std::optional<int> style_index, Emitter& emit) {
  FileTensorCodec codec(read_manifest(flags.manifest),
                        make_bridge(flags.bridge, flags.manifest));
  std::vector<FileTensorCodec::Image> styles;
  if (style_index) {
    styles.push_back({*style_index, 0});
  } else {
    const auto count = codec.manifest().at(1).styles.size();
    for (std::size_t j = 0; j < count; ++j) styles.push_back({static_cast<int>(j), 0});
  }
  if (request.frechet.weights.empty()) {
    const std::size_t n = styles.size() + (request.include_content ? 1 : 0);
    request.frechet.weights.assign(n, 1.0 / static_cast<double>(n));
  }
  const auto result = multires_transfer(FileTensorCodec::Image{},
                                        std::span(styles), codec, request);
  emit_levels(emit, result.levels);
  emit.put("output", codec.manifest().at(result.image.decoded_at).output);
}

double relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double scale = want.norm();
  return scale > 0.0 ? (got - want).norm() / scale : (got - want).norm();
}

// Decodes pixel features, writes the PNG and the optional raw features.
double write_pixels(const SampleMatrix& y, const PixelImage& like,
                    const fs::path& output, const fs::path& features_out) {
  const FeatureShape shape{3, like.height, like.width};
  auto decoded = PixelCodec().decode(1, y, shape);
  write_image(output, decoded.image);
  if (!features_out.empty()) write_tensor(features_out, y, dims_of(shape));
  return decoded.clamp_fraction;
}

// ---- stats -----------------------------------------------------------------

struct StatsCommand {
  fs::path input;
  fs::path output;
  double shrink = 0.0;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("stats", "Estimate Gaussian stats of an image or tensor");
    cmd->add_option("input", input, "PNG image or GOTF tensor")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", output, "Stats file to write (.gots)")->required();
    cmd->add_option("--shrink", shrink, "Ridge shrink*(trace/m)*I")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  }
  void run(Emitter& emit) const {
    require_extension(input, {".png", ".gotf"}, "input");
    require_extension(output, {".gots"}, "output");
    const SampleMatrix x = load_samples(input);
    const GaussianStats g = estimate_stats(x, shrink);
    write_stats(output, g);
    emit.put("m", static_cast<long long>(g.dim()));
    emit.put("n", static_cast<long long>(g.n_samples()));
    emit.put("trace", g.cov().trace());
    emit.put("output", output);
  }
};

// ---- distance --------------------------------------------------------------

struct DistanceCommand {
  fs::path a;
  fs::path b;
  std::string metric = "w2";
  double shrink = 0.0;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("distance", "Squared distance between two Gaussians");
    cmd->add_option("a", a, "Stats, image or tensor")->required()->check(CLI::ExistingFile);
    cmd->add_option("b", b, "Stats, image or tensor")->required()->check(CLI::ExistingFile);
    cmd->add_option("--metric", metric, "w2, bures, fisher-rao or frobenius")
        ->check(CLI::IsMember({"w2", "bures", "fisher-rao", "frobenius"}, CLI::ignore_case))
        ->capture_default_str();
    cmd->add_option("--shrink", shrink, "Ridge for estimated covariances")
        ->check(CLI::NonNegativeNumber);
  }
  void run(Emitter& emit) const {
    for (const auto& p : {a, b}) require_extension(p, {".gots", ".png", ".gotf"}, "input");
    TransferOptions o;
    o.shrink = shrink;
    o.shrink_deficient_only = false;
    const GaussianStats ga = load_stats(a, o);
    const GaussianStats gb = load_stats(b, o);
    if (ga.dim() != gb.dim()) throw DimensionError("stats dimensions differ");
    std::string m = metric;
    std::transform(m.begin(), m.end(), m.begin(), [](unsigned char c) { return std::tolower(c); });
    if (m == "w2") {
      emit.put("w2_sq", w2_gaussian_sq(ga, gb));
    } else if (m == "bures") {
      emit.put("bures_sq", bures_distance_sq(ga.cov(), gb.cov()));
    } else if (m == "fisher-rao") {
      emit.put("fisher_rao_sq", fisher_rao_distance_sq(ga.cov(), gb.cov()));
    } else {
      emit.put("frobenius_sq", frobenius_distance_sq(ga.cov(), gb.cov()));
    }
  }
};

// ---- transfer --------------------------------------------------------------

struct TransferCommand {
  fs::path content;
  fs::path style;
  fs::path output;
  fs::path features_out;
  int style_index = 0;
  MapFlags map;
  PipelineFlags pipeline;
  TensorFlags tensor;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("transfer", "Transport content toward one style");
    cmd->add_option("--content", content, "Content PNG")->check(CLI::ExistingFile);
    cmd->add_option("--style", style, "Style PNG, GOTF tensor or GOTS stats")
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", output, "Output PNG");
    cmd->add_option("--features-out", features_out, "Also write pre-clamp samples (.gotf)");
    cmd->add_option("--style-index", style_index, "Manifest style used with --codec tensor")
        ->check(CLI::NonNegativeNumber);
    map.add(cmd);
    pipeline.add(cmd);
    tensor.add(cmd);
  }

  void run(Emitter& emit) const {
    tensor.check();
    if (tensor.codec == Codec::kTensor) {
      MixRequest r;
      r.frechet.weights = {1.0};
      r.map_kind = map.kind;
      r.t = map.t;
      r.direction = tensor.direction;
      r.options = pipeline.options();
      run_tensor(tensor, r, style_index, emit);
      return;
    }
    if (content.empty() || style.empty() || output.empty()) {
      throw UsageError("transfer needs --content, --style and --output");
    }
    require_extension(content, {".png"}, "content");
    require_extension(style, {".png", ".gotf", ".gots"}, "style");
    require_extension(output, {".png"}, "output");
    if (!features_out.empty()) require_extension(features_out, {".gotf"}, "features");

    const TransferOptions options = pipeline.options();
    const PixelImage image = read_image(content);
    const SampleMatrix x(image.rgb);
    const GaussianStats target = load_stats(style, options);
    const SampleMatrix y = stylize(x, target, map.kind, map.t, options);
    const GaussianStats got = estimate_stats(y);
    emit.put("clamp_fraction", write_pixels(y, image, output, features_out));
    emit.put("mean_rel_err", relative_error(got.mean(), target.mean()));
    emit.put("cov_rel_err", relative_error(got.cov().matrix(), target.cov().matrix()));
    emit.put("output", output);
  }
};

// ---- barycenter ------------------------------------------------------------

struct BarycenterCommand {
  std::vector<fs::path> inputs;
  fs::path output;
  MeanFlags mean;
  PipelineFlags pipeline;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("barycenter", "Weighted mean of Gaussian stats");
    cmd->add_option("inputs", inputs, "Stats, images or tensors")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", output, "Stats file to write (.gots)")->required();
    mean.add(cmd, true);
    pipeline.add(cmd);
  }
  void run(Emitter& emit) const {
    for (const auto& p : inputs) require_extension(p, {".gots", ".png", ".gotf"}, "input");
    require_extension(output, {".gots"}, "output");
    const FrechetSpec spec = mean.spec(inputs.size(), pipeline.rel_trunc);
    const auto stats = load_all_stats(inputs, pipeline.options());
    const StatsBarycenter bary = barycenter_stats(stats, std::nullopt, spec);
    write_stats(output, bary.stats);
    emit.put("mean", std::string(to_string(spec.metric)));
    emit.put("weights", spec.weights);
    emit.put("iterations", bary.report.iterations_used);
    emit.put("residual", bary.report.final_residual);
    emit.put("output", output);
  }
};

// ---- mix -------------------------------------------------------------------

struct MixCommand {
  fs::path content;
  std::vector<fs::path> styles;
  fs::path output;
  fs::path features_out;
  bool with_content = false;
  MeanFlags mean;
  MapFlags map;
  PipelineFlags pipeline;
  TensorFlags tensor;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("mix", "Transport content to a barycenter of styles");
    cmd->add_option("--content", content, "Content PNG")->check(CLI::ExistingFile);
    cmd->add_option("--style", styles, "Style PNG, GOTF or GOTS (repeatable)")
        ->allow_extra_args(false)
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", output, "Output PNG");
    cmd->add_option("--features-out", features_out, "Also write pre-clamp samples (.gotf)");
    cmd->add_flag("--with-content", with_content,
                  "Include the content in the mean; its weight comes last");
    mean.add(cmd, true);
    map.add(cmd);
    pipeline.add(cmd);
    tensor.add(cmd);
  }

  void run(Emitter& emit) const {
    tensor.check();
    MixRequest r;
    r.include_content = with_content;
    r.map_kind = map.kind;
    r.t = map.t;
    r.direction = tensor.direction;
    r.options = pipeline.options();
    if (tensor.codec == Codec::kTensor) {
      const Manifest manifest = read_manifest(tensor.manifest);
      const std::size_t n = manifest.at(1).styles.size() + (with_content ? 1 : 0);
      if (manifest.at(1).styles.empty()) throw UsageError("manifest lists no styles");
      r.frechet = mean.spec(n, pipeline.rel_trunc);
      run_tensor(tensor, r, std::nullopt, emit);
      return;
    }
    if (content.empty() || styles.empty() || output.empty()) {
      throw UsageError("mix needs --content, at least one --style and --output");
    }
    require_extension(content, {".png"}, "content");
    for (const auto& s : styles) require_extension(s, {".png", ".gotf", ".gots"}, "style");
    require_extension(output, {".png"}, "output");
    if (!features_out.empty()) require_extension(features_out, {".gotf"}, "features");
    r.frechet = mean.spec(styles.size() + (with_content ? 1 : 0), pipeline.rel_trunc);

    const PixelImage image = read_image(content);
    const auto stats = load_all_stats(styles, r.options);
    const MixResult mixed = mix_styles(SampleMatrix(image.rgb), stats, r);
    const double clamp = write_pixels(mixed.samples, image, output, features_out);
    emit_levels(emit, {{1, clamp, mixed.report.final_residual,
                        mixed.report.iterations_used}});
    emit.put("weights", r.frechet.weights);
    emit.put("output", output);
  }
};

// ---- grid ------------------------------------------------------------------

template <typename F>
void parallel_for(std::size_t count, int jobs, F&& f) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const std::size_t extra = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  for (std::size_t k = 1; k < extra; ++k) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct GridCommand {
  fs::path content;
  std::vector<fs::path> styles;
  fs::path out_dir;
  int corners = 4;
  int resolution = 5;
  int jobs = 1;
  int gap = 2;
  bool with_content = false;
  bool no_montage = false;
  MeanFlags mean;
  MapFlags map;
  PipelineFlags pipeline;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("grid", "Stylize over a grid of style weights");
    cmd->add_option("--content", content, "Content PNG")->required()->check(CLI::ExistingFile);
    cmd->add_option("--style", styles, "Style PNG, GOTF or GOTS, one per corner (repeatable)")
        ->required()
        ->allow_extra_args(false)
        ->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", out_dir, "Directory for cell images")->required();
    cmd->add_option("--corners", corners, "2 (line), 3 (triangle) or 4 (square)")
        ->check(CLI::IsMember({2, 3, 4}))
        ->capture_default_str();
    cmd->add_option("--resolution", resolution, "Cells per side")
        ->check(CLI::Range(2, 64))
        ->capture_default_str();
    cmd->add_option("--jobs", jobs, "Cells stylized concurrently")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    cmd->add_option("--gap", gap, "Montage gap in pixels")
        ->check(CLI::Range(0, 64))
        ->capture_default_str();
    cmd->add_flag("--with-content", with_content, "The content is the last corner");
    cmd->add_flag("--no-montage", no_montage, "Skip the montage image");
    mean.add(cmd, false);
    map.add(cmd);
    pipeline.add(cmd);
  }

  static std::string cell_name(const GridCell& c) {
    return "r" + std::to_string(c.row) + "c" + std::to_string(c.col);
  }

  void run(Emitter& emit) const {
    require_extension(content, {".png"}, "content");
    for (const auto& s : styles) require_extension(s, {".png", ".gotf", ".gots"}, "style");
    const std::size_t corner_count = styles.size() + (with_content ? 1 : 0);
    if (corner_count != static_cast<std::size_t>(corners)) {
      throw UsageError("--corners " + std::to_string(corners) + " needs " +
                       std::to_string(corners) + " corner inputs, got " +
                       std::to_string(corner_count));
    }
    const auto cells = weight_grid(corners, resolution);
    std::vector<MixRequest> requests;
    for (const auto& cell : cells) {
      MixRequest r;
      r.include_content = with_content;
      r.map_kind = map.kind;
      r.t = map.t;
      r.options = pipeline.options();
      r.frechet = mean.spec(cell.weights, corner_count, pipeline.rel_trunc);
      requests.push_back(std::move(r));
    }

    const PixelImage image = read_image(content);
    const SampleMatrix x(image.rgb);
    const auto stats = load_all_stats(styles, pipeline.options());
    fs::create_directories(out_dir);

    struct Outcome {
      PixelImage image;
      double clamp = 0.0;
      MeanReport report;
    };
    std::vector<std::optional<Outcome>> outcomes(cells.size());
    parallel_for(cells.size(), jobs, [&](std::size_t i) {
      MixResult mixed = mix_styles(x, stats, requests[i]);
      auto decoded = PixelCodec().decode(1, mixed.samples,
                                         FeatureShape{3, image.height, image.width});
      write_image(out_dir / ("cell_" + cell_name(cells[i]) + ".png"), decoded.image);
      outcomes[i] = Outcome{std::move(decoded.image), decoded.clamp_fraction,
                            std::move(mixed.report)};
    });

    emit.put("cells", static_cast<long long>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string key = "cell." + cell_name(cells[i]) + ".";
      emit.put(key + "weights", cells[i].weights);
      emit.put(key + "clamp_fraction", outcomes[i]->clamp);
      emit.put(key + "residual", outcomes[i]->report.final_residual);
      emit.put(key + "iterations", outcomes[i]->report.iterations_used);
      emit.put(key + "path", out_dir / ("cell_" + cell_name(cells[i]) + ".png"));
    }
    if (!no_montage) {
      const fs::path montage = out_dir / "montage.png";
      write_image(montage, tile(cells, outcomes, image.width, image.height));
      emit.put("montage", montage);
    }
  }

  template <typename Outcomes>
  PixelImage tile(const std::vector<GridCell>& cells, const Outcomes& outcomes,
                  int width, int height) const {
    const int rows = corners == 2 ? 1 : resolution;
    PixelImage sheet;
    sheet.width = resolution * width + (resolution - 1) * gap;
    sheet.height = rows * height + (rows - 1) * gap;
    sheet.rgb = RowMatrix::Ones(static_cast<Eigen::Index>(sheet.width) * sheet.height, 3);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const int x0 = cells[i].col * (width + gap);
      const int y0 = cells[i].row * (height + gap);
      const RowMatrix& src = outcomes[i]->image.rgb;
      for (int y = 0; y < height; ++y) {
        sheet.rgb.middleRows(static_cast<Eigen::Index>(y0 + y) * sheet.width + x0, width) =
            src.middleRows(static_cast<Eigen::Index>(y) * width, width);
      }
    }
    return sheet;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Gaussian optimal transport style transfer", "gaussot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gaussot 0.1.0");
  StatsCommand stats;
  DistanceCommand distance;
  TransferCommand transfer;
  BarycenterCommand barycenter;
  MixCommand mix;
  GridCommand grid;
  stats.add(app);
  distance.add(app);
  transfer.add(app);
  barycenter.add(app);
  mix.add(app);
  grid.add(app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  Emitter emit(out);
  try {
    if (app.got_subcommand("stats")) stats.run(emit);
    if (app.got_subcommand("distance")) distance.run(emit);
    if (app.got_subcommand("transfer")) transfer.run(emit);
    if (app.got_subcommand("barycenter")) barycenter.run(emit);
    if (app.got_subcommand("mix")) mix.run(emit);
    if (app.got_subcommand("grid")) grid.run(emit);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace gaussot::cli

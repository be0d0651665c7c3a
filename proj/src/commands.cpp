// Copyright 2026 The SVNVS Authors
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

#include "svnvs/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <random>

#include <json.hpp>
#include <torch/torch.h>

#include "svnvs/archive.hpp"
#include "svnvs/error.hpp"
#include "svnvs/image_io.hpp"
#include "svnvs/metrics.hpp"
#include "svnvs/scene_io.hpp"
#include "svnvs/synthetic.hpp"

namespace svnvs {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot read " + path.string(), ErrorCode::kIo);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), "cannot write " + path.string(), ErrorCode::kIo);
  out << text;
  require(out.good(), "write failed: " + path.string(), ErrorCode::kIo);
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

bool has_view(const SceneManifest& m, const std::string& id) {
  for (const auto& v : m.views)
    if (v.id == id) return true;
  return false;
}

/// Loads and resizes views on first use.
class ViewCache {
 public:
  ViewCache(const SceneManifest& manifest, int height, int width)
      : manifest_(manifest), height_(height), width_(width) {}

  const View& get(const ViewRecord& record) {
    auto it = views_.find(record.id);
    if (it == views_.end())
      it = views_.emplace(record.id, resize_view(load_view(manifest_, record), height_, width_)).first;
    return it->second;
  }

 private:
  const SceneManifest& manifest_;
  int height_, width_;
  std::map<std::string, View> views_;
};

struct TrainingSample {
  RenderInput input;
  torch::Tensor target;
};

TrainingSample leave_one_out(ViewCache& cache, const SceneManifest& manifest, const std::string& target_id,
                             const TrainConfig& config, const DepthPlanes& planes) {
  std::vector<View> sources;
  for (const auto& r : select_source_views(manifest, target_id, static_cast<std::size_t>(config.views)))
    sources.push_back(cache.get(r));
  const View& target = cache.get(manifest.find(target_id));
  return {make_render_input(sources, {target.intrinsics, target.pose}, planes), target.image};
}

void write_preview(Trainer& trainer, const TrainingSample& sample, const DepthPlanes& planes,
                   const fs::path& run_dir, const std::string& tag) {
  auto result = trainer.render(sample.input);
  write_image(run_dir / "images" / (tag + ".png"), result.output.clamp(0.0, 1.0));
  auto depth = trainer.model()->depth_map(result, planes);
  write_float_map(run_dir / "depth" / (tag + ".pfm"), depth);
  write_depth_colormap(run_dir / "depth" / (tag + ".png"), depth, planes.d_min, planes.d_max);
}

}  // namespace

TrainOutcome run_train(const TrainOptions& options, const TrainProgress& progress) {
  const SceneManifest manifest = read_manifest(options.scene);
  TrainConfig config = options.config;
  config.d_min = options.d_min.value_or(manifest.d_min);
  config.d_max = options.d_max.value_or(manifest.d_max);
  require(config.steps >= 0, "steps must be non-negative");
  require(config.views >= 1, "views must be at least 1");
  require(config.planes >= 2, "planes must be at least 2");
  require(options.checkpoint_every >= 0, "checkpoint interval must be non-negative");
  require(config.views < static_cast<int>(manifest.views.size()),
          "scene has " + std::to_string(manifest.views.size()) + " views; need more than --views " +
              std::to_string(config.views));
  if (!options.target.empty())
    require(has_view(manifest, options.target), "unknown target view '" + options.target + "'",
            ErrorCode::kNotFound);

  nlohmann::json snapshot;
  snapshot["train"] = config.to_json();
  snapshot["scene"] = manifest.name;
  snapshot["scene_hash"] = hex64(fnv1a(slurp(options.scene)));
  snapshot["target"] = options.target;
  snapshot["checkpoint_every"] = options.checkpoint_every;
  const std::string snapshot_text = snapshot.dump(2) + "\n";

  TrainOutcome outcome;
  outcome.run_id = (manifest.name.empty() ? "run" : manifest.name) + "-" +
                   hex64(fnv1a(snapshot_text)).substr(0, 12);
  outcome.run_dir = options.out_root / outcome.run_id;
  for (const char* sub : {"checkpoints", "images", "depth"}) fs::create_directories(outcome.run_dir / sub);
  write_text(outcome.run_dir / "config.snapshot", snapshot_text);

  std::ofstream metrics(outcome.run_dir / "metrics.csv", std::ios::trunc);
  require(metrics.good(), "cannot write metrics.csv", ErrorCode::kIo);
  metrics << "step,l1,perceptual,adv_g,adv_d,psnr\n";

  Trainer trainer(config);
  const auto planes = sample_depth_planes(config.d_min, config.d_max, config.planes);
  ViewCache cache(manifest, config.height, config.width);
  std::vector<std::string> targets;
  if (options.target.empty()) {
    for (const auto& v : manifest.views) targets.push_back(v.id);
  } else {
    targets.push_back(options.target);
  }
  std::map<std::string, TrainingSample> samples;
  auto sample_for = [&](const std::string& id) -> const TrainingSample& {
    auto it = samples.find(id);
    if (it == samples.end()) it = samples.emplace(id, leave_one_out(cache, manifest, id, config, planes)).first;
    return it->second;
  };

  auto checkpoint_path = [&](std::int64_t step) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%06lld.ckpt", static_cast<long long>(step));
    return outcome.run_dir / "checkpoints" / name;
  };

  std::mt19937_64 rng(config.seed);
  for (int s = 0; s < config.steps; ++s) {
    const std::string& id = targets[targets.size() == 1 ? 0 : rng() % targets.size()];
    const auto& sample = sample_for(id);
    if (config.crop_height > 0) {
      const int top = static_cast<int>(rng() % static_cast<std::uint64_t>(config.height - config.crop_height + 1));
      const int left = static_cast<int>(rng() % static_cast<std::uint64_t>(config.width - config.crop_width + 1));
      const auto window = crop_target(sample.input, sample.target, top, left, config.crop_height, config.crop_width);
      outcome.last = trainer.step(window.input, window.target);
    } else {
      outcome.last = trainer.step(sample.input, sample.target);
    }
    const std::int64_t step = trainer.steps_done();
    metrics << step << ',' << csv_number(outcome.last.l1) << ',' << csv_number(outcome.last.perceptual) << ','
            << csv_number(outcome.last.adversarial_g) << ',' << csv_number(outcome.last.adversarial_d) << ','
            << csv_number(outcome.last.psnr) << '\n';
    metrics.flush();
    if (progress) progress(step, outcome.last);
    if (options.checkpoint_every > 0 && step % options.checkpoint_every == 0 && s + 1 < config.steps)
      trainer.save(checkpoint_path(step));
  }
  outcome.steps = trainer.steps_done();
  outcome.checkpoint = checkpoint_path(outcome.steps);
  trainer.save(outcome.checkpoint);
  trainer.save(outcome.run_dir / "checkpoints" / "final.ckpt");
  write_preview(trainer, sample_for(targets.front()), planes, outcome.run_dir, targets.front());
  return outcome;
}

SynthesizeOutcome run_synthesize(const SynthesizeOptions& options) {
  require(fs::exists(options.checkpoint), "checkpoint not found: " + options.checkpoint.string(),
          ErrorCode::kNotFound);
  require(!options.out.empty(), "output directory required");
  require(!options.target.empty(), "target required");
  Trainer trainer = Trainer::load(options.checkpoint);
  const TrainConfig& config = trainer.config();
  const SceneManifest manifest = read_manifest(options.scene);
  const auto planes = sample_depth_planes(config.d_min, config.d_max, config.planes);
  ViewCache cache(manifest, config.height, config.width);

  SynthesizeOutcome outcome;
  torch::Tensor reference;
  Camera target;
  std::vector<ViewRecord> source_records;
  if (has_view(manifest, options.target)) {
    const View& view = cache.get(manifest.find(options.target));
    target = {view.intrinsics, view.pose};
    reference = view.image;
    outcome.target = view.id;
    source_records = select_source_views(manifest, view.id, static_cast<std::size_t>(config.views));
  } else {
    require(fs::exists(options.target),
            "target '" + options.target + "' is neither a view id nor a pose file", ErrorCode::kNotFound);
    ViewRecord record = read_pose_file(options.target);
    target = {rescale_intrinsics(record.intrinsics, config.height, config.width), record.pose};
    outcome.target = record.id.empty() ? fs::path(options.target).stem().string() : record.id;
    source_records = select_source_views(manifest, record.pose, static_cast<std::size_t>(config.views));
  }
  std::vector<View> sources;
  for (const auto& r : source_records) {
    sources.push_back(cache.get(r));
    outcome.sources.push_back(r.id);
  }

  fs::create_directories(options.out);
  auto emit = [&](const fs::path& name) {
    outcome.files.push_back(options.out / name);
    return options.out / name;
  };
  auto result = trainer.render(make_render_input(sources, target, planes));
  auto image = result.output.clamp(0.0, 1.0);
  write_image(emit("final.png"), image);
  write_image(emit("aggregated.png"), result.aggregated.image.clamp(0.0, 1.0));
  for (std::size_t i = 0; i < sources.size(); ++i)
    write_image(emit("warp_" + sources[i].id + ".png"),
                result.aggregated.warps[static_cast<int64_t>(i)].clamp(0.0, 1.0));
  auto depth = trainer.model()->depth_map(result, planes);
  write_float_map(emit("depth.pfm"), depth);
  write_depth_colormap(emit("depth.png"), depth, planes.d_min, planes.d_max);

  if (reference.defined()) {
    outcome.has_reference = true;
    outcome.psnr = psnr(image, reference);
    outcome.ssim = ssim(image, reference);
    write_image(emit("residual.png"), (image - reference).abs());
    write_text(emit("metrics.csv"), "target,psnr,ssim\n" + outcome.target + "," + csv_number(outcome.psnr) +
                                        "," + csv_number(outcome.ssim) + "\n");
  }

  if (options.permute_sources && sources.size() > 1) {
    std::vector<std::size_t> order(sources.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(options.seed);
    // Shuffle until the order differs; a single source has nothing to permute.
    do {
      std::shuffle(order.begin(), order.end(), rng);
    } while (std::is_sorted(order.begin(), order.end()));
    std::vector<View> permuted;
    for (auto i : order) permuted.push_back(sources[i]);
    auto again = trainer.render(make_render_input(permuted, target, planes));
    outcome.permutation_deviation = (again.output - result.output).abs().max().item<double>();
    std::string line = "order";
    for (auto i : order) line += "," + sources[i].id;
    write_text(emit("permutation.csv"),
               line + "\nmax_abs_deviation," + csv_number(*outcome.permutation_deviation) + "\n");
  }
  return outcome;
}

std::vector<std::string> synthetic_layouts() { return {"two_plane"}; }

SceneManifest run_generate(const GenerateOptions& options) {
  require(options.layout == "two_plane", "unknown layout '" + options.layout + "'");
  require(!options.out.empty(), "output directory required");
  auto scene = generate_synthetic_scene(two_plane_layout(options.width, options.height), options.views,
                                        options.seed);
  write_synthetic_scene(scene, options.out);
  return scene.manifest;
}

SceneManifest run_import_colmap(const ImportColmapOptions& options) {
  require(!options.out.empty(), "output manifest path required");
  SceneManifest m = import_colmap(options.cameras, options.images, options.images_dir, options.d_min,
                                  options.d_max);
  const fs::path dest_dir = fs::absolute(options.out).parent_path();
  for (auto& v : m.views)
    v.image_path = fs::proximate(fs::absolute(m.resolve(v)), dest_dir).generic_string();
  m.base_dir = dest_dir;
  if (m.name.empty()) m.name = dest_dir.filename().string();
  fs::create_directories(dest_dir);
  write_manifest(m, options.out);
  return m;
}

}  // namespace svnvs

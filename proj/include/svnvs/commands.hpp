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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "svnvs/checks.hpp"
#include "svnvs/training.hpp"

namespace svnvs {

struct TrainOptions {
  std::filesystem::path scene;            // manifest.json
  std::filesystem::path out_root = "runs";
  TrainConfig config;
  // Depth range; unset takes the manifest's.
  std::optional<double> d_min, d_max;
  // Fixed training target. Empty: leave-one-out over every view, drawn with
  // the config seed.
  std::string target;
  int checkpoint_every = 0;  // 0: final checkpoint only
};

struct TrainOutcome {
  std::string run_id;
  std::filesystem::path run_dir;
  std::filesystem::path checkpoint;
  std::int64_t steps = 0;
  LossReport last;
};

using TrainProgress = std::function<void(std::int64_t step, const LossReport&)>;

/// Trains into out_root/run_id/{checkpoints, images, depth, metrics.csv,
/// config.snapshot}. The run id is a content hash of the snapshot and the
/// manifest bytes, so identical inputs land in the same directory.
TrainOutcome run_train(const TrainOptions& options, const TrainProgress& progress = {});

struct SynthesizeOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path scene;
  std::string target;  // view id in the scene, or a pose file path
  std::filesystem::path out;
  bool permute_sources = false;
  std::uint64_t seed = 0;  // source permutation order
};

struct SynthesizeOutcome {
  std::string target;
  std::vector<std::string> sources;
  bool has_reference = false;
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> permutation_deviation;  // max |I - I_perm| per pixel
  std::vector<std::filesystem::path> files;
};

SynthesizeOutcome run_synthesize(const SynthesizeOptions& options);

/// Named synthetic layouts accepted by run_generate ("two_plane").
std::vector<std::string> synthetic_layouts();

struct GenerateOptions {
  std::string layout = "two_plane";
  int views = 4;
  int height = 96;
  int width = 128;
  std::uint64_t seed = 7;
  std::filesystem::path out;
};

/// Renders a synthetic scene (images, ground-truth depth, manifest) to `out`.
SceneManifest run_generate(const GenerateOptions& options);

struct ImportColmapOptions {
  std::filesystem::path cameras;
  std::filesystem::path images;
  std::filesystem::path images_dir;
  double d_min = 0.0;
  double d_max = 0.0;
  std::filesystem::path out;  // manifest path
};

SceneManifest run_import_colmap(const ImportColmapOptions& options);

}  // namespace svnvs

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
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "svnvs/scene_io.hpp"

namespace svnvs {

/// Textured rectangle at world depth `z`, facing the cameras. Unbounded
/// extents make it a backdrop.
struct TexturedPlane {
  double z = 1.0;
  double x_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();
  double y_min = -std::numeric_limits<double>::infinity();
  double y_max = std::numeric_limits<double>::infinity();
};

struct AxisBox {
  Vec3 min{};
  Vec3 max{};
};

/// Scene geometry plus the camera rig that observes it. View 0 sits at the
/// world origin looking down +z; the remaining views are spread on a circle of
/// radius `baseline` in the z = 0 plane, all with identity rotation.
struct SyntheticLayout {
  std::string name = "synthetic";
  std::vector<TexturedPlane> planes;
  std::vector<AxisBox> boxes;
  double d_min = 1.0;
  double d_max = 10.0;
  int width = 128;
  int height = 96;
  double focal = 100.0;
  double baseline = 0.3;
  double rig_phase = 0.0;          // radians, rotates the source circle
  double texture_wavelength_px = 12.0;  // dominant texture period in view-0 pixels
};

struct SyntheticScene {
  SceneManifest manifest;
  std::vector<View> views;
  std::vector<torch::Tensor> gt_depth;  // per view, float64 [H, W], meters
  // gt_visibility[t * n + s]: bool [H, W], target pixel of t visible in s.
  std::vector<torch::Tensor> gt_visibility;

  const torch::Tensor& visibility(std::size_t target, std::size_t source) const {
    return gt_visibility[target * views.size() + source];
  }
};

/// Closest intersection of a world-space ray with the layout.
struct RayHit {
  double t = 0.0;  // ray parameter; equals camera depth for unit-z directions
  Vec3 point{};
  int primitive = -1;  // planes first, then boxes
};
std::optional<RayHit> intersect_layout(const SyntheticLayout& layout, const Vec3& origin,
                                       const Vec3& direction);

/// Renders a deterministic scene: z-buffered images, exact depth maps and
/// per-pair visibility masks.
SyntheticScene generate_synthetic_scene(const SyntheticLayout& layout, int n_views,
                                        std::uint64_t seed);

/// The two-plane occlusion fixture: a textured card at 2 m in front of a
/// backdrop at 4 m.
SyntheticLayout two_plane_layout(int width, int height);

/// Writes images, manifest and depth maps so the scene can be used from disk.
void write_synthetic_scene(const SyntheticScene& scene, const std::filesystem::path& dir);

}  // namespace svnvs

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

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <torch/torch.h>

namespace svnvs {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;  // row-major

/// Pinhole intrinsics in pixels. (0,0) is the center of the top-left pixel.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
};

/// World-to-camera rigid transform: x_cam = rotation * x_world + translation.
struct CameraPose {
  Mat3 rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec3 translation = {0, 0, 0};

  void validate() const;
  /// Camera center in world coordinates, -R^T t.
  Vec3 center() const;
};

/// Manifest entry: camera parameters plus where the pixels live.
struct ViewRecord {
  std::string id;
  std::string image_path;  // relative paths resolve against the manifest dir
  CameraIntrinsics intrinsics;
  CameraPose pose;
};

/// A loaded observation. `image` is a float32 [3, H, W] tensor in [0, 1].
struct View {
  std::string id;
  torch::Tensor image;
  CameraIntrinsics intrinsics;
  CameraPose pose;

  void validate() const;
};

struct SceneManifest {
  std::string name;
  double d_min = 0.0;
  double d_max = 0.0;
  std::vector<ViewRecord> views;
  std::filesystem::path base_dir;  // not serialized

  void validate() const;
  const ViewRecord& find(const std::string& id) const;
  std::filesystem::path resolve(const ViewRecord& record) const;
};

/// Quaternion (w, x, y, z) to a row-major rotation matrix. The quaternion is
/// normalized first.
Mat3 quaternion_to_rotation(double qw, double qx, double qy, double qz);

/// Reads a COLMAP text export (cameras.txt / images.txt). Supports the
/// PINHOLE and SIMPLE_PINHOLE models. Image order follows images.txt.
SceneManifest import_colmap(const std::filesystem::path& cameras_text,
                            const std::filesystem::path& images_text,
                            const std::filesystem::path& images_dir,
                            double d_min, double d_max);

SceneManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const SceneManifest& manifest,
                    const std::filesystem::path& path);

/// Single-view pose file used for free-viewpoint synthesis. Same schema as a
/// manifest view entry; `image_path` may be empty.
ViewRecord read_pose_file(const std::filesystem::path& path);
void write_pose_file(const ViewRecord& record, const std::filesystem::path& path);

/// The `n` views closest to the target by camera-center distance. Ties keep
/// manifest order; the target itself is never returned.
std::vector<ViewRecord> select_source_views(const SceneManifest& manifest,
                                            const std::string& target_id,
                                            std::size_t n);
/// Same ordering for an arbitrary target pose; views whose id equals
/// `exclude_id` are skipped.
std::vector<ViewRecord> select_source_views(const SceneManifest& manifest, const CameraPose& target,
                                            std::size_t n, const std::string& exclude_id = {});

View load_view(const SceneManifest& manifest, const ViewRecord& record);

}  // namespace svnvs

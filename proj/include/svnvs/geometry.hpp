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

#include <span>
#include <vector>

#include <torch/torch.h>

#include "svnvs/scene_io.hpp"

namespace svnvs {

/// Fronto-parallel sweep planes in the target frame, uniform in inverse depth.
struct DepthPlanes {
  std::vector<double> depths;  // strictly increasing, near to far
  double d_min = 0.0;
  double d_max = 0.0;

  int count() const { return static_cast<int>(depths.size()); }
  /// Spacing between consecutive planes in inverse depth (positive).
  double inverse_spacing() const;
  torch::Tensor tensor(torch::Dtype dtype = torch::kFloat32) const;
};

DepthPlanes sample_depth_planes(double d_min, double d_max, int count);

/// Per-source samples on the target sweep.
///   data:  [N, D, C, H, W], zero wherever `valid` is zero
///   valid: [N, D, H, W], 1 where the sample lands inside the source frame
///          and in front of the source camera, else 0 (same dtype as data)
struct WarpedVolume {
  torch::Tensor data;
  torch::Tensor valid;

  int64_t sources() const { return data.size(0); }
  int64_t planes() const { return data.size(1); }
  int64_t channels() const { return data.size(2); }
};

struct Camera {
  CameraIntrinsics intrinsics;
  CameraPose pose;
};

/// Inverse-warps source images or feature maps onto the target sweep.
/// `sources` is [N, C, Hs, Ws] with one camera per source; every source must
/// share the same resolution. Samples are bilinear in continuous pixel
/// coordinates; out-of-frame samples are zero and invalid.
WarpedVolume warp_to_target(const torch::Tensor& sources, std::span<const Camera> source_cameras,
                            const Camera& target, const DepthPlanes& planes);

/// Expected depth sum_k prob[k] * depth[k] for a [..., D, H, W] distribution.
/// Throws if any pixel's distribution is negative or does not sum to one
/// within 1e-5.
torch::Tensor softargmax_depth(const torch::Tensor& prob, const DepthPlanes& planes);

}  // namespace svnvs

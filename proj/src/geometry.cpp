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

#include "svnvs/geometry.hpp"

#include <cmath>

#include "svnvs/error.hpp"

namespace svnvs {
namespace {

constexpr double kNormTol = 1e-5;

// Row-major 3x3 helpers on the pose arrays.
Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i * 3 + j] += a[i * 3 + k] * b[k * 3 + j];
  return c;
}

Mat3 transpose(const Mat3& a) {
  return {a[0], a[3], a[6], a[1], a[4], a[7], a[2], a[5], a[8]};
}

void require_finite(const CameraPose& pose, const char* what) {
  for (double v : pose.rotation) require(std::isfinite(v), std::string(what) + ": non-finite pose");
  for (double v : pose.translation)
    require(std::isfinite(v), std::string(what) + ": non-finite pose");
}

}  // namespace

double DepthPlanes::inverse_spacing() const {
  return (1.0 / d_min - 1.0 / d_max) / (count() - 1);
}

torch::Tensor DepthPlanes::tensor(torch::Dtype dtype) const {
  return torch::tensor(depths, torch::kFloat64).to(dtype);
}

DepthPlanes sample_depth_planes(double d_min, double d_max, int count) {
  require(std::isfinite(d_min) && std::isfinite(d_max) && 0 < d_min && d_min < d_max,
          "sample_depth_planes: need 0 < d_min < d_max");
  require(count >= 2, "sample_depth_planes: need at least two planes");
  DepthPlanes planes;
  planes.d_min = d_min;
  planes.d_max = d_max;
  planes.depths.resize(count);
  const double near = 1.0 / d_min, far = 1.0 / d_max;
  for (int k = 0; k < count; ++k) {
    const double s = static_cast<double>(k) / (count - 1);
    planes.depths[k] = 1.0 / (near + s * (far - near));
  }
  planes.depths.front() = d_min;
  planes.depths.back() = d_max;
  return planes;
}

WarpedVolume warp_to_target(const torch::Tensor& sources, std::span<const Camera> source_cameras,
                            const Camera& target, const DepthPlanes& planes) {
  require(sources.dim() == 4, "warp_to_target: sources must be [N, C, H, W]");
  require(static_cast<std::size_t>(sources.size(0)) == source_cameras.size(),
          "warp_to_target: one camera per source required");
  require(planes.count() >= 1, "warp_to_target: no depth planes");
  require_finite(target.pose, "warp_to_target target");
  const int H = target.intrinsics.height, W = target.intrinsics.width;
  const int64_t Hs = sources.size(2), Ws = sources.size(3);
  require(Hs >= 2 && Ws >= 2, "warp_to_target: source must be at least 2x2");
  const int D = planes.count();
  const auto opts = torch::TensorOptions().dtype(torch::kFloat64);

  // Target rays K_t^{-1} [u, v, 1]^T on the pixel-center grid.
  const auto& kt = target.intrinsics;
  auto us = (torch::arange(W, opts) - kt.cx) / kt.fx;
  auto vs = (torch::arange(H, opts) - kt.cy) / kt.fy;
  auto grid_yx = torch::meshgrid({vs, us}, "ij");
  auto rays = torch::stack({grid_yx[1], grid_yx[0], torch::ones({H, W}, opts)}, -1);  // [H,W,3]
  auto depth = planes.tensor(torch::kFloat64).view({D, 1, 1, 1});
  auto points_t = depth * rays.unsqueeze(0);  // [D,H,W,3] in target camera frame

  std::vector<torch::Tensor> data, valid;
  data.reserve(source_cameras.size());
  valid.reserve(source_cameras.size());
  const Mat3 rt_inv = transpose(target.pose.rotation);
  for (std::size_t i = 0; i < source_cameras.size(); ++i) {
    const auto& cam = source_cameras[i];
    require_finite(cam.pose, "warp_to_target source");
    require(cam.intrinsics.width == Ws && cam.intrinsics.height == Hs,
            "warp_to_target: source tensor size does not match its intrinsics");
    // x_s = R_s R_t^T (x_t - t_t) + t_s
    const Mat3 rel = mul(cam.pose.rotation, rt_inv);
    Vec3 offset = cam.pose.translation;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) offset[r] -= rel[r * 3 + c] * target.pose.translation[c];
    auto rot = torch::tensor(std::vector<double>(rel.begin(), rel.end()), opts).view({3, 3});
    auto trans = torch::tensor(std::vector<double>(offset.begin(), offset.end()), opts);
    auto ps = torch::matmul(points_t, rot.t()) + trans;  // [D,H,W,3]
    auto z = ps.select(-1, 2);
    auto in_front = z > 1e-12;
    auto safe_z = torch::where(in_front, z, torch::ones_like(z));
    const auto& ks = cam.intrinsics;
    auto x = ks.fx * ps.select(-1, 0) / safe_z + ks.cx;
    auto y = ks.fy * ps.select(-1, 1) / safe_z + ks.cy;
    // Round-off must not push a border-pixel center out of the frame.
    constexpr double kEdge = 1e-6;
    auto inside = in_front & (x >= -kEdge) & (x <= Ws - 1 + kEdge) & (y >= -kEdge) & (y <= Hs - 1 + kEdge);
    x = x.clamp(0, Ws - 1);
    y = y.clamp(0, Hs - 1);
    // align_corners=true maps -1/+1 onto the centers of the border pixels.
    auto gx = torch::where(inside, 2.0 * x / (Ws - 1) - 1.0, torch::full_like(x, -2.0));
    auto gy = torch::where(inside, 2.0 * y / (Hs - 1) - 1.0, torch::full_like(y, -2.0));
    auto grid = torch::stack({gx, gy}, -1).view({1, D * H, W, 2}).to(sources.scalar_type());
    auto sampled = torch::nn::functional::grid_sample(
        sources.slice(0, i, i + 1), grid,
        torch::nn::functional::GridSampleFuncOptions()
            .mode(torch::kBilinear)
            .padding_mode(torch::kZeros)
            .align_corners(true));  // [1,C,D*H,W]
    const int64_t C = sources.size(1);
    auto mask = inside.to(sources.scalar_type());  // [D,H,W]
    auto vol = sampled.view({C, D, H, W}).permute({1, 0, 2, 3}) * mask.unsqueeze(1);
    data.push_back(vol);
    valid.push_back(mask);
  }
  return {torch::stack(data), torch::stack(valid)};
}

torch::Tensor softargmax_depth(const torch::Tensor& prob, const DepthPlanes& planes) {
  require(prob.dim() >= 3 && prob.size(-3) == planes.count(),
          "softargmax_depth: expected [..., D, H, W] with D matching the planes");
  const auto p = prob.detach();
  require(p.min().item<double>() >= 0.0, "softargmax_depth: negative probability");
  const double dev = (p.sum(-3) - 1.0).abs().max().item<double>();
  require(dev <= kNormTol, "softargmax_depth: distribution not normalized (max deviation " +
                               std::to_string(dev) + ")");
  auto depths = planes.tensor(prob.scalar_type()).view({planes.count(), 1, 1});
  return (prob * depths).sum(-3);
}

}  // namespace svnvs

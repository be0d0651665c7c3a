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

#include "svnvs/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "svnvs/error.hpp"
#include "svnvs/image_io.hpp"

namespace svnvs {
namespace {

constexpr double kVisibilityTol = 1e-4;
constexpr double kRayEps = 1e-9;

// Portable uniform draw in [0, 1); std distributions are implementation-defined.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Wave {
  double kx, ky, phase, amp;
};

struct Texture {
  std::array<std::vector<Wave>, 3> channels;

  Vec3 eval(double a, double b) const {
    Vec3 rgb{};
    for (int c = 0; c < 3; ++c) {
      double sum = 0.0, norm = 0.0;
      for (const auto& w : channels[c]) {
        sum += w.amp * std::sin(2.0 * std::numbers::pi * (w.kx * a + w.ky * b) + w.phase);
        norm += w.amp;
      }
      rgb[c] = 0.5 + 0.45 * sum / norm;
    }
    return rgb;
  }
};

Texture make_texture(std::mt19937_64& rng, double base_frequency) {
  Texture tex;
  // Shared luminance waves keep the channels correlated like natural images.
  std::vector<Wave> shared;
  for (int k = 0; k < 6; ++k) {
    const double octave = k < 4 ? 1.0 : 2.0;
    const double freq = base_frequency * octave * (0.6 + 0.8 * uniform01(rng));
    const double angle = 2.0 * std::numbers::pi * uniform01(rng);
    shared.push_back({freq * std::cos(angle), freq * std::sin(angle),
                      2.0 * std::numbers::pi * uniform01(rng), 1.0 / octave});
  }
  for (int c = 0; c < 3; ++c) {
    tex.channels[c] = shared;
    for (int k = 0; k < 2; ++k) {
      const double freq = base_frequency * (0.6 + 0.8 * uniform01(rng));
      const double angle = 2.0 * std::numbers::pi * uniform01(rng);
      tex.channels[c].push_back({freq * std::cos(angle), freq * std::sin(angle),
                                 2.0 * std::numbers::pi * uniform01(rng), 0.5});
    }
  }
  return tex;
}

struct Hit {
  RayHit ray;
  int face_axis = 2;  // axis of the face normal
};

std::optional<Hit> intersect(const SyntheticLayout& layout, const Vec3& o, const Vec3& d) {
  std::optional<Hit> best;
  auto consider = [&](double t, int primitive, int axis) {
    if (t <= kRayEps) return;
    if (best && t >= best->ray.t) return;
    Hit h;
    h.ray.t = t;
    h.ray.point = {o[0] + t * d[0], o[1] + t * d[1], o[2] + t * d[2]};
    h.ray.primitive = primitive;
    h.face_axis = axis;
    best = h;
  };
  for (std::size_t i = 0; i < layout.planes.size(); ++i) {
    const auto& p = layout.planes[i];
    if (std::abs(d[2]) < kRayEps) continue;
    const double t = (p.z - o[2]) / d[2];
    const double x = o[0] + t * d[0], y = o[1] + t * d[1];
    if (x >= p.x_min && x <= p.x_max && y >= p.y_min && y <= p.y_max)
      consider(t, static_cast<int>(i), 2);
  }
  for (std::size_t j = 0; j < layout.boxes.size(); ++j) {
    const auto& b = layout.boxes[j];
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    int axis_near = 2;
    bool miss = false;
    for (int a = 0; a < 3 && !miss; ++a) {
      if (std::abs(d[a]) < kRayEps) {
        if (o[a] < b.min[a] || o[a] > b.max[a]) miss = true;
        continue;
      }
      double t0 = (b.min[a] - o[a]) / d[a];
      double t1 = (b.max[a] - o[a]) / d[a];
      if (t0 > t1) std::swap(t0, t1);
      if (t0 > t_near) {
        t_near = t0;
        axis_near = a;
      }
      t_far = std::min(t_far, t1);
    }
    if (!miss && t_near <= t_far)
      consider(t_near, static_cast<int>(layout.planes.size() + j), axis_near);
  }
  return best;
}

void validate_layout(const SyntheticLayout& layout, int n_views) {
  require(n_views >= 2, "synthetic scene: need at least two views");
  require(layout.d_min > 0 && layout.d_min < layout.d_max,
          "synthetic scene: need 0 < d_min < d_max");
  require(layout.width > 0 && layout.height > 0 && layout.focal > 0 &&
              layout.texture_wavelength_px > 0,
          "synthetic scene: bad camera parameters");
  require(!layout.planes.empty() || !layout.boxes.empty(), "synthetic scene: empty layout");
  auto in_range = [&](double z) { return z >= layout.d_min && z <= layout.d_max; };
  for (const auto& p : layout.planes)
    require(in_range(p.z), "synthetic scene: plane at z=" + std::to_string(p.z) +
                               " lies outside the depth range");
  for (const auto& b : layout.boxes) {
    require(b.min[0] < b.max[0] && b.min[1] < b.max[1] && b.min[2] < b.max[2],
            "synthetic scene: degenerate box");
    require(in_range(b.min[2]) && in_range(b.max[2]),
            "synthetic scene: box lies outside the depth range");
  }
}

Vec3 camera_ray_world(const ViewRecord& v, double u, double vv) {
  const auto& k = v.intrinsics;
  const Vec3 dc{(u - k.cx) / k.fx, (vv - k.cy) / k.fy, 1.0};
  const auto& R = v.pose.rotation;
  return {R[0] * dc[0] + R[3] * dc[1] + R[6] * dc[2],
          R[1] * dc[0] + R[4] * dc[1] + R[7] * dc[2],
          R[2] * dc[0] + R[5] * dc[1] + R[8] * dc[2]};
}

Vec3 world_to_camera(const CameraPose& pose, const Vec3& p) {
  const auto& R = pose.rotation;
  const auto& t = pose.translation;
  return {R[0] * p[0] + R[1] * p[1] + R[2] * p[2] + t[0],
          R[3] * p[0] + R[4] * p[1] + R[5] * p[2] + t[1],
          R[6] * p[0] + R[7] * p[1] + R[8] * p[2] + t[2]};
}

}  // namespace

std::optional<RayHit> intersect_layout(const SyntheticLayout& layout, const Vec3& origin,
                                       const Vec3& direction) {
  auto h = intersect(layout, origin, direction);
  if (!h) return std::nullopt;
  return h->ray;
}

SyntheticLayout two_plane_layout(int width, int height) {
  SyntheticLayout layout;
  layout.name = "two_planes";
  layout.width = width;
  layout.height = height;
  layout.focal = 100.0 * width / 128.0;
  layout.d_min = 1.5;
  layout.d_max = 6.0;
  layout.baseline = 0.3;
  layout.rig_phase = 0.0;
  TexturedPlane card;
  card.z = 2.0;
  card.x_min = -0.7;
  card.x_max = 0.7;
  card.y_min = -0.55;
  card.y_max = 0.55;
  TexturedPlane backdrop;
  backdrop.z = 4.0;
  layout.planes = {card, backdrop};
  return layout;
}

SyntheticScene generate_synthetic_scene(const SyntheticLayout& layout, int n_views,
                                        std::uint64_t seed) {
  validate_layout(layout, n_views);
  std::mt19937_64 rng(seed);
  std::vector<Texture> textures;
  const std::size_t n_prims = layout.planes.size() + layout.boxes.size();
  for (std::size_t i = 0; i < n_prims; ++i)
    textures.push_back(make_texture(rng, layout.focal / layout.texture_wavelength_px));

  SyntheticScene scene;
  auto& m = scene.manifest;
  m.name = layout.name;
  m.d_min = layout.d_min;
  m.d_max = layout.d_max;
  for (int k = 0; k < n_views; ++k) {
    ViewRecord v;
    char id[32];
    std::snprintf(id, sizeof(id), "view_%02d", k);
    v.id = id;
    v.image_path = std::string("images/") + id + ".png";
    v.intrinsics = {layout.focal, layout.focal, (layout.width - 1) / 2.0,
                    (layout.height - 1) / 2.0, layout.width, layout.height};
    Vec3 c{0, 0, 0};
    if (k > 0) {
      const double theta = layout.rig_phase + 2.0 * std::numbers::pi * (k - 1) / (n_views - 1);
      c = {layout.baseline * std::cos(theta), layout.baseline * std::sin(theta), 0.0};
    }
    v.pose.translation = {-c[0], -c[1], -c[2]};
    m.views.push_back(v);
  }

  const int H = layout.height, W = layout.width;
  for (const auto& rec : m.views) {
    auto image = torch::empty({3, H, W}, torch::kFloat32);
    auto depth = torch::empty({H, W}, torch::kFloat64);
    auto img = image.accessor<float, 3>();
    auto dep = depth.accessor<double, 2>();
    const Vec3 origin = rec.pose.center();
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const auto hit = intersect(layout, origin, camera_ray_world(rec, x, y));
        if (!hit)
          fail(ErrorCode::kInvalidArgument, "synthetic scene: view " + rec.id + " pixel (" +
                                                std::to_string(x) + "," + std::to_string(y) +
                                                ") sees no geometry");
        const double z = world_to_camera(rec.pose, hit->ray.point)[2];
        if (z < layout.d_min - 1e-9 || z > layout.d_max + 1e-9)
          fail(ErrorCode::kInvalidArgument,
               "synthetic scene: visible geometry outside the depth range in view " + rec.id);
        const auto& p = hit->ray.point;
        double a = 0, b = 0, ref_z = 1;
        const int prim = hit->ray.primitive;
        if (prim < static_cast<int>(layout.planes.size())) {
          ref_z = layout.planes[prim].z;
          a = p[0];
          b = p[1];
        } else {
          ref_z = layout.boxes[prim - layout.planes.size()].min[2];
          const int axis = hit->face_axis;
          a = p[(axis + 1) % 3];
          b = p[(axis + 2) % 3];
        }
        const Vec3 rgb = textures[prim].eval(a / ref_z, b / ref_z);
        for (int c = 0; c < 3; ++c) img[c][y][x] = static_cast<float>(rgb[c]);
        dep[y][x] = z;
      }
    }
    View v;
    v.id = rec.id;
    v.image = image;
    v.intrinsics = rec.intrinsics;
    v.pose = rec.pose;
    scene.views.push_back(std::move(v));
    scene.gt_depth.push_back(depth);
  }

  const std::size_t n = m.views.size();
  scene.gt_visibility.resize(n * n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& tv = m.views[t];
    const auto dep = scene.gt_depth[t].accessor<double, 2>();
    for (std::size_t s = 0; s < n; ++s) {
      if (s == t) continue;
      const auto& sv = m.views[s];
      auto vis = torch::zeros({H, W}, torch::kBool);
      auto acc = vis.accessor<bool, 2>();
      const Vec3 src_origin = sv.pose.center();
      const auto& k = sv.intrinsics;
      for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
          const Vec3 dirw = camera_ray_world(tv, x, y);
          const Vec3 o = tv.pose.center();
          const double z = dep[y][x];
          const Vec3 pw{o[0] + z * dirw[0], o[1] + z * dirw[1], o[2] + z * dirw[2]};
          const Vec3 ps = world_to_camera(sv.pose, pw);
          if (ps[2] <= 0) continue;
          const double u = k.fx * ps[0] / ps[2] + k.cx;
          const double v = k.fy * ps[1] / ps[2] + k.cy;
          if (u < 0 || u > k.width - 1 || v < 0 || v > k.height - 1) continue;
          // Occluded only by a surface strictly in front of the point. On a
          // silhouette edge the source ray may slip past the point itself.
          const auto hit = intersect(layout, src_origin, camera_ray_world(sv, u, v));
          const double z_hit = hit ? world_to_camera(sv.pose, hit->ray.point)[2] : ps[2];
          acc[y][x] = z_hit >= ps[2] - kVisibilityTol;
        }
      }
      scene.gt_visibility[t * n + s] = vis;
    }
  }
  return scene;
}

void write_synthetic_scene(const SyntheticScene& scene, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "images");
  std::filesystem::create_directories(dir / "depth");
  for (std::size_t i = 0; i < scene.views.size(); ++i) {
    write_image(dir / scene.manifest.views[i].image_path, scene.views[i].image);
    write_float_map(dir / "depth" / (scene.views[i].id + ".pfm"), scene.gt_depth[i]);
  }
  write_manifest(scene.manifest, dir / "manifest.json");
}

}  // namespace svnvs

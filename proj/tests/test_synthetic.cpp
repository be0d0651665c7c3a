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

#include "doctest_torch.hpp"

#include "svnvs/error.hpp"
#include "svnvs/image_io.hpp"
#include "svnvs/synthetic.hpp"
#include "test_util.hpp"

using namespace svnvs;
using svnvs::test::max_abs_diff;
using svnvs::test::TempDir;

TEST_CASE("single plane seen from co-located cameras has constant depth") {
  SyntheticLayout layout;
  layout.width = 24;
  layout.height = 16;
  layout.focal = 20;
  layout.baseline = 0.0;
  layout.d_min = 1;
  layout.d_max = 3;
  layout.planes = {TexturedPlane{2.0}};
  auto scene = generate_synthetic_scene(layout, 3, 1);
  for (const auto& d : scene.gt_depth) {
    CHECK(d.min().item<double>() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.max().item<double>() == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("occlusion mask matches an independent ray-plane oracle") {
  auto layout = two_plane_layout(64, 48);
  auto scene = generate_synthetic_scene(layout, 4, 3);
  const auto& card = layout.planes[0];
  const auto& tk = scene.manifest.views[0].intrinsics;
  int occluded = 0, mismatches = 0;
  for (std::size_t s = 1; s < 4; ++s) {
    const auto& sv = scene.manifest.views[s];
    const Vec3 c = sv.pose.center();
    auto vis = scene.visibility(0, s);
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x) {
        const double z = scene.gt_depth[0][y][x].item<double>();
        const double X = (x - tk.cx) / tk.fx * z, Y = (y - tk.cy) / tk.fy * z;
        // Projection into the source (identity rotation).
        const double u = sv.intrinsics.fx * (X - c[0]) / z + sv.intrinsics.cx;
        const double v = sv.intrinsics.fy * (Y - c[1]) / z + sv.intrinsics.cy;
        bool expected = u >= 0 && u <= 63 && v >= 0 && v <= 47;
        if (expected && z > card.z + 1e-9) {
          // Segment from the source center to the point crosses the card plane.
          const double t = card.z / z;
          const double px = c[0] + t * (X - c[0]), py = c[1] + t * (Y - c[1]);
          if (px >= card.x_min && px <= card.x_max && py >= card.y_min && py <= card.y_max) {
            expected = false;
            ++occluded;
          }
        }
        if (vis[y][x].item<bool>() != expected) ++mismatches;
      }
  }
  CHECK(occluded > 50);
  CHECK(mismatches == 0);
}

TEST_CASE("generation is deterministic for a fixed seed") {
  auto layout = two_plane_layout(32, 24);
  auto a = generate_synthetic_scene(layout, 3, 11);
  auto b = generate_synthetic_scene(layout, 3, 11);
  auto c = generate_synthetic_scene(layout, 3, 12);
  for (int i = 0; i < 3; ++i) {
    CHECK(torch::equal(a.views[i].image, b.views[i].image));
    CHECK(torch::equal(a.gt_depth[i], b.gt_depth[i]));
  }
  CHECK(!torch::equal(a.views[0].image, c.views[0].image));
}

TEST_CASE("two-plane layout geometry") {
  auto scene = generate_synthetic_scene(two_plane_layout(128, 96), 4, 7);
  auto d = scene.gt_depth[0];
  CHECK(d[48][64].item<double>() == doctest::Approx(2.0));
  CHECK(d[0][0].item<double>() == doctest::Approx(4.0));
  CHECK(scene.views[0].image.min().item<double>() >= 0.0);
  CHECK(scene.views[0].image.max().item<double>() <= 1.0);
  // Textured: non-trivial contrast on both surfaces.
  CHECK(scene.views[0].image.std().item<double>() > 0.05);
}

TEST_CASE("layouts outside the depth range or with holes fail") {
  auto layout = two_plane_layout(32, 24);
  layout.d_max = 3.0;
  CHECK_THROWS_AS(generate_synthetic_scene(layout, 3, 0), Error);
  auto holes = two_plane_layout(32, 24);
  holes.planes.pop_back();  // card only: the border sees nothing
  CHECK_THROWS_AS(generate_synthetic_scene(holes, 3, 0), Error);
}

TEST_CASE("written scenes reload through the manifest") {
  TempDir dir("synth");
  auto scene = generate_synthetic_scene(two_plane_layout(32, 24), 3, 5);
  write_synthetic_scene(scene, dir.path());
  auto m = read_manifest(dir / "manifest.json");
  REQUIRE(m.views.size() == 3);
  auto v = load_view(m, m.views[1]);
  CHECK(max_abs_diff(v.image, scene.views[1].image) <= 0.5 / 255 + 1e-6);
  auto depth = read_float_map(dir / "depth" / (m.views[1].id + ".pfm"));
  CHECK(max_abs_diff(depth, scene.gt_depth[1]) < 1e-5);
}

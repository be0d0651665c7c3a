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
#include "svnvs/pipeline.hpp"
#include "test_util.hpp"

using namespace svnvs;
using svnvs::test::max_abs_diff;

namespace {

ModelConfig tiny(Ablation a = Ablation::kNone) {
  ModelConfig c;
  c.features = {4, 2};
  c.sve = {4, 6};
  c.src_hidden = 6;
  c.refine.channels = {4, 6, 8};
  c.ablation = a;
  return c;
}

RenderInput fixture(int n, int h = 16, int w = 16) {
  RenderInput in;
  in.source_images = torch::rand({n, 3, h, w});
  for (int i = 0; i < n; ++i) {
    Camera c;
    c.intrinsics = {0.9 * w, 0.9 * w, (w - 1) / 2.0, (h - 1) / 2.0, w, h};
    c.pose.translation = {0.1 * (i + 1) * (i % 2 ? 1 : -1), 0.05 * i, 0};
    in.source_cameras.push_back(c);
  }
  in.target.intrinsics = {0.9 * w, 0.9 * w, (w - 1) / 2.0, (h - 1) / 2.0, w, h};
  in.planes = sample_depth_planes(1, 5, 6);
  return in;
}

}  // namespace

TEST_CASE("ablation names round trip") {
  for (auto a : {Ablation::kNone, Ablation::kNoVisibility, Ablation::kNoRayCasting, Ablation::kOverCompositing,
                 Ablation::kNoWarpedSources, Ablation::kNoRefinement})
    CHECK(parse_ablation(to_string(a)) == a);
  CHECK(to_string(Ablation::kOverCompositing) == "over_compositing");
  CHECK_THROWS_AS(parse_ablation("bogus"), Error);
}

TEST_CASE("every variant renders finite images of the target size") {
  for (auto a : {Ablation::kNone, Ablation::kNoVisibility, Ablation::kNoRayCasting, Ablation::kOverCompositing,
                 Ablation::kNoWarpedSources, Ablation::kNoRefinement}) {
    CAPTURE(to_string(a));
    torch::manual_seed(0);
    SvnvsModel model(tiny(a));
    torch::NoGradGuard g;
    auto in = fixture(3);
    auto r = model->forward(in);
    CHECK(r.output.sizes() == torch::IntArrayRef({3, 16, 16}));
    CHECK(r.depth_prob.sizes() == torch::IntArrayRef({6, 16, 16}));
    CHECK(r.blend.sizes() == torch::IntArrayRef({3, 6, 16, 16}));
    CHECK(r.consensus.sizes() == torch::IntArrayRef({6, 8, 16, 16}));
    CHECK(!r.first_non_finite().has_value());
    auto depth = model->depth_map(r, in.planes);
    CHECK(depth.min().item<double>() >= 1.0 - 1e-5);
    CHECK(depth.max().item<double>() <= 5.0 + 1e-5);
    if (a != Ablation::kOverCompositing) CHECK(max_abs_diff(r.depth_prob.sum(0), torch::ones({16, 16})) < 1e-5);
    CHECK(max_abs_diff(r.blend.sum(0), torch::ones({6, 16, 16})) < 1e-5);
  }
}

TEST_CASE("no_refinement outputs the aggregated image") {
  SvnvsModel model(tiny(Ablation::kNoRefinement));
  torch::NoGradGuard g;
  auto r = model->forward(fixture(2));
  CHECK(torch::equal(r.output, r.aggregated.image));
  CHECK(!r.candidates.images.defined());
}

TEST_CASE("no_warped_sources feeds identical inputs to every candidate") {
  torch::manual_seed(1);
  SvnvsModel model(tiny(Ablation::kNoWarpedSources));
  torch::NoGradGuard g;
  auto r = model->forward(fixture(3));
  CHECK(max_abs_diff(r.candidates.images[0], r.candidates.images[2]) == 0.0);
}

TEST_CASE("no_visibility blends uniformly over valid sources") {
  SvnvsModel model(tiny(Ablation::kNoVisibility));
  torch::NoGradGuard g;
  auto r = model->forward(fixture(3));
  CHECK(!r.visibility.defined());
  auto expected = blend_weights(torch::zeros_like(r.similarity), r.warped_colors.valid);
  CHECK(max_abs_diff(r.blend, expected) == 0.0);
}

TEST_CASE("output is invariant to source order") {
  torch::manual_seed(2);
  SvnvsModel model(tiny());
  torch::NoGradGuard g;
  auto in = fixture(4);
  auto base = model->forward(in);
  for (auto order : {std::vector<int64_t>{3, 2, 1, 0}, std::vector<int64_t>{1, 3, 0, 2}}) {
    RenderInput p = in;
    p.source_images = in.source_images.index_select(0, torch::tensor(order));
    p.source_cameras.clear();
    for (auto i : order) p.source_cameras.push_back(in.source_cameras[static_cast<std::size_t>(i)]);
    auto r = model->forward(p);
    CHECK(max_abs_diff(r.output, base.output) <= 1e-5);
    CHECK(max_abs_diff(r.depth_prob, base.depth_prob) <= 1e-5);
  }
}

TEST_CASE("modules unused by a variant are not constructed") {
  SvnvsModel full(tiny());
  SvnvsModel plain(tiny(Ablation::kNoRefinement));
  CHECK(plain->parameters().size() < full->parameters().size());
}

TEST_CASE("forward needs at least two sources") {
  SvnvsModel model(tiny());
  CHECK_THROWS_AS(model->forward(fixture(1)), Error);
}

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

#include <cmath>

#include "svnvs/error.hpp"
#include "svnvs/geometry.hpp"
#include "svnvs/training.hpp"
#include "test_util.hpp"

using namespace svnvs;
using svnvs::test::max_abs_diff;
using svnvs::test::TempDir;

namespace {

TrainConfig tiny(bool gan) {
  TrainConfig c;
  c.views = 2;
  c.planes = 4;
  c.d_min = 1;
  c.d_max = 5;
  c.height = 16;
  c.width = 16;
  c.gan = gan;
  c.model.features = {4, 2};
  c.model.sve = {4, 6};
  c.model.src_hidden = 6;
  c.model.refine.channels = {4, 6, 8};
  return c;
}

struct Sample {
  RenderInput input;
  torch::Tensor target;
};

Sample sample(std::uint64_t seed) {
  torch::manual_seed(seed);
  Sample s;
  s.input.source_images = torch::rand({2, 3, 16, 16});
  for (int i = 0; i < 2; ++i) {
    Camera c;
    c.intrinsics = {14, 14, 7.5, 7.5, 16, 16};
    c.pose.translation = {i ? 0.1 : -0.1, 0, 0};
    s.input.source_cameras.push_back(c);
  }
  s.input.target.intrinsics = {14, 14, 7.5, 7.5, 16, 16};
  s.input.planes = sample_depth_planes(1, 5, 4);
  s.target = torch::rand({3, 16, 16});
  return s;
}

std::vector<torch::Tensor> snapshot(Trainer& t) {
  std::vector<torch::Tensor> out;
  for (const auto& p : t.model()->parameters()) out.push_back(p.detach().clone());
  return out;
}

}  // namespace

TEST_CASE("config json round trip and hash") {
  auto c = tiny(true);
  c.model.ablation = Ablation::kNoRayCasting;
  c.perceptual_layer_weights = {0.5, 0.25, 0.125};
  auto back = TrainConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.hash() == c.hash());
  auto more = c;
  more.steps = c.steps + 100;
  CHECK(more.hash() == c.hash());
  auto other = c;
  other.learning_rate = 1e-3;
  CHECK(other.hash() != c.hash());
  CHECK_THROWS_AS(TrainConfig::from_json(nlohmann::json::object()), Error);
}

TEST_CASE("default configuration mirrors the main setting") {
  TrainConfig c;
  CHECK(c.views == 6);
  CHECK(c.planes == 48);
  CHECK(c.learning_rate == 2e-4);
  CHECK(c.beta1 == 0.9);
  CHECK(c.beta2 == 0.999);
  CHECK(c.height == 256);
  CHECK(c.width == 448);
}

TEST_CASE("intrinsics rescale keeps pixel centers aligned") {
  CameraIntrinsics k{10, 12, 1.5, 0.5, 4, 2};
  auto r = rescale_intrinsics(k, 4, 8);
  CHECK(r.fx == 20);
  CHECK(r.fy == 24);
  CHECK(r.cx == 3.5);
  CHECK(r.cy == 1.5);
  CHECK(r.width == 8);
  CHECK(r.height == 4);
  View v;
  v.intrinsics = k;
  v.image = torch::rand({3, 2, 4});
  auto big = resize_view(v, 4, 8);
  CHECK(big.image.sizes() == torch::IntArrayRef({3, 4, 8}));
  CHECK(big.intrinsics.cx == 3.5);
}

TEST_CASE("zero learning rate leaves parameters bit-identical") {
  auto c = tiny(true);
  c.learning_rate = 0;
  Trainer t(c);
  auto before = snapshot(t);
  auto s = sample(1);
  t.step(s.input, s.target);
  auto after = snapshot(t);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(torch::equal(before[i], after[i]));
}

TEST_CASE("identical seed and config give identical loss sequences") {
  for (bool gan : {false, true}) {
    Trainer a(tiny(gan)), b(tiny(gan));
    auto s = sample(2);
    for (int k = 0; k < 3; ++k) {
      auto ra = a.step(s.input, s.target);
      auto rb = b.step(s.input, s.target);
      CHECK(ra.total == rb.total);
      CHECK(ra.adversarial_d == rb.adversarial_d);
    }
  }
}

TEST_CASE("loss report is consistent") {
  auto c = tiny(true);
  Trainer t(c);
  auto s = sample(3);
  auto r = t.step(s.input, s.target);
  CHECK(r.total == doctest::Approx(r.l1 + r.perceptual + c.adversarial_weight * r.adversarial_g));
  CHECK(r.adversarial_d > 0);
  CHECK(t.steps_done() == 1);
  Trainer off(tiny(false));
  auto q = off.step(s.input, s.target);
  CHECK(q.adversarial_g == 0);
  CHECK(q.adversarial_d == 0);
}

TEST_CASE("training reduces the loss on a fixed sample") {
  auto c = tiny(false);
  c.learning_rate = 1e-3;
  Trainer t(c);
  auto s = sample(4);
  const double first = t.step(s.input, s.target).total;
  double last = first;
  for (int k = 0; k < 30; ++k) last = t.step(s.input, s.target).total;
  CHECK(last < first);
}

TEST_CASE("divergence raises a numerical error naming the tensor") {
  Trainer t(tiny(false));
  auto s = sample(5);
  s.target[0][3][3] = std::numeric_limits<float>::quiet_NaN();
  try {
    t.step(s.input, s.target);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumerical);
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
}

TEST_CASE("checkpoint round trip restores rendering and optimizer state") {
  TempDir dir("ckpt");
  auto s = sample(6);
  Trainer a(tiny(true));
  a.step(s.input, s.target);
  a.save(dir / "a.ckpt");
  Trainer b = Trainer::load(dir / "a.ckpt");
  CHECK(b.steps_done() == 1);
  CHECK(max_abs_diff(a.render(s.input).output, b.render(s.input).output) == 0.0);
  b.save(dir / "b.ckpt");
  CHECK(svnvs::test::read_bytes(dir / "a.ckpt") == svnvs::test::read_bytes(dir / "b.ckpt"));
  // Resuming continues exactly where the original run would have gone.
  auto ra = a.step(s.input, s.target);
  auto rb = b.step(s.input, s.target);
  CHECK(ra.total == rb.total);
  CHECK(max_abs_diff(a.render(s.input).output, b.render(s.input).output) == 0.0);
}

TEST_CASE("loading rejects a corrupted config hash") {
  TempDir dir("ckpt_bad");
  Trainer a(tiny(false));
  a.save(dir / "a.ckpt");
  auto bytes = svnvs::test::read_bytes(dir / "a.ckpt");
  bytes[12] = static_cast<char>(bytes[12] ^ 0x5a);  // inside the config hash field
  svnvs::test::write_text(dir / "bad.ckpt", bytes);
  CHECK_THROWS_AS(Trainer::load(dir / "bad.ckpt"), Error);
  CHECK_THROWS_AS(Trainer::load(dir / "missing.ckpt"), Error);
}

TEST_CASE("crop window warps like a slice of the full frame") {
  auto s = sample(11);
  const int top = 3, left = 5, h = 8, w = 9;
  auto window = crop_target(s.input, s.target, top, left, h, w);
  CHECK(window.target.sizes() == torch::IntArrayRef({3, h, w}));
  CHECK(max_abs_diff(window.target, s.target.slice(1, top, top + h).slice(2, left, left + w)) == 0.0);
  const auto full = warp_to_target(s.input.source_images, s.input.source_cameras, s.input.target, s.input.planes);
  const auto part =
      warp_to_target(window.input.source_images, window.input.source_cameras, window.input.target, window.input.planes);
  const auto full_data = full.data.slice(3, top, top + h).slice(4, left, left + w);
  const auto full_valid = full.valid.slice(2, top, top + h).slice(3, left, left + w);
  CHECK(max_abs_diff(part.data, full_data) < 1e-5);
  CHECK(torch::equal(part.valid, full_valid));
}

TEST_CASE("crop window outside the frame is rejected") {
  auto s = sample(12);
  CHECK_THROWS_AS(crop_target(s.input, s.target, 10, 0, 8, 8), Error);
  CHECK_THROWS_AS(crop_target(s.input, s.target, 0, -1, 8, 8), Error);
  CHECK_THROWS_AS(crop_target(s.input, s.target, 0, 0, 0, 8), Error);
  CHECK_THROWS_AS(crop_target(s.input, torch::rand({3, 8, 8}), 0, 0, 8, 8), Error);
}

TEST_CASE("crop configuration round trips and is validated") {
  auto c = tiny(false);
  c.crop_height = 8;
  c.crop_width = 12;
  auto back = TrainConfig::from_json(c.to_json());
  CHECK(back.crop_height == 8);
  CHECK(back.crop_width == 12);
  CHECK(back.hash() != tiny(false).hash());
  auto legacy = tiny(false).to_json();
  legacy.erase("crop_height");
  legacy.erase("crop_width");
  CHECK(TrainConfig::from_json(legacy).crop_height == 0);
  auto bad = tiny(false);
  bad.crop_height = 4;
  bad.crop_width = 4;
  CHECK_THROWS_AS(Trainer{bad}, Error);
  bad.crop_height = 32;
  bad.crop_width = 8;
  CHECK_THROWS_AS(Trainer{bad}, Error);
  auto ok = tiny(false);
  ok.crop_height = 8;
  ok.crop_width = 8;
  Trainer t(ok);
  auto s = sample(13);
  auto window = crop_target(s.input, s.target, 4, 4, 8, 8);
  CHECK(std::isfinite(t.step(window.input, window.target).total));
}

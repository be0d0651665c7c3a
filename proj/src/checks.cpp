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

#include "svnvs/checks.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <mutex>
#include <numbers>
#include <random>

#include <unistd.h>

#include <torch/torch.h>

#include "svnvs/error.hpp"
#include "svnvs/features.hpp"
#include "svnvs/geometry.hpp"
#include "svnvs/losses.hpp"
#include "svnvs/metrics.hpp"
#include "svnvs/pipeline.hpp"
#include "svnvs/refinement.hpp"
#include "svnvs/rendering.hpp"
#include "svnvs/training.hpp"
#include "svnvs/visibility.hpp"

namespace svnvs {

namespace debug {
namespace {
std::mutex fault_mutex;
std::string fault_module;
std::atomic<bool> any_fault{false};
}  // namespace

void inject_fault(std::string_view module_id) {
  std::lock_guard lock(fault_mutex);
  fault_module = module_id;
  any_fault = !fault_module.empty();
}

bool fault_active(std::string_view module_id) {
  if (!any_fault) return false;
  std::lock_guard lock(fault_mutex);
  return fault_module == module_id;
}
}  // namespace debug

namespace {

constexpr double kStep = 1e-3;
constexpr int kSamplesPerInput = 24;
constexpr int kAttemptsPerSample = 8;
const auto kF64 = torch::TensorOptions().dtype(torch::kFloat64);

struct GradTolerance {
  const char* module;
  double tolerance;
};

constexpr GradTolerance kGradModules[] = {
    {"features.extract_features", 1e-3},
    {"geometry.warp_to_target", 1e-3},
    {"visibility.pairwise_similarity", 1e-3},
    {"visibility.sve_forward", 1e-2},
    {"rendering.soft_ray_cast", 1e-3},
    {"rendering.blend_weights", 1e-3},
    {"rendering.aggregate", 1e-3},
    {"rendering.over_composite", 1e-3},
    {"refinement.refine", 1e-2},
    {"training.perceptual_loss", 1e-3},
};

/// Max relative error between autograd and central differences of `loss`
/// over randomly sampled coordinates of each input. ReLU networks are only
/// piecewise smooth. A coordinate whose forward and backward one-sided
/// differences disagree by more than the tolerance straddles a kink within
/// +-h, where central differences say nothing about the derivative at the
/// center; another coordinate is drawn instead. A tiny input (a bias feeding
/// every pixel) may have no smooth coordinate at all, so coverage is counted
/// over the whole check: fewer than half the wanted samples landing on smooth
/// coordinates fails it.
double finite_difference_error(const std::function<torch::Tensor()>& loss,
                               const std::vector<torch::Tensor>& inputs, double tolerance, std::mt19937_64& rng) {
  constexpr double kFail = std::numeric_limits<double>::infinity();
  auto value = loss();
  auto grads = torch::autograd::grad({value}, inputs, {}, false, false, true);
  double worst = 0.0;
  int smooth_total = 0, wanted_total = 0;
  torch::NoGradGuard no_grad;
  const double center = value.item<double>();
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto x = inputs[k];
    auto g = grads[k].defined() ? grads[k] : torch::zeros_like(x);
    const double scale = g.abs().max().item<double>();
    const double floor = std::max(1e-8, 1e-3 * scale);
    auto flat_x = x.view(-1);
    auto flat_g = g.reshape(-1);
    const int64_t n = flat_x.numel();
    const int wanted = static_cast<int>(std::min<int64_t>(n, kSamplesPerInput));
    wanted_total += wanted;
    int accepted = 0;
    for (int attempt = 0; attempt < kAttemptsPerSample * wanted && accepted < wanted; ++attempt) {
      // Sweep small inputs once in order before drawing at random.
      const int64_t i = attempt < n && n <= kSamplesPerInput ? attempt
                                                             : static_cast<int64_t>(rng() % static_cast<uint64_t>(n));
      const double orig = flat_x[i].item<double>();
      flat_x[i].fill_(orig + kStep);
      const double plus = loss().item<double>();
      flat_x[i].fill_(orig - kStep);
      const double minus = loss().item<double>();
      flat_x[i].fill_(orig);
      const double forward = (plus - center) / kStep;
      const double backward = (center - minus) / kStep;
      if (std::abs(forward - backward) > tolerance * std::max({std::abs(forward), std::abs(backward), floor}))
        continue;
      ++accepted;
      const double numeric = (plus - minus) / (2 * kStep);
      const double analytic = flat_g[i].item<double>();
      const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
    smooth_total += accepted;
  }
  if (2 * smooth_total < wanted_total) return kFail;
  return worst;
}

torch::Tensor leaf(torch::Tensor t) { return t.to(torch::kFloat64).detach().requires_grad_(true); }

torch::Tensor project(const torch::Tensor& out, const torch::Tensor& weights) { return (out * weights).sum(); }

std::vector<torch::Tensor> params_of(torch::nn::Module& m) {
  std::vector<torch::Tensor> out;
  for (auto& p : m.parameters()) out.push_back(p);
  return out;
}

std::vector<Camera> fixture_cameras(int n, int width, int height) {
  std::vector<Camera> cams;
  for (int i = 0; i < n; ++i) {
    Camera c;
    c.intrinsics = {0.9 * width, 0.9 * width, (width - 1) / 2.0, (height - 1) / 2.0, width, height};
    const double angle = 0.04 * (i + 1) * (i % 2 == 0 ? 1 : -1);
    c.pose.rotation = {std::cos(angle), 0, std::sin(angle), 0, 1, 0, -std::sin(angle), 0, std::cos(angle)};
    const double phase = 2.0 * std::numbers::pi * i / std::max(n, 1);
    c.pose.translation = {0.15 * std::cos(phase), 0.1 * std::sin(phase), 0.02 * i};
    cams.push_back(c);
  }
  return cams;
}

Camera identity_camera(int width, int height) {
  Camera c;
  c.intrinsics = {0.9 * width, 0.9 * width, (width - 1) / 2.0, (height - 1) / 2.0, width, height};
  return c;
}

double grad_error(std::string_view id, double tol, std::uint64_t seed) {
  torch::manual_seed(seed);
  std::mt19937_64 rng(seed);
  if (id == "features.extract_features") {
    FeatureExtractor net(FeatureConfig{4, 2});
    net->to(torch::kFloat64);
    auto image = leaf(torch::rand({1, 3, 10, 10}));
    auto r = torch::randn({1, 8, 10, 10}, kF64);
    auto inputs = params_of(*net);
    inputs.push_back(image);
    return finite_difference_error([&] { return project(net->forward(image), r); }, inputs, tol, rng);
  }
  if (id == "geometry.warp_to_target") {
    auto src = leaf(torch::rand({2, 3, 12, 14}));
    auto cams = fixture_cameras(2, 14, 12);
    auto target = identity_camera(12, 12);
    auto planes = sample_depth_planes(1.0, 5.0, 4);
    auto r = torch::randn({2, 4, 3, 12, 12}, kF64);
    return finite_difference_error(
        [&] { return project(warp_to_target(src, cams, target, planes).data, r); }, {src}, tol, rng);
  }
  if (id == "visibility.pairwise_similarity") {
    auto f = leaf(torch::randn({3, 4, 6, 8, 8}));
    auto valid = (torch::rand({3, 4, 8, 8}) > 0.2).to(torch::kFloat64);
    auto r = torch::randn({3, 4, 8, 8}, kF64);
    return finite_difference_error([&] { return project(pairwise_similarity({f, valid}), r); }, {f}, tol, rng);
  }
  if (id == "visibility.sve_forward") {
    SveNet net(4, SveConfig{4, 6});
    net->to(torch::kFloat64);
    auto f = leaf(torch::randn({2, 4, 4, 8, 8}));
    auto s = leaf(torch::rand({2, 4, 8, 8}) * 2 - 1);
    auto sm = leaf(torch::rand({4, 8, 8}) * 2 - 1);
    auto valid = (torch::rand({2, 4, 8, 8}) > 0.2).to(torch::kFloat64);
    auto rv = torch::randn({2, 4, 8, 8}, kF64);
    auto rb = torch::randn({2, 4, 8, 8, 8}, kF64);
    auto inputs = params_of(*net);
    inputs.insert(inputs.end(), {f, s, sm});
    return finite_difference_error(
        [&] {
          auto out = net->forward(f, s, sm, valid);
          return project(out.visibility, rv) + project(out.features, rb);
        },
        inputs, tol, rng);
  }
  if (id == "rendering.soft_ray_cast") {
    SoftRayCaster net(8, 6);
    net->to(torch::kFloat64);
    auto c = leaf(torch::randn({4, 8, 6, 6}));
    auto r = torch::randn({4, 6, 6}, kF64);
    auto inputs = params_of(*net);
    inputs.push_back(c);
    return finite_difference_error([&] { return project(net->forward(c), r); }, inputs, tol, rng);
  }
  if (id == "rendering.blend_weights") {
    auto v = leaf(torch::randn({3, 4, 6, 6}) * 2);
    auto valid = (torch::rand({3, 4, 6, 6}) > 0.3).to(torch::kFloat64);
    auto r = torch::randn({3, 4, 6, 6}, kF64);
    return finite_difference_error([&] { return project(blend_weights(v, valid), r); }, {v}, tol, rng);
  }
  if (id == "rendering.aggregate") {
    auto colors = leaf(torch::rand({3, 4, 3, 6, 6}));
    auto v = leaf(torch::randn({3, 4, 6, 6}));
    auto p = leaf(torch::softmax(torch::randn({4, 6, 6}), 0));
    auto valid = (torch::rand({3, 4, 6, 6}) > 0.2).to(torch::kFloat64);
    auto ri = torch::randn({3, 6, 6}, kF64);
    auto rw = torch::randn({3, 3, 6, 6}, kF64);
    return finite_difference_error(
        [&] {
          auto out = aggregate(colors * valid.unsqueeze(2), blend_weights(v, valid), p, false);
          return project(out.image, ri) + project(out.warps, rw);
        },
        {colors, v, p}, tol, rng);
  }
  if (id == "rendering.over_composite") {
    auto alpha = leaf(torch::rand({5, 6, 6}) * 0.9 + 0.05);
    auto colors = leaf(torch::rand({5, 3, 6, 6}));
    auto ri = torch::randn({3, 6, 6}, kF64);
    auto ra = torch::randn({6, 6}, kF64);
    return finite_difference_error(
        [&] {
          auto out = over_composite(alpha, colors);
          return project(out.image, ri) + project(out.accumulated, ra);
        },
        {alpha, colors}, tol, rng);
  }
  if (id == "refinement.refine") {
    RefinementNet net(RefineConfig{{4, 6, 8}});
    net->to(torch::kFloat64);
    {
      // A zero confidence head would hide the confidence path from the check.
      torch::NoGradGuard no_grad;
      for (auto& item : net->named_parameters())
        if (item.key().rfind("confidence_head", 0) == 0) item.value().normal_(0.0, 0.1);
    }
    auto agg = leaf(torch::rand({3, 16, 16}));
    auto warps = leaf(torch::rand({2, 3, 16, 16}));
    auto r = torch::randn({3, 16, 16}, kF64);
    // Both image branches; first-layer weights touch every pixel, so at this
    // step size nearly every one of their stencils crosses a ReLU kink.
    std::vector<torch::Tensor> inputs{agg, warps};
    return finite_difference_error(
        [&] {
          auto c = net->forward(agg, warps);
          return project(blend_candidates(c.images, c.confidence), r);
        },
        inputs, tol, rng);
  }
  if (id == "training.perceptual_loss") {
    RandomConvPyramid net(seed);
    net.to(torch::kFloat64);
    auto pred = leaf(torch::rand({3, 16, 16}));
    auto target = torch::rand({3, 16, 16}, kF64);
    return finite_difference_error([&] { return perceptual_loss(pred, target, net); }, {pred}, tol, rng);
  }
  fail(ErrorCode::kInvalidArgument, "gradient_check: unknown module " + std::string(id));
}

// ---------------------------------------------------------------------------
// Invariant checks. Each returns a measured deviation compared against a
// tolerance (value <= tolerance passes).

struct Invariant {
  const char* module;
  const char* name;
  double tolerance;
  std::function<double(std::uint64_t)> measure;
};

double max_abs(const torch::Tensor& t) { return t.abs().max().item<double>(); }

torch::Tensor brute_force_similarity(const WarpedVolume& v) {
  const int64_t n = v.data.size(0);
  std::vector<torch::Tensor> out;
  for (int64_t i = 0; i < n; ++i) {
    auto acc = torch::zeros_like(v.valid[0]);
    for (int64_t j = 0; j < n; ++j) {
      if (j == i) continue;
      auto corr = correlation(v.data[i], v.data[j], 1);
      acc = acc + corr * v.valid[i] * v.valid[j];
    }
    out.push_back(acc / static_cast<double>(n - 1));
  }
  return torch::stack(out);
}

AggregatedImage brute_force_aggregate(const torch::Tensor& colors, const torch::Tensor& w,
                                      const torch::Tensor& p) {
  const int64_t n = colors.size(0), d = colors.size(1);
  auto image = torch::zeros_like(colors[0][0]);
  auto warps = torch::zeros_like(colors.select(1, 0));
  for (int64_t k = 0; k < d; ++k) {
    for (int64_t i = 0; i < n; ++i) {
      image = image + p[k] * w[i][k] * colors[i][k];
      warps[i] = warps[i] + p[k] * colors[i][k];
    }
  }
  return {image, warps};
}

std::vector<Invariant> invariants() {
  std::vector<Invariant> list;
  list.push_back({"geometry.sample_depth_planes", "inverse_uniformity", 1e-9, [](std::uint64_t) {
                    double worst = 0;
                    for (auto [lo, hi] : {std::pair{0.5, 100.0}, std::pair{0.425, 0.937}}) {
                      auto pl = sample_depth_planes(lo, hi, 48);
                      const double step = (1.0 / hi - 1.0 / lo) / 47.0;
                      for (int k = 0; k + 1 < 48; ++k)
                        worst = std::max(worst, std::abs((1.0 / pl.depths[k + 1] - 1.0 / pl.depths[k]) - step));
                      worst = std::max({worst, std::abs(pl.depths.front() - lo), std::abs(pl.depths.back() - hi)});
                    }
                    return worst;
                  }});
  list.push_back({"geometry.warp_to_target", "identity", 1e-6, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    auto img = torch::rand({1, 3, 10, 12});
                    auto cam = identity_camera(12, 10);
                    std::vector<Camera> cams{cam};
                    auto v = warp_to_target(img, cams, cam, sample_depth_planes(1, 4, 3));
                    auto interior = v.data.slice(3, 1, -1).slice(4, 1, -1);
                    return max_abs(interior - img.slice(2, 1, -1).slice(3, 1, -1).unsqueeze(1));
                  }});
  list.push_back({"geometry.warp_to_target", "masking", 0.0, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    auto img = torch::rand({2, 3, 10, 12}) + 0.1;
                    auto v = warp_to_target(img, fixture_cameras(2, 12, 10), identity_camera(12, 10),
                                            sample_depth_planes(0.3, 4, 6));
                    return max_abs(v.data * (1 - v.valid.unsqueeze(2)));
                  }});
  list.push_back({"visibility.pairwise_similarity", "brute_force", 1e-6, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    WarpedVolume v{torch::randn({4, 3, 8, 6, 6}, kF64),
                                   (torch::rand({4, 3, 6, 6}) > 0.25).to(torch::kFloat64)};
                    return max_abs(pairwise_similarity(v) - brute_force_similarity(v));
                  }});
  list.push_back({"visibility.pairwise_similarity", "permutation_equivariance", 1e-6, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    WarpedVolume v{torch::randn({4, 3, 8, 6, 6}), (torch::rand({4, 3, 6, 6}) > 0.25).to(torch::kFloat32)};
                    auto perm = torch::randperm(4, torch::kLong);
                    auto a = pairwise_similarity({v.data.index_select(0, perm), v.valid.index_select(0, perm)});
                    return max_abs(a - pairwise_similarity(v).index_select(0, perm));
                  }});
  list.push_back({"visibility.build_consensus", "permutation_invariance", 1e-6, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    auto b = torch::randn({5, 3, 8, 4, 4});
                    auto perm = torch::randperm(5, torch::kLong);
                    return max_abs(build_consensus(b.index_select(0, perm)) - build_consensus(b));
                  }});
  list.push_back({"rendering.blend_weights", "partition_of_unity", 1e-5, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    auto v = torch::randn({4, 6, 8, 8}) * 5;
                    auto valid = (torch::rand({4, 6, 8, 8}) > 0.4).to(torch::kFloat32);
                    return std::max(max_abs(blend_weights(v).sum(0) - 1), max_abs(blend_weights(v, valid).sum(0) - 1));
                  }});
  list.push_back({"rendering.blend_weights", "shift_invariance", 1e-7, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    auto v = torch::randn({3, 4, 5, 5}, kF64);
                    auto c = torch::randn({1, 4, 5, 5}, kF64) * 10;
                    return max_abs(blend_weights(v + c) - blend_weights(v));
                  }});
  list.push_back({"rendering.blend_weights", "ln3_split", 1e-7, [](std::uint64_t) {
                    auto v = torch::tensor({std::log(3.0), 0.0}, kF64);
                    auto w = blend_weights(v);
                    return std::max(std::abs(w[0].item<double>() - 0.75), std::abs(w[1].item<double>() - 0.25));
                  }});
  list.push_back({"rendering.soft_ray_cast", "normalization", 1e-5, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    SoftRayCaster net(8, 16);
                    torch::NoGradGuard g;
                    return max_abs(net->forward(torch::randn({12, 8, 6, 7}) * 3).sum(0) - 1);
                  }});
  list.push_back({"rendering.aggregate", "brute_force", 1e-6, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    auto colors = torch::rand({3, 4, 3, 6, 6}, kF64);
                    auto w = blend_weights(torch::randn({3, 4, 6, 6}, kF64));
                    auto p = torch::softmax(torch::randn({4, 6, 6}, kF64), 0);
                    auto fast = aggregate(colors, w, p);
                    auto slow = brute_force_aggregate(colors, w, p);
                    return std::max(max_abs(fast.image - slow.image), max_abs(fast.warps - slow.warps));
                  }});
  list.push_back({"rendering.aggregate", "convex_envelope", 1e-6, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    auto colors = torch::rand({3, 5, 3, 6, 6}, kF64);
                    auto w = blend_weights(torch::randn({3, 5, 6, 6}, kF64));
                    auto p = torch::softmax(torch::randn({5, 6, 6}, kF64), 0);
                    auto img = aggregate(colors, w, p).image;
                    auto flat = colors.permute({2, 3, 4, 0, 1}).flatten(3);  // [3, H, W, N*D]
                    auto lo = std::get<0>(flat.min(-1)), hi = std::get<0>(flat.max(-1));
                    return std::max((lo - img).clamp_min(0).max().item<double>(),
                                    (img - hi).clamp_min(0).max().item<double>());
                  }});
  list.push_back({"rendering.over_composite", "two_plane_example", 1e-12, [](std::uint64_t) {
                    auto alpha = torch::full({2, 1, 1}, 0.5, kF64);
                    auto colors = torch::zeros({2, 3, 1, 1}, kF64);
                    colors[0].fill_(1.0);
                    auto r = over_composite(alpha, colors);
                    return std::max(max_abs(r.image - 0.5), max_abs(r.accumulated - 0.75));
                  }});
  list.push_back({"rendering.over_composite", "monotone_transmittance", 0.0, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    auto r = over_composite(torch::rand({10, 5, 5}), torch::rand({10, 3, 5, 5}));
                    const double rise = (r.transmittance.slice(0, 1) - r.transmittance.slice(0, 0, -1)).clamp_min(0).max().item<double>();
                    const double out_of_range = std::max((r.accumulated - 1).clamp_min(0).max().item<double>(),
                                                         (-r.accumulated).clamp_min(0).max().item<double>());
                    return std::max(rise, out_of_range);
                  }});
  list.push_back({"refinement.blend_candidates", "ln4_split", 1e-6, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    auto imgs = torch::rand({2, 3, 4, 4}, kF64);
                    auto conf = torch::zeros({2, 1, 4, 4}, kF64);
                    conf[0].fill_(std::log(4.0));
                    return max_abs(blend_candidates(imgs, conf) - (0.8 * imgs[0] + 0.2 * imgs[1]));
                  }});
  list.push_back({"refinement.refine", "weight_sharing", 0.0, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    RefinementNet net(RefineConfig{{4, 6, 8}});
                    torch::NoGradGuard g;
                    auto agg = torch::rand({3, 16, 16});
                    auto warps = torch::rand({2, 3, 16, 16});
                    auto a = net->forward(agg, warps);
                    auto b = net->forward(agg, warps.flip(0));
                    return std::max(max_abs(a.images - b.images.flip(0)), max_abs(a.confidence - b.confidence.flip(0)));
                  }});
  list.push_back({"training.psnr", "offset_0.1", 0.01, [](std::uint64_t) {
                    auto a = torch::full({3, 16, 16}, 0.3);
                    return std::abs(psnr(a + 0.1, a) - 20.0);
                  }});
  list.push_back({"training.ssim", "identical", 1e-12, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    auto a = torch::rand({3, 24, 24});
                    return std::abs(ssim(a, a) - 1.0);
                  }});
  list.push_back({"training.checkpoint", "byte_identical_roundtrip", 0.0, [](std::uint64_t seed) {
                    TrainConfig c;
                    c.views = 2;
                    c.planes = 3;
                    c.height = c.width = 12;
                    c.seed = seed;
                    c.model.features = {4, 2};
                    c.model.sve = {4, 4};
                    c.model.src_hidden = 4;
                    c.model.refine.channels = {4, 4, 4};
                    Trainer t(c);
                    torch::manual_seed(seed);
                    auto cams = fixture_cameras(2, 12, 12);
                    RenderInput in{torch::rand({2, 3, 12, 12}), cams, identity_camera(12, 12),
                                   sample_depth_planes(1, 4, 3)};
                    t.step(in, torch::rand({3, 12, 12}));
                    const auto dir = std::filesystem::temp_directory_path() /
                                     ("svnvs_check_" + std::to_string(::getpid()));
                    std::filesystem::create_directories(dir);
                    t.save(dir / "a.ckpt");
                    Trainer::load(dir / "a.ckpt").save(dir / "b.ckpt");
                    auto slurp = [](const std::filesystem::path& p) {
                      std::ifstream in(p, std::ios::binary);
                      return std::string(std::istreambuf_iterator<char>(in), {});
                    };
                    const bool same = slurp(dir / "a.ckpt") == slurp(dir / "b.ckpt");
                    std::filesystem::remove_all(dir);
                    return same ? 0.0 : 1.0;
                  }});
  list.push_back({"pipeline", "permutation_invariance", 1e-5, [](std::uint64_t seed) {
                    torch::manual_seed(seed);
                    ModelConfig mc;
                    mc.features = {4, 2};
                    mc.sve = {4, 6};
                    mc.src_hidden = 6;
                    mc.refine.channels = {4, 6, 8};
                    SvnvsModel model(mc);
                    torch::NoGradGuard g;
                    auto cams = fixture_cameras(3, 16, 16);
                    RenderInput in{torch::rand({3, 3, 16, 16}), cams, identity_camera(16, 16),
                                   sample_depth_planes(1, 4, 5)};
                    auto base = model->forward(in).output;
                    RenderInput perm = in;
                    perm.source_images = in.source_images.index_select(0, torch::tensor({2, 0, 1}));
                    perm.source_cameras = {cams[2], cams[0], cams[1]};
                    return max_abs(model->forward(perm).output - base);
                  }});
  return list;
}

bool matches(std::string_view module, std::string_view filter) {
  return filter.empty() || module.substr(0, filter.size()) == filter;
}

}  // namespace

std::vector<std::string> gradient_check_modules() {
  std::vector<std::string> out;
  for (const auto& m : kGradModules) out.emplace_back(m.module);
  return out;
}

CheckResult gradient_check(std::string_view module_id, std::uint64_t fixture_seed) {
  for (const auto& m : kGradModules) {
    if (module_id != m.module) continue;
    CheckResult r{m.module, "gradient", grad_error(module_id, m.tolerance, fixture_seed), m.tolerance, false};
    r.passed = std::isfinite(r.value) && r.value <= r.tolerance;
    return r;
  }
  fail(ErrorCode::kInvalidArgument, "gradient_check: unknown module " + std::string(module_id));
}

std::vector<CheckResult> run_checks(std::string_view module_filter, std::uint64_t seed) {
  std::vector<CheckResult> results;
  for (const auto& m : kGradModules)
    if (matches(m.module, module_filter)) results.push_back(gradient_check(m.module, seed));
  for (const auto& inv : invariants()) {
    if (!matches(inv.module, module_filter)) continue;
    CheckResult r{inv.module, inv.name, 0.0, inv.tolerance, false};
    try {
      r.value = inv.measure(seed);
      r.passed = std::isfinite(r.value) && r.value <= inv.tolerance;
    } catch (const std::exception&) {
      r.value = std::numeric_limits<double>::infinity();
    }
    results.push_back(r);
  }
  require(!results.empty(), "no checks match module filter '" + std::string(module_filter) + "'",
          ErrorCode::kNotFound);
  return results;
}

}  // namespace svnvs

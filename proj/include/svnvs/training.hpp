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
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "svnvs/losses.hpp"
#include "svnvs/pipeline.hpp"
#include "svnvs/scene_io.hpp"

namespace svnvs {

struct TrainConfig {
  int views = 6;
  int planes = 48;
  double d_min = 0.5;
  double d_max = 100.0;
  int height = 256;
  int width = 448;
  // Per-step random window of the target view (0 x 0: full frame). Windows
  // stop the refinement network from memorizing a fixed frame by position.
  int crop_height = 0;
  int crop_width = 0;
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  int steps = 1000;
  std::uint64_t seed = 0;
  bool gan = true;
  double adversarial_weight = 0.01;
  // Empty: seed-fixed random pyramid. Otherwise a VGG-19 weight archive.
  std::string perceptual_weights_path;
  std::vector<double> perceptual_layer_weights;  // empty: network defaults
  ModelConfig model;

  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  /// Hash of everything that shapes the parameters or their updates; the step
  /// budget is excluded so a run can be resumed with a larger one.
  std::uint64_t hash() const;
};

struct LossReport {
  double l1 = 0.0;
  double perceptual = 0.0;  // feature terms only
  double adversarial_g = 0.0;
  double adversarial_d = 0.0;
  double total = 0.0;       // l1 + perceptual + adversarial_weight * adversarial_g
  double psnr = 0.0;        // of the unclamped output against the target
};

/// Intrinsics of the same camera sampled at `height` x `width`, keeping the
/// pixel-center convention.
CameraIntrinsics rescale_intrinsics(const CameraIntrinsics& k, int height, int width);

/// Bilinear resize of a view, with intrinsics rescaled for the pixel-center
/// convention. A no-op when the size already matches.
View resize_view(const View& view, int height, int width);

/// Stacks source views into a render request for `target` on `planes`.
RenderInput make_render_input(const std::vector<View>& sources, const Camera& target,
                              const DepthPlanes& planes);

/// The request and its target image restricted to a window of the target
/// view. The window camera is the target camera with a shifted principal
/// point; sources are untouched.
struct CroppedSample {
  RenderInput input;
  torch::Tensor target;
};
CroppedSample crop_target(const RenderInput& input, const torch::Tensor& target, int top, int left, int height,
                          int width);

/// Owns the model, discriminator, optimizers and step counter.
class Trainer {
 public:
  explicit Trainer(const TrainConfig& config);

  /// One generator update (and one discriminator update when the GAN is on).
  /// Throws Error(kNumerical) naming the first non-finite tensor on divergence.
  LossReport step(const RenderInput& input, const torch::Tensor& target);

  /// Inference without gradient tracking.
  ForwardResult render(const RenderInput& input);

  void save(const std::filesystem::path& path) const;
  static Trainer load(const std::filesystem::path& path);

  const TrainConfig& config() const { return config_; }
  SvnvsModel& model() { return model_; }
  PatchDiscriminator& discriminator() { return discriminator_; }
  std::int64_t steps_done() const { return steps_done_; }
  void set_learning_rate(double lr);

 private:
  TrainConfig config_;
  SvnvsModel model_{nullptr};
  PatchDiscriminator discriminator_{nullptr};
  std::unique_ptr<torch::optim::Adam> generator_opt_;
  std::unique_ptr<torch::optim::Adam> discriminator_opt_;
  std::shared_ptr<PerceptualFeatures> perceptual_;
  std::int64_t steps_done_ = 0;
};

}  // namespace svnvs

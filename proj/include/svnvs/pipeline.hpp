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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <torch/torch.h>

#include "svnvs/features.hpp"
#include "svnvs/geometry.hpp"
#include "svnvs/refinement.hpp"
#include "svnvs/rendering.hpp"
#include "svnvs/visibility.hpp"

namespace svnvs {

/// Pipeline variants. kNone is the full model; the others remove or replace
/// one component.
enum class Ablation {
  kNone,
  kNoVisibility,     // uniform source weights, no visibility estimator
  kNoRayCasting,     // depth distribution read directly from the consensus volume
  kOverCompositing,  // opacity head + front-to-back compositing instead of ray casting
  kNoWarpedSources,  // refinement's warp branch receives zeros
  kNoRefinement,     // output is the aggregated image
};

std::string_view to_string(Ablation a);
Ablation parse_ablation(std::string_view name);

struct ModelConfig {
  FeatureConfig features;
  SveConfig sve;
  int src_hidden = 16;
  RefineConfig refine;
  Ablation ablation = Ablation::kNone;
};

/// Everything needed to render one target view.
struct RenderInput {
  torch::Tensor source_images;  // [N, 3, Hs, Ws]
  std::vector<Camera> source_cameras;
  Camera target;
  DepthPlanes planes;
};

/// Named intermediates of one forward pass. Tensors not produced by the
/// configured variant stay undefined.
struct ForwardResult {
  torch::Tensor features;            // [N, Cf, Hs, Ws]
  WarpedVolume warped_features;      // C = Cf
  WarpedVolume warped_colors;        // C = 3
  torch::Tensor similarity;          // [N, D, H, W]
  torch::Tensor visibility;          // [N, D, H, W]
  torch::Tensor visibility_features; // [N, D, 8, H, W]
  torch::Tensor consensus;           // [D, 8, H, W]
  torch::Tensor depth_prob;          // [D, H, W]; compositing weights for over-compositing
  torch::Tensor blend;               // [N, D, H, W]
  AggregatedImage aggregated;
  RefinedCandidates candidates;
  torch::Tensor output;              // [3, H, W], unclamped graph value

  /// Name of the first intermediate (in pipeline order) holding a non-finite
  /// value, if any.
  std::optional<std::string> first_non_finite() const;
};

class SvnvsModelImpl : public torch::nn::Module {
 public:
  explicit SvnvsModelImpl(const ModelConfig& config = {});

  ForwardResult forward(const RenderInput& input);

  /// Expected depth of a forward result, [H, W]. Over-compositing weights are
  /// renormalized by their accumulated mass for this read-out.
  torch::Tensor depth_map(const ForwardResult& result, const DepthPlanes& planes) const;

  const ModelConfig& config() const { return config_; }

 private:
  ModelConfig config_;
  FeatureExtractor features_{nullptr};
  SveNet sve_{nullptr};
  torch::nn::Conv2d similarity_embed_{nullptr};  // no-visibility variant only
  SoftRayCaster ray_caster_{nullptr};
  ConsensusHead consensus_head_{nullptr};  // no-ray-casting / over-compositing variants
  RefinementNet refinement_{nullptr};
};
TORCH_MODULE(SvnvsModel);

}  // namespace svnvs

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

#include "svnvs/pipeline.hpp"

#include "svnvs/error.hpp"

namespace svnvs {

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::kNone: return "none";
    case Ablation::kNoVisibility: return "no_visibility";
    case Ablation::kNoRayCasting: return "no_ray_casting";
    case Ablation::kOverCompositing: return "over_compositing";
    case Ablation::kNoWarpedSources: return "no_warped_sources";
    case Ablation::kNoRefinement: return "no_refinement";
  }
  return "none";
}

Ablation parse_ablation(std::string_view name) {
  for (auto a : {Ablation::kNone, Ablation::kNoVisibility, Ablation::kNoRayCasting,
                 Ablation::kOverCompositing, Ablation::kNoWarpedSources, Ablation::kNoRefinement})
    if (to_string(a) == name) return a;
  fail(ErrorCode::kInvalidArgument, "unknown ablation: " + std::string(name));
}

std::optional<std::string> ForwardResult::first_non_finite() const {
  const std::pair<const char*, const torch::Tensor*> order[] = {
      {"features", &features},
      {"warped_features", &warped_features.data},
      {"warped_colors", &warped_colors.data},
      {"similarity", &similarity},
      {"visibility", &visibility},
      {"visibility_features", &visibility_features},
      {"consensus", &consensus},
      {"depth_prob", &depth_prob},
      {"blend", &blend},
      {"aggregated", &aggregated.image},
      {"warps", &aggregated.warps},
      {"candidates", &candidates.images},
      {"confidence", &candidates.confidence},
      {"output", &output},
  };
  for (const auto& [name, t] : order)
    if (t->defined() && !torch::isfinite(*t).all().item<bool>()) return std::string(name);
  return std::nullopt;
}

SvnvsModelImpl::SvnvsModelImpl(const ModelConfig& config) : config_(config) {
  features_ = register_module("features", FeatureExtractor(config.features));
  const int64_t cf = features_->output_channels();
  if (config.ablation == Ablation::kNoVisibility) {
    similarity_embed_ = register_module(
        "similarity_embed",
        torch::nn::Conv2d(torch::nn::Conv2dOptions(3, kVisibilityFeatureChannels, 1)));
  } else {
    sve_ = register_module("sve", SveNet(cf, config.sve));
  }
  if (config.ablation == Ablation::kNoRayCasting || config.ablation == Ablation::kOverCompositing) {
    consensus_head_ = register_module("consensus_head", ConsensusHead(kVisibilityFeatureChannels));
  } else {
    ray_caster_ = register_module("ray_caster", SoftRayCaster(kVisibilityFeatureChannels, config.src_hidden));
  }
  if (config.ablation != Ablation::kNoRefinement)
    refinement_ = register_module("refinement", RefinementNet(config.refine));
}

ForwardResult SvnvsModelImpl::forward(const RenderInput& input) {
  require(input.source_images.dim() == 4 && input.source_images.size(1) == 3,
          "forward: source images must be [N, 3, H, W]");
  const int64_t n = input.source_images.size(0);
  require(n >= 2, "forward: at least two source views are required");
  ForwardResult r;
  r.features = extract_features(features_, input.source_images);

  // One sweep for features and colors together.
  auto stacked = torch::cat({r.features, input.source_images}, 1);
  auto warped = warp_to_target(stacked, input.source_cameras, input.target, input.planes);
  const int64_t cf = r.features.size(1);
  r.warped_features = {warped.data.slice(2, 0, cf), warped.valid};
  r.warped_colors = {warped.data.slice(2, cf, cf + 3), warped.valid};

  r.similarity = pairwise_similarity(r.warped_features);
  auto similarity_mean = r.similarity.mean(0);
  const auto& valid = warped.valid;

  if (config_.ablation == Ablation::kNoVisibility) {
    // [N, D, 3, H, W] per-voxel cues, embedded by a shared 1x1 map.
    auto cues = torch::stack({r.similarity, similarity_mean.unsqueeze(0).expand_as(r.similarity), valid}, 2);
    auto flat = cues.flatten(0, 1);
    auto embedded = similarity_embed_->forward(flat);
    r.visibility_features = embedded.view({n, -1, kVisibilityFeatureChannels, embedded.size(2), embedded.size(3)});
    r.blend = blend_weights(torch::zeros_like(r.similarity), valid);
  } else {
    auto sve = sve_->forward(r.warped_features.data, r.similarity, similarity_mean, valid);
    r.visibility = sve.visibility;
    r.visibility_features = sve.features;
    r.blend = blend_weights(r.visibility, valid);
  }
  r.consensus = build_consensus(r.visibility_features);

  if (config_.ablation == Ablation::kOverCompositing) {
    auto alpha = torch::sigmoid(consensus_head_->forward(r.consensus));
    auto per_plane = (r.blend.unsqueeze(2) * r.warped_colors.data).sum(0);  // [D, 3, H, W]
    auto composite = over_composite(alpha, per_plane);
    r.depth_prob = composite.weights;
    r.aggregated = aggregate(r.warped_colors.data, r.blend, r.depth_prob, false);
  } else {
    if (config_.ablation == Ablation::kNoRayCasting)
      r.depth_prob = torch::softmax(consensus_head_->forward(r.consensus), 0);
    else
      r.depth_prob = ray_caster_->forward(r.consensus);
    r.aggregated = aggregate(r.warped_colors.data, r.blend, r.depth_prob);
  }

  if (config_.ablation == Ablation::kNoRefinement) {
    r.output = r.aggregated.image;
  } else {
    auto warps = config_.ablation == Ablation::kNoWarpedSources
                     ? torch::zeros_like(r.aggregated.warps)
                     : r.aggregated.warps;
    r.candidates = refinement_->forward(r.aggregated.image, warps);
    r.output = blend_candidates(r.candidates.images, r.candidates.confidence);
  }
  return r;
}

torch::Tensor SvnvsModelImpl::depth_map(const ForwardResult& result, const DepthPlanes& planes) const {
  auto prob = result.depth_prob.detach();
  if (config_.ablation == Ablation::kOverCompositing) {
    auto mass = prob.sum(0, true);
    const auto d = prob.size(0);
    prob = torch::where(mass > 1e-12, prob / mass.clamp_min(1e-12),
                        torch::full_like(prob, 1.0 / static_cast<double>(d)));
  }
  return softargmax_depth(prob, planes);
}

}  // namespace svnvs

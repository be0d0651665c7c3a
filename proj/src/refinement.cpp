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

#include "svnvs/refinement.hpp"

#include "svnvs/error.hpp"

namespace svnvs {

namespace F = torch::nn::functional;

namespace {
torch::nn::InstanceNorm2d instance_norm(int64_t c) {
  return torch::nn::InstanceNorm2d(torch::nn::InstanceNorm2dOptions(c).affine(true));
}
}  // namespace

RefinementNetImpl::Encoder RefinementNetImpl::make_encoder(const std::string& prefix) {
  const auto& c = config_.channels;
  const std::array<int64_t, 4> in = {3, c[0], c[1], c[2]};
  const std::array<int64_t, 4> out = {c[0], c[1], c[2], c[2]};
  Encoder enc;
  for (int l = 0; l < 4; ++l) {
    const auto name = prefix + std::to_string(l);
    enc.convs[l] = register_module(
        name + "_conv",
        torch::nn::Conv2d(torch::nn::Conv2dOptions(in[l], out[l], 3).stride(l == 0 ? 1 : 2).padding(1)));
    enc.norms[l] = register_module(name + "_norm", instance_norm(out[l]));
  }
  return enc;
}

RefinementNetImpl::RefinementNetImpl(const RefineConfig& config) : config_(config) {
  const auto& c = config.channels;
  require(c[0] > 0 && c[1] > 0 && c[2] > 0, "refinement: channel counts must be positive");
  aggregated_enc_ = make_encoder("agg");
  warp_enc_ = make_encoder("warp");
  // Decoder level l consumes the upsampled deeper output plus both skips at l.
  const std::array<int64_t, 3> skip = {2 * c[0], 2 * c[1], 2 * c[2]};
  const std::array<int64_t, 3> deeper = {c[1], c[2], 2 * c[2]};
  const std::array<int64_t, 3> out = {c[0], c[1], c[2]};
  for (int l = 2; l >= 0; --l) {
    const auto name = "up" + std::to_string(l);
    up_convs_[l] = register_module(
        name + "_conv",
        torch::nn::Conv2d(torch::nn::Conv2dOptions(deeper[l] + skip[l], out[l], 3).padding(1)));
    up_norms_[l] = register_module(name + "_norm", instance_norm(out[l]));
  }
  out_conv_ = register_module("out_conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(c[0], c[0], 3).padding(1)));
  image_head_ = register_module("image_head", torch::nn::Conv2d(torch::nn::Conv2dOptions(c[0], 3, 3).padding(1)));
  confidence_head_ = register_module(
      "confidence_head", torch::nn::Conv2d(torch::nn::Conv2dOptions(c[0], 1, 3).padding(1)));
  torch::NoGradGuard no_grad;
  confidence_head_->weight.zero_();
  confidence_head_->bias.zero_();
}

std::vector<torch::Tensor> RefinementNetImpl::encode(Encoder& enc, const torch::Tensor& x) {
  std::vector<torch::Tensor> levels;
  auto h = x;
  for (int l = 0; l < 4; ++l) {
    h = torch::relu(enc.norms[l]->forward(enc.convs[l]->forward(h)));
    levels.push_back(h);
  }
  return levels;
}

RefinedCandidates RefinementNetImpl::forward(const torch::Tensor& aggregated,
                                             const torch::Tensor& warps) {
  require(aggregated.dim() == 3 && aggregated.size(0) == 3, "refine: aggregated must be [3, H, W]");
  require(warps.dim() == 4 && warps.size(1) == 3 && warps.size(2) == aggregated.size(1) &&
              warps.size(3) == aggregated.size(2),
          "refine: warps must be [N, 3, H, W] matching the aggregated image");
  const int64_t n = warps.size(0);
  auto a = encode(aggregated_enc_, aggregated.unsqueeze(0).expand({n, -1, -1, -1}));
  auto b = encode(warp_enc_, warps);
  auto h = torch::cat({a[3], b[3]}, 1);
  for (int l = 2; l >= 0; --l) {
    auto up = F::interpolate(h, F::InterpolateFuncOptions()
                                    .size(std::vector<int64_t>{a[l].size(2), a[l].size(3)})
                                    .mode(torch::kBilinear)
                                    .align_corners(false));
    h = torch::relu(up_norms_[l]->forward(up_convs_[l]->forward(torch::cat({up, a[l], b[l]}, 1))));
  }
  h = torch::relu(out_conv_->forward(h));
  RefinedCandidates out{torch::sigmoid(image_head_->forward(h)), confidence_head_->forward(h)};
  require(torch::isfinite(out.images).all().item<bool>() &&
              torch::isfinite(out.confidence).all().item<bool>(),
          "refine: non-finite output", ErrorCode::kNumerical);
  return out;
}

torch::Tensor blend_candidates(const torch::Tensor& images, const torch::Tensor& confidence) {
  require(images.dim() == 4 && images.size(0) >= 1 && images.size(1) == 3,
          "blend_candidates: need a non-empty [N, 3, H, W] stack");
  require(confidence.dim() == 4 && confidence.size(0) == images.size(0) && confidence.size(1) == 1,
          "blend_candidates: confidence must be [N, 1, H, W]");
  return (torch::softmax(confidence, 0) * images).sum(0);
}

}  // namespace svnvs

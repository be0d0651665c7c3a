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

#include <array>

#include <torch/torch.h>

namespace svnvs {

struct RefineConfig {
  std::array<int, 3> channels = {16, 32, 64};
};

struct RefinedCandidates {
  torch::Tensor images;      // [N, 3, H, W] in [0, 1]
  torch::Tensor confidence;  // [N, 1, H, W] logits
};

/// Two-branch encoder-decoder. One encoder sees the aggregated image, the
/// other a per-source expected warp; their features are concatenated at every
/// scale (full, 1/2, 1/4, 1/8) and decoded with skip connections into an
/// image (sigmoid) and a confidence logit. The confidence head starts at zero.
class RefinementNetImpl : public torch::nn::Module {
 public:
  explicit RefinementNetImpl(const RefineConfig& config = {});

  /// aggregated [3, H, W] (shared by all sources), warps [N, 3, H, W].
  RefinedCandidates forward(const torch::Tensor& aggregated, const torch::Tensor& warps);

 private:
  struct Encoder {
    std::array<torch::nn::Conv2d, 4> convs{nullptr, nullptr, nullptr, nullptr};
    std::array<torch::nn::InstanceNorm2d, 4> norms{nullptr, nullptr, nullptr, nullptr};
  };
  Encoder make_encoder(const std::string& prefix);
  std::vector<torch::Tensor> encode(Encoder& enc, const torch::Tensor& x);

  RefineConfig config_;
  Encoder aggregated_enc_, warp_enc_;
  std::array<torch::nn::Conv2d, 3> up_convs_{nullptr, nullptr, nullptr};
  std::array<torch::nn::InstanceNorm2d, 3> up_norms_{nullptr, nullptr, nullptr};
  torch::nn::Conv2d out_conv_{nullptr}, image_head_{nullptr}, confidence_head_{nullptr};
};
TORCH_MODULE(RefinementNet);

/// final = sum_i softmax_i(m) * image_i, per pixel. images [N, 3, H, W],
/// confidence [N, 1, H, W].
torch::Tensor blend_candidates(const torch::Tensor& images, const torch::Tensor& confidence);

}  // namespace svnvs

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

#include <torch/torch.h>

namespace svnvs {

struct FeatureConfig {
  int stem_channels = 16;
  int branch_channels = 8;  // per dilation branch; output has 4x this
};

/// Shared 3x3 stem followed by four parallel dilated 3x3 branches (dilation
/// 1, 2, 3, 4) whose outputs are concatenated. Zero padding throughout, so
/// the output keeps the input resolution pixel for pixel.
class FeatureExtractorImpl : public torch::nn::Module {
 public:
  explicit FeatureExtractorImpl(const FeatureConfig& config = {});

  /// [N, 3, H, W] -> [N, 4 * branch_channels, H, W]
  torch::Tensor forward(const torch::Tensor& images);

  int64_t output_channels() const { return 4 * config_.branch_channels; }

 private:
  FeatureConfig config_;
  torch::nn::Conv2d stem1_{nullptr}, stem2_{nullptr};
  torch::nn::ModuleList branches_;
};
TORCH_MODULE(FeatureExtractor);

/// Runs the extractor and rejects non-finite activations.
torch::Tensor extract_features(FeatureExtractor& net, const torch::Tensor& images);

}  // namespace svnvs

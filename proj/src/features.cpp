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

#include "svnvs/features.hpp"

#include "svnvs/error.hpp"

namespace svnvs {

namespace {
torch::nn::Conv2d conv3x3(int64_t in, int64_t out, int64_t dilation = 1) {
  return torch::nn::Conv2d(
      torch::nn::Conv2dOptions(in, out, 3).padding(dilation).dilation(dilation));
}
}  // namespace

FeatureExtractorImpl::FeatureExtractorImpl(const FeatureConfig& config) : config_(config) {
  require(config.stem_channels > 0 && config.branch_channels > 0,
          "feature extractor: channel counts must be positive");
  stem1_ = register_module("stem1", conv3x3(3, config.stem_channels));
  stem2_ = register_module("stem2", conv3x3(config.stem_channels, config.stem_channels));
  branches_ = register_module("branches", torch::nn::ModuleList());
  for (int dilation = 1; dilation <= 4; ++dilation)
    branches_->push_back(conv3x3(config.stem_channels, config.branch_channels, dilation));
}

torch::Tensor FeatureExtractorImpl::forward(const torch::Tensor& images) {
  auto x = torch::relu(stem1_->forward(images));
  x = torch::relu(stem2_->forward(x));
  std::vector<torch::Tensor> outs;
  for (const auto& branch : *branches_)
    outs.push_back(torch::relu(branch->as<torch::nn::Conv2d>()->forward(x)));
  return torch::cat(outs, 1);
}

torch::Tensor extract_features(FeatureExtractor& net, const torch::Tensor& images) {
  require(images.dim() == 4 && images.size(1) == 3, "extract_features: expected [N, 3, H, W]");
  auto out = net->forward(images);
  require(torch::isfinite(out).all().item<bool>(),
          "extract_features: non-finite activations", ErrorCode::kNumerical);
  return out;
}

}  // namespace svnvs

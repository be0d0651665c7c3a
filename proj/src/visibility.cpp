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

#include "svnvs/visibility.hpp"

#include "svnvs/error.hpp"

namespace svnvs {

namespace F = torch::nn::functional;

torch::Tensor correlation(const torch::Tensor& a, const torch::Tensor& b, int64_t channel_dim) {
  auto za = a - a.mean(channel_dim, true);
  auto zb = b - b.mean(channel_dim, true);
  auto na = torch::sqrt(za.pow(2).sum(channel_dim) + kCorrelationEps);
  auto nb = torch::sqrt(zb.pow(2).sum(channel_dim) + kCorrelationEps);
  return (za * zb).sum(channel_dim) / (na * nb);
}

torch::Tensor pairwise_similarity(const WarpedVolume& features) {
  const auto& f = features.data;
  require(f.dim() == 5, "pairwise_similarity: expected data [N, D, C, H, W]");
  const int64_t n = f.size(0);
  require(n >= 2, "pairwise_similarity: need at least two sources");
  require(features.valid.sizes() == torch::IntArrayRef({f.size(0), f.size(1), f.size(3), f.size(4)}),
          "pairwise_similarity: mask shape mismatch");
  // Unit-normalize once; corr(i, j) is then a dot product of normalized vectors.
  auto z = f - f.mean(2, true);
  auto unit = z / torch::sqrt(z.pow(2).sum(2, true) + kCorrelationEps);
  auto masked = unit * features.valid.unsqueeze(2);
  auto total = masked.sum(0, true);
  auto others = total - masked;
  return (masked * others).sum(2) / static_cast<double>(n - 1);
}

SveNetImpl::SveNetImpl(int64_t feature_channels, const SveConfig& config) : config_(config) {
  const int c0 = config.channels_full, c1 = config.channels_low;
  require(c0 > 0 && c1 > 0, "SVE: channel counts must be positive");
  enc0_ = register_module("enc0", ConvLstmCell(feature_channels + 3, c0, 3));
  down1_ = register_module("down1", torch::nn::Conv2d(torch::nn::Conv2dOptions(c0, c1, 3).stride(2).padding(1)));
  enc1_ = register_module("enc1", ConvLstmCell(c1, c1, 3));
  down2_ = register_module("down2", torch::nn::Conv2d(torch::nn::Conv2dOptions(c1, c1, 3).stride(2).padding(1)));
  enc2_ = register_module("enc2", ConvLstmCell(c1, c1, 3));
  dec1_ = register_module("dec1", ConvLstmCell(2 * c1, c1, 3));
  dec0_ = register_module("dec0", ConvLstmCell(c1 + c0, c0, 3));
  visibility_head_ = register_module("visibility_head", torch::nn::Conv2d(torch::nn::Conv2dOptions(c0, 1, 1)));
  feature_head_ = register_module(
      "feature_head", torch::nn::Conv2d(torch::nn::Conv2dOptions(c0, kVisibilityFeatureChannels, 1)));
}

namespace {
torch::Tensor upsample_to(const torch::Tensor& x, const torch::Tensor& like) {
  return F::interpolate(x, F::InterpolateFuncOptions()
                               .size(std::vector<int64_t>{like.size(2), like.size(3)})
                               .mode(torch::kBilinear)
                               .align_corners(false));
}
}  // namespace

SveOutput SveNetImpl::forward(const torch::Tensor& features, const torch::Tensor& similarity,
                              const torch::Tensor& similarity_mean, const torch::Tensor& valid) {
  require(features.dim() == 5, "SVE: features must be [N, D, C, H, W]");
  const int64_t n = features.size(0), depth = features.size(1);
  LstmState s_enc0, s_enc1, s_enc2, s_dec1, s_dec0;
  std::vector<torch::Tensor> vis, feat;
  vis.reserve(depth);
  feat.reserve(depth);
  for (int64_t d = 0; d < depth; ++d) {
    auto x = torch::cat({features.select(1, d), similarity.select(1, d).unsqueeze(1),
                         similarity_mean.select(0, d).unsqueeze(0).unsqueeze(0).expand(
                             {n, 1, -1, -1}),
                         valid.select(1, d).unsqueeze(1)},
                        1);
    s_enc0 = enc0_->forward(x, s_enc0);
    s_enc1 = enc1_->forward(torch::relu(down1_->forward(s_enc0.hidden)), s_enc1);
    s_enc2 = enc2_->forward(torch::relu(down2_->forward(s_enc1.hidden)), s_enc2);
    s_dec1 = dec1_->forward(torch::cat({upsample_to(s_enc2.hidden, s_enc1.hidden), s_enc1.hidden}, 1), s_dec1);
    s_dec0 = dec0_->forward(torch::cat({upsample_to(s_dec1.hidden, s_enc0.hidden), s_enc0.hidden}, 1), s_dec0);
    vis.push_back(visibility_head_->forward(s_dec0.hidden).squeeze(1));
    feat.push_back(feature_head_->forward(s_dec0.hidden));
  }
  SveOutput out{torch::stack(vis, 1), torch::stack(feat, 1)};
  require(torch::isfinite(out.visibility).all().item<bool>() &&
              torch::isfinite(out.features).all().item<bool>(),
          "SVE: non-finite output", ErrorCode::kNumerical);
  return out;
}

torch::Tensor build_consensus(const torch::Tensor& visibility_features) {
  require(visibility_features.defined() && visibility_features.dim() == 5 &&
              visibility_features.size(0) >= 1,
          "build_consensus: expected a non-empty [N, D, 8, H, W] stack");
  return visibility_features.mean(0);
}

}  // namespace svnvs

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

#include "svnvs/geometry.hpp"
#include "svnvs/recurrent.hpp"

namespace svnvs {

/// Stabilizer inside the similarity denominator.
inline constexpr double kCorrelationEps = 1e-6;

/// Normalized cross-correlation of two [..., C, ...] feature volumes along
/// `channel_dim`: zero-mean vectors, dot product divided by
/// sqrt(|a|^2 + eps) * sqrt(|b|^2 + eps). Zero-variance vectors give 0.
torch::Tensor correlation(const torch::Tensor& a, const torch::Tensor& b, int64_t channel_dim);

/// S_i = 1/(N-1) * sum_{j != i} corr(F_i, F_j) per voxel, where a pair only
/// contributes when both samples are valid.
///   features: warped features, data [N, D, C, H, W], valid [N, D, H, W]
///   returns:  [N, D, H, W]
torch::Tensor pairwise_similarity(const WarpedVolume& features);

struct SveConfig {
  int channels_full = 16;  // full-resolution stages
  int channels_low = 32;   // half- and quarter-resolution stages
};

inline constexpr int kVisibilityFeatureChannels = 8;

struct SveOutput {
  torch::Tensor visibility;  // V: [N, D, H, W] logits
  torch::Tensor features;    // B: [N, D, 8, H, W]
};

/// Source-view visibility estimator. A 2-D encoder-decoder (two stride-2
/// downsampling stages, skip connections) with a convolutional LSTM at each
/// of its five stages; the recurrence runs over depth planes from near to
/// far. Per plane the input is [F_i, S_i, mean_j S_j, valid_i]. Sources are
/// processed as a batch with shared weights.
class SveNetImpl : public torch::nn::Module {
 public:
  SveNetImpl(int64_t feature_channels, const SveConfig& config = {});

  /// features [N, D, C, H, W], similarity [N, D, H, W], similarity_mean
  /// [D, H, W], valid [N, D, H, W].
  SveOutput forward(const torch::Tensor& features, const torch::Tensor& similarity,
                    const torch::Tensor& similarity_mean, const torch::Tensor& valid);

 private:
  SveConfig config_;
  ConvLstmCell enc0_{nullptr}, enc1_{nullptr}, enc2_{nullptr}, dec1_{nullptr}, dec0_{nullptr};
  torch::nn::Conv2d down1_{nullptr}, down2_{nullptr};
  torch::nn::Conv2d visibility_head_{nullptr}, feature_head_{nullptr};
};
TORCH_MODULE(SveNet);

/// Mean over sources of the visibility features: [N, D, 8, H, W] -> [D, 8, H, W].
torch::Tensor build_consensus(const torch::Tensor& visibility_features);

}  // namespace svnvs

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

/// Learned per-ray recurrent scan over the consensus volume, near to far. A
/// 1x1 convolutional LSTM consumes one consensus plane per step and emits a
/// scalar score; scores are softmax-normalized along depth.
class SoftRayCasterImpl : public torch::nn::Module {
 public:
  SoftRayCasterImpl(int64_t consensus_channels, int64_t hidden_channels = 16);

  /// consensus [D, C, H, W] -> depth probability [D, H, W]
  torch::Tensor forward(const torch::Tensor& consensus);

 private:
  ConvLstmCell cell_{nullptr};
  torch::nn::Conv2d score_{nullptr};
};
TORCH_MODULE(SoftRayCaster);

/// Per-voxel linear read-out of the consensus volume, [D, C, H, W] -> [D, H, W].
/// Used by the ablations that replace ray casting.
class ConsensusHeadImpl : public torch::nn::Module {
 public:
  explicit ConsensusHeadImpl(int64_t consensus_channels);
  torch::Tensor forward(const torch::Tensor& consensus);

 private:
  torch::nn::Conv2d linear_{nullptr};
};
TORCH_MODULE(ConsensusHead);

/// w_i = exp(V_i) / sum_j exp(V_j) over the source axis (dim 0) with max
/// subtraction. With a validity mask, invalid sources get zero weight and the
/// rest are renormalized; where no source is valid the weights fall back to
/// uniform.
torch::Tensor blend_weights(const torch::Tensor& visibility,
                            const torch::Tensor& valid = torch::Tensor());

struct AggregatedImage {
  torch::Tensor image;  // [3, H, W], unclamped
  torch::Tensor warps;  // [N, 3, H, W], per-source expected warps
};

/// I = sum_d p(d) sum_i w_i^d C_i^d and I_i^warp = sum_d C_i^d p(d).
///   colors [N, D, 3, H, W], weights [N, D, H, W], prob [D, H, W]
/// `check_normalized` rejects a depth distribution that does not sum to one;
/// over-compositing passes unnormalized compositing weights.
AggregatedImage aggregate(const torch::Tensor& colors, const torch::Tensor& weights,
                          const torch::Tensor& prob, bool check_normalized = true);

struct CompositeResult {
  torch::Tensor image;          // [3, H, W]
  torch::Tensor accumulated;    // [H, W], sum_d alpha_d T_d
  torch::Tensor weights;        // [D, H, W], alpha_d T_d
  torch::Tensor transmittance;  // [D, H, W], T_d = prod_{d' < d} (1 - alpha_d')
};

/// Front-to-back over compositing. alpha [D, H, W] in [0, 1], colors [D, 3, H, W].
CompositeResult over_composite(const torch::Tensor& alpha, const torch::Tensor& colors);

}  // namespace svnvs

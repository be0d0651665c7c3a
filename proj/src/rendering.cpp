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

#include "svnvs/rendering.hpp"

#include "svnvs/checks.hpp"
#include "svnvs/error.hpp"

namespace svnvs {

SoftRayCasterImpl::SoftRayCasterImpl(int64_t consensus_channels, int64_t hidden_channels) {
  cell_ = register_module("cell", ConvLstmCell(consensus_channels, hidden_channels, 1));
  score_ = register_module("score", torch::nn::Conv2d(torch::nn::Conv2dOptions(hidden_channels, 1, 1)));
}

torch::Tensor SoftRayCasterImpl::forward(const torch::Tensor& consensus) {
  require(consensus.dim() == 4, "soft_ray_cast: consensus must be [D, C, H, W]");
  LstmState state;
  std::vector<torch::Tensor> scores;
  scores.reserve(consensus.size(0));
  for (int64_t d = 0; d < consensus.size(0); ++d) {
    state = cell_->forward(consensus.select(0, d).unsqueeze(0), state);
    scores.push_back(score_->forward(state.hidden).view({consensus.size(2), consensus.size(3)}));
  }
  auto logits = torch::stack(scores, 0);
  require(torch::isfinite(logits).all().item<bool>(), "soft_ray_cast: non-finite scores",
          ErrorCode::kNumerical);
  return torch::softmax(logits, 0);
}

ConsensusHeadImpl::ConsensusHeadImpl(int64_t consensus_channels) {
  linear_ = register_module("linear", torch::nn::Conv2d(torch::nn::Conv2dOptions(consensus_channels, 1, 1)));
}

torch::Tensor ConsensusHeadImpl::forward(const torch::Tensor& consensus) {
  return linear_->forward(consensus).squeeze(1);
}

torch::Tensor blend_weights(const torch::Tensor& visibility, const torch::Tensor& valid) {
  require(visibility.dim() >= 1 && visibility.size(0) >= 1, "blend_weights: need N >= 1 sources");
  require(torch::isfinite(visibility).all().item<bool>(), "blend_weights: non-finite visibility",
          ErrorCode::kNumerical);
  if (!valid.defined()) return torch::softmax(visibility, 0);
  require(valid.sizes() == visibility.sizes(), "blend_weights: mask shape mismatch");
  const auto is_valid = valid > 0.5;
  // Max over valid entries only, so valid logits never underflow to zero.
  auto shift = torch::where(is_valid, visibility, torch::full_like(visibility, -1e30))
                   .amax(0, true)
                   .detach();
  shift = torch::where(shift > -1e29, shift, torch::zeros_like(shift));
  auto e = torch::exp(visibility - shift) * valid;
  auto denom = e.sum(0, true);
  const double n = static_cast<double>(visibility.size(0));
  auto any_valid = denom > 0;
  return torch::where(any_valid, e / torch::where(any_valid, denom, torch::ones_like(denom)),
                      torch::full_like(e, 1.0 / n));
}

AggregatedImage aggregate(const torch::Tensor& colors, const torch::Tensor& weights,
                          const torch::Tensor& prob, bool check_normalized) {
  require(colors.dim() == 5 && colors.size(2) == 3, "aggregate: colors must be [N, D, 3, H, W]");
  const auto n = colors.size(0), d = colors.size(1), h = colors.size(3), w = colors.size(4);
  require(weights.sizes() == torch::IntArrayRef({n, d, h, w}), "aggregate: weight shape mismatch");
  require(prob.sizes() == torch::IntArrayRef({d, h, w}), "aggregate: probability shape mismatch");
  if (check_normalized) {
    const double dev = (prob.detach().sum(0) - 1.0).abs().max().item<double>();
    require(dev <= 1e-5, "aggregate: depth probability not normalized");
  }
  auto p = prob.unsqueeze(0).unsqueeze(2);               // [1, D, 1, H, W]
  auto weighted = weights.unsqueeze(2) * colors;
  if (debug::fault_active("rendering.aggregate"))
    weighted = torch::cat({weighted.slice(0, 0, n - 1), -weighted.slice(0, n - 1, n)}, 0);
  auto blended = weighted.sum(0);  // [D, 3, H, W]
  AggregatedImage out;
  out.image = (blended * prob.unsqueeze(1)).sum(0);
  out.warps = (colors * p).sum(1);
  return out;
}

CompositeResult over_composite(const torch::Tensor& alpha, const torch::Tensor& colors) {
  require(alpha.dim() == 3, "over_composite: alpha must be [D, H, W]");
  require(colors.dim() == 4 && colors.size(0) == alpha.size(0) && colors.size(1) == 3,
          "over_composite: colors must be [D, 3, H, W]");
  const auto a = alpha.detach();
  require(a.min().item<double>() >= 0.0 && a.max().item<double>() <= 1.0,
          "over_composite: opacity outside [0, 1]");
  // T_d = prod_{d' < d} (1 - alpha_d'), an exclusive cumulative product.
  auto one_minus = 1.0 - alpha;
  auto shifted = torch::cat({torch::ones_like(alpha.slice(0, 0, 1)), one_minus.slice(0, 0, -1)}, 0);
  CompositeResult out;
  out.transmittance = torch::cumprod(shifted, 0);
  out.weights = alpha * out.transmittance;
  out.accumulated = out.weights.sum(0);
  out.image = (out.weights.unsqueeze(1) * colors).sum(0);
  return out;
}

}  // namespace svnvs

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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include <torch/torch.h>

namespace svnvs {

/// Frozen feature network for the perceptual loss.
class PerceptualFeatures {
 public:
  virtual ~PerceptualFeatures() = default;
  /// [B, 3, H, W] in [0, 1] -> one activation map per tapped layer.
  virtual std::vector<torch::Tensor> features(const torch::Tensor& images) const = 0;
  virtual std::vector<double> default_layer_weights() const = 0;
  virtual void to(torch::Dtype dtype) = 0;
};

/// Seed-fixed random convolution pyramid (3x3 conv + ReLU, 2x average pool
/// between levels). Layer weights default to 1 / channels.
class RandomConvPyramid final : public PerceptualFeatures {
 public:
  explicit RandomConvPyramid(std::uint64_t seed = 0x5eed, std::vector<int64_t> channels = {8, 16, 32});
  std::vector<torch::Tensor> features(const torch::Tensor& images) const override;
  std::vector<double> default_layer_weights() const override;
  void to(torch::Dtype dtype) override;

 private:
  std::vector<torch::Tensor> weights_, biases_;
};

/// VGG-19 convolutional trunk loaded from a tensor archive holding
/// "conv{block}_{index}.weight" / ".bias" entries in the torchvision layout.
/// Taps the ReLU outputs of conv1_2, conv2_2, conv3_2, conv4_2 and conv5_2;
/// inputs are normalized with the ImageNet mean and deviation.
class Vgg19Features final : public PerceptualFeatures {
 public:
  explicit Vgg19Features(const std::filesystem::path& weights);
  std::vector<torch::Tensor> features(const torch::Tensor& images) const override;
  std::vector<double> default_layer_weights() const override;
  void to(torch::Dtype dtype) override;

  /// Layer names in forward order, e.g. conv1_1 ... conv5_4.
  static std::vector<std::string> layer_names();

 private:
  std::vector<torch::Tensor> weights_, biases_;
};

/// L1(pred, target) + sum_l lambda_l * L1(phi_l(pred), phi_l(target)), each L1
/// a mean absolute difference. An empty `layer_weights` uses the network's
/// defaults; an all-zero one reduces to plain L1. Images are [3, H, W] or
/// [B, 3, H, W].
torch::Tensor perceptual_loss(const torch::Tensor& pred, const torch::Tensor& target,
                              const PerceptualFeatures& net,
                              const std::vector<double>& layer_weights = {});

/// The pixel term alone, mean |pred - target|.
torch::Tensor pixel_l1(const torch::Tensor& pred, const torch::Tensor& target);

/// Four-layer patch discriminator emitting an unbounded score map.
class PatchDiscriminatorImpl : public torch::nn::Module {
 public:
  PatchDiscriminatorImpl();
  torch::Tensor forward(const torch::Tensor& images);

 private:
  torch::nn::Conv2d c1_{nullptr}, c2_{nullptr}, c3_{nullptr}, c4_{nullptr};
  torch::nn::InstanceNorm2d n2_{nullptr}, n3_{nullptr};
};
TORCH_MODULE(PatchDiscriminator);

/// Least-squares GAN objectives.
torch::Tensor lsgan_generator_loss(const torch::Tensor& fake_scores);
torch::Tensor lsgan_discriminator_loss(const torch::Tensor& real_scores,
                                       const torch::Tensor& fake_scores);

}  // namespace svnvs

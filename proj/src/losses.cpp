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

#include "svnvs/losses.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cmath>

#include "svnvs/archive.hpp"
#include "svnvs/error.hpp"

namespace svnvs {

namespace F = torch::nn::functional;

namespace {
torch::Tensor as_batch(const torch::Tensor& x) { return x.dim() == 3 ? x.unsqueeze(0) : x; }
}  // namespace

RandomConvPyramid::RandomConvPyramid(std::uint64_t seed, std::vector<int64_t> channels) {
  require(!channels.empty(), "random pyramid: need at least one level");
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  int64_t in = 3;
  for (auto out : channels) {
    const double scale = std::sqrt(2.0 / static_cast<double>(in * 9));
    weights_.push_back(at::randn({out, in, 3, 3}, gen, torch::kFloat32) * scale);
    biases_.push_back(torch::zeros({out}));
    in = out;
  }
}

std::vector<torch::Tensor> RandomConvPyramid::features(const torch::Tensor& images) const {
  std::vector<torch::Tensor> taps;
  auto x = as_batch(images);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (l > 0) x = F::avg_pool2d(x, F::AvgPool2dFuncOptions(2));
    x = torch::relu(torch::conv2d(x, weights_[l], biases_[l], 1, 1));
    taps.push_back(x);
  }
  return taps;
}

std::vector<double> RandomConvPyramid::default_layer_weights() const {
  std::vector<double> w;
  for (const auto& k : weights_) w.push_back(1.0 / static_cast<double>(k.size(0)));
  return w;
}

void RandomConvPyramid::to(torch::Dtype dtype) {
  for (auto& w : weights_) w = w.to(dtype);
  for (auto& b : biases_) b = b.to(dtype);
}

std::vector<std::string> Vgg19Features::layer_names() {
  const int per_block[] = {2, 2, 4, 4, 4};
  std::vector<std::string> names;
  for (int b = 0; b < 5; ++b)
    for (int i = 1; i <= per_block[b]; ++i)
      names.push_back("conv" + std::to_string(b + 1) + "_" + std::to_string(i));
  return names;
}

Vgg19Features::Vgg19Features(const std::filesystem::path& path) {
  const auto archive = read_archive(path);
  const int64_t expected[] = {64, 64, 128, 128, 256, 256, 256, 256, 512, 512, 512, 512, 512, 512, 512, 512};
  int64_t in = 3, i = 0;
  for (const auto& name : layer_names()) {
    const auto* w = archive.find(name + ".weight");
    const auto* b = archive.find(name + ".bias");
    require(w && b, "VGG-19 weights: missing " + name, ErrorCode::kFormat);
    require(w->sizes() == torch::IntArrayRef({expected[i], in, 3, 3}) && b->numel() == expected[i],
            "VGG-19 weights: unexpected shape for " + name, ErrorCode::kFormat);
    weights_.push_back(w->to(torch::kFloat32));
    biases_.push_back(b->to(torch::kFloat32));
    in = expected[i++];
  }
}

std::vector<torch::Tensor> Vgg19Features::features(const torch::Tensor& images) const {
  const auto opts = images.options();
  auto mean = torch::tensor({0.485, 0.456, 0.406}, opts).view({1, 3, 1, 1});
  auto stdev = torch::tensor({0.229, 0.224, 0.225}, opts).view({1, 3, 1, 1});
  auto x = (as_batch(images) - mean) / stdev;
  const auto names = layer_names();
  std::vector<torch::Tensor> taps;
  for (std::size_t l = 0; l < names.size(); ++l) {
    if (l > 0 && names[l].back() == '1') x = F::max_pool2d(x, F::MaxPool2dFuncOptions(2));
    x = torch::relu(torch::conv2d(x, weights_[l], biases_[l], 1, 1));
    if (names[l].back() == '2') taps.push_back(x);
  }
  return taps;
}

std::vector<double> Vgg19Features::default_layer_weights() const { return {1.0, 1.0, 1.0, 1.0, 1.0}; }

void Vgg19Features::to(torch::Dtype dtype) {
  for (auto& w : weights_) w = w.to(dtype);
  for (auto& b : biases_) b = b.to(dtype);
}

torch::Tensor pixel_l1(const torch::Tensor& pred, const torch::Tensor& target) {
  require(pred.sizes() == target.sizes(), "pixel_l1: shape mismatch");
  return (pred - target).abs().mean();
}

torch::Tensor perceptual_loss(const torch::Tensor& pred, const torch::Tensor& target,
                              const PerceptualFeatures& net, const std::vector<double>& layer_weights) {
  require(pred.sizes() == target.sizes(), "perceptual_loss: images must have the same shape");
  auto loss = pixel_l1(pred, target);
  const auto weights = layer_weights.empty() ? net.default_layer_weights() : layer_weights;
  bool any = false;
  for (double w : weights) any = any || w != 0.0;
  if (!any) return loss;
  const auto fp = net.features(pred);
  const auto ft = net.features(target.detach());
  require(weights.size() == fp.size(), "perceptual_loss: one weight per tapped layer required");
  for (std::size_t l = 0; l < fp.size(); ++l)
    if (weights[l] != 0.0) loss = loss + weights[l] * (fp[l] - ft[l]).abs().mean();
  return loss;
}

PatchDiscriminatorImpl::PatchDiscriminatorImpl() {
  auto conv = [](int64_t in, int64_t out, int64_t stride) {
    return torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 4).stride(stride).padding(1));
  };
  c1_ = register_module("c1", conv(3, 16, 2));
  c2_ = register_module("c2", conv(16, 32, 2));
  n2_ = register_module("n2", torch::nn::InstanceNorm2d(torch::nn::InstanceNorm2dOptions(32).affine(true)));
  c3_ = register_module("c3", conv(32, 64, 1));
  n3_ = register_module("n3", torch::nn::InstanceNorm2d(torch::nn::InstanceNorm2dOptions(64).affine(true)));
  c4_ = register_module("c4", conv(64, 1, 1));
}

torch::Tensor PatchDiscriminatorImpl::forward(const torch::Tensor& images) {
  auto x = F::leaky_relu(c1_->forward(as_batch(images)), F::LeakyReLUFuncOptions().negative_slope(0.2));
  x = F::leaky_relu(n2_->forward(c2_->forward(x)), F::LeakyReLUFuncOptions().negative_slope(0.2));
  x = F::leaky_relu(n3_->forward(c3_->forward(x)), F::LeakyReLUFuncOptions().negative_slope(0.2));
  return c4_->forward(x);
}

torch::Tensor lsgan_generator_loss(const torch::Tensor& fake_scores) {
  return (fake_scores - 1.0).pow(2).mean();
}

torch::Tensor lsgan_discriminator_loss(const torch::Tensor& real_scores, const torch::Tensor& fake_scores) {
  return 0.5 * ((real_scores - 1.0).pow(2).mean() + fake_scores.pow(2).mean());
}

}  // namespace svnvs

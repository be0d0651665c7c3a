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

#include "svnvs/metrics.hpp"

#include <cmath>

#include "svnvs/error.hpp"

namespace svnvs {

namespace {
constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void check_pair(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  require(a.defined() && b.defined() && a.sizes() == b.sizes(),
          std::string(what) + ": images must have the same shape");
}

torch::Tensor gaussian_window() {
  auto x = torch::arange(kWindow, torch::kFloat64) - (kWindow - 1) / 2.0;
  auto g = torch::exp(-x.pow(2) / (2 * kSigma * kSigma));
  g = g / g.sum();
  return torch::outer(g, g).view({1, 1, kWindow, kWindow});
}
}  // namespace

torch::Tensor luma(const torch::Tensor& image) {
  require(image.dim() == 3 && image.size(0) == 3, "luma: expected [3, H, W]");
  auto img = image.to(torch::kFloat64);
  return 0.299 * img[0] + 0.587 * img[1] + 0.114 * img[2];
}

double psnr(const torch::Tensor& pred, const torch::Tensor& target) {
  check_pair(pred, target, "psnr");
  const double mse =
      (pred.detach().to(torch::kFloat64) - target.detach().to(torch::kFloat64)).pow(2).mean().item<double>();
  if (mse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const torch::Tensor& pred, const torch::Tensor& target) {
  check_pair(pred, target, "ssim");
  require(pred.dim() == 3 && pred.size(0) == 3, "ssim: expected [3, H, W]");
  require(pred.size(1) >= kWindow && pred.size(2) >= kWindow,
          "ssim: images smaller than the 11x11 window");
  auto x = luma(pred.detach()).unsqueeze(0).unsqueeze(0);
  auto y = luma(target.detach()).unsqueeze(0).unsqueeze(0);
  const auto w = gaussian_window();
  auto filt = [&](const torch::Tensor& t) { return torch::conv2d(t, w); };
  auto mx = filt(x), my = filt(y);
  auto sxx = filt(x * x) - mx * mx;
  auto syy = filt(y * y) - my * my;
  auto sxy = filt(x * y) - mx * my;
  auto map = ((2 * mx * my + kC1) * (2 * sxy + kC2)) /
             ((mx * mx + my * my + kC1) * (sxx + syy + kC2));
  return map.mean().item<double>();
}

}  // namespace svnvs

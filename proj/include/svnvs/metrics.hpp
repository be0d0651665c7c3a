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

#include <limits>

#include <torch/torch.h>

namespace svnvs {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(1 / MSE) over all channels, images in [0, 1].
double psnr(const torch::Tensor& pred, const torch::Tensor& target);

/// Mean SSIM of the luma channels (0.299, 0.587, 0.114) with an 11x11
/// Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1.
/// Only windows fully inside the image contribute.
double ssim(const torch::Tensor& pred, const torch::Tensor& target);

/// Luma of a [3, H, W] image, [H, W].
torch::Tensor luma(const torch::Tensor& image);

}  // namespace svnvs

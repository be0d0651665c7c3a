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

#include <filesystem>

#include <torch/torch.h>

namespace svnvs {

/// Decodes an 8- or 16-bit image file into a float32 [3, H, W] tensor in
/// [0, 1]. Grayscale inputs are replicated to three channels.
torch::Tensor read_image(const std::filesystem::path& path);

/// Writes a [3, H, W] tensor as 8-bit PNG. Values are clamped to [0, 1].
void write_image(const std::filesystem::path& path, const torch::Tensor& image);

/// Single-channel float32 maps ([H, W]) as Portable Float Map files.
void write_float_map(const std::filesystem::path& path, const torch::Tensor& map);
torch::Tensor read_float_map(const std::filesystem::path& path);

/// 8-bit colormapped depth visualization, normalized in inverse depth over
/// [d_min, d_max] so near geometry gets the most contrast.
void write_depth_colormap(const std::filesystem::path& path,
                          const torch::Tensor& depth, double d_min,
                          double d_max);

}  // namespace svnvs

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

#include "svnvs/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "svnvs/error.hpp"

namespace svnvs {

torch::Tensor read_image(const std::filesystem::path& path) {
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) fail(ErrorCode::kIo, "cannot decode image " + path.string());
  double scale = 1.0;
  switch (raw.depth()) {
    case CV_8U: scale = 1.0 / 255.0; break;
    case CV_16U: scale = 1.0 / 65535.0; break;
    default: fail(ErrorCode::kFormat, "unsupported bit depth in " + path.string());
  }
  cv::Mat rgb;
  switch (raw.channels()) {
    case 1: cv::cvtColor(raw, rgb, cv::COLOR_GRAY2RGB); break;
    case 3: cv::cvtColor(raw, rgb, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(raw, rgb, cv::COLOR_BGRA2RGB); break;
    default: fail(ErrorCode::kFormat, "unsupported channel count in " + path.string());
  }
  cv::Mat f;
  rgb.convertTo(f, CV_32FC3, scale);
  auto hwc = torch::from_blob(f.data, {f.rows, f.cols, 3}, torch::kFloat32);
  return hwc.permute({2, 0, 1}).contiguous().clone();
}

void write_image(const std::filesystem::path& path, const torch::Tensor& image) {
  require(image.dim() == 3 && image.size(0) == 3, "write_image: expected [3, H, W]");
  auto hwc = (image.detach().to(torch::kFloat64).clamp(0.0, 1.0) * 255.0)
                 .round()
                 .to(torch::kUInt8)
                 .permute({1, 2, 0})
                 .contiguous();
  cv::Mat rgb(static_cast<int>(hwc.size(0)), static_cast<int>(hwc.size(1)), CV_8UC3,
              hwc.data_ptr<uint8_t>());
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path.string(), bgr)) fail(ErrorCode::kIo, "cannot write " + path.string());
}

void write_float_map(const std::filesystem::path& path, const torch::Tensor& map) {
  require(map.dim() == 2, "write_float_map: expected [H, W]");
  auto m = map.detach().to(torch::kFloat32).contiguous();
  cv::Mat mat(static_cast<int>(m.size(0)), static_cast<int>(m.size(1)), CV_32FC1,
              m.data_ptr<float>());
  if (!cv::imwrite(path.string(), mat)) fail(ErrorCode::kIo, "cannot write " + path.string());
}

torch::Tensor read_float_map(const std::filesystem::path& path) {
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) fail(ErrorCode::kIo, "cannot decode float map " + path.string());
  require(raw.type() == CV_32FC1, "float map must be single-channel float32",
          ErrorCode::kFormat);
  return torch::from_blob(raw.data, {raw.rows, raw.cols}, torch::kFloat32).clone();
}

void write_depth_colormap(const std::filesystem::path& path, const torch::Tensor& depth,
                          double d_min, double d_max) {
  require(depth.dim() == 2, "write_depth_colormap: expected [H, W]");
  require(0 < d_min && d_min < d_max, "write_depth_colormap: bad depth range");
  const double near = 1.0 / d_min, far = 1.0 / d_max;
  auto level = ((1.0 / depth.detach().to(torch::kFloat64).clamp(d_min, d_max) - far) /
                (near - far) * 255.0)
                   .round()
                   .to(torch::kUInt8)
                   .contiguous();
  cv::Mat gray(static_cast<int>(level.size(0)), static_cast<int>(level.size(1)), CV_8UC1,
               level.data_ptr<uint8_t>());
  cv::Mat color;
  cv::applyColorMap(gray, color, cv::COLORMAP_TURBO);
  if (!cv::imwrite(path.string(), color)) fail(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace svnvs

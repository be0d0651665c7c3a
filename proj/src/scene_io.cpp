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

#include "svnvs/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "svnvs/error.hpp"
#include "svnvs/image_io.hpp"

namespace svnvs {
namespace {

using nlohmann::json;

constexpr double kRotationTol = 1e-6;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

json record_to_json(const ViewRecord& v, bool with_image) {
  json j;
  j["id"] = v.id;
  if (with_image || !v.image_path.empty()) j["image_path"] = v.image_path;
  j["fx"] = v.intrinsics.fx;
  j["fy"] = v.intrinsics.fy;
  j["cx"] = v.intrinsics.cx;
  j["cy"] = v.intrinsics.cy;
  j["width"] = v.intrinsics.width;
  j["height"] = v.intrinsics.height;
  j["rotation_row_major_9"] = v.pose.rotation;
  j["translation_3"] = v.pose.translation;
  return j;
}

ViewRecord record_from_json(const json& j) {
  try {
    ViewRecord v;
    v.id = j.at("id").get<std::string>();
    v.image_path = j.value("image_path", std::string{});
    v.intrinsics.fx = j.at("fx").get<double>();
    v.intrinsics.fy = j.at("fy").get<double>();
    v.intrinsics.cx = j.at("cx").get<double>();
    v.intrinsics.cy = j.at("cy").get<double>();
    v.intrinsics.width = j.at("width").get<int>();
    v.intrinsics.height = j.at("height").get<int>();
    v.pose.rotation = j.at("rotation_row_major_9").get<Mat3>();
    v.pose.translation = j.at("translation_3").get<Vec3>();
    return v;
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("malformed view entry: ") + e.what());
  }
}

}  // namespace

void CameraIntrinsics::validate() const {
  require(width > 0 && height > 0, "intrinsics: image size must be positive");
  require(fx > 0 && fy > 0, "intrinsics: focal lengths must be positive");
  require(cx >= 0 && cx < width && cy >= 0 && cy < height,
          "intrinsics: principal point outside the image");
}

void CameraPose::validate() const {
  for (double r : rotation) require(std::isfinite(r), "pose: non-finite rotation");
  for (double t : translation) require(std::isfinite(t), "pose: non-finite translation");
  const auto& R = rotation;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += R[k * 3 + i] * R[k * 3 + j];
      require(std::abs(dot - (i == j ? 1.0 : 0.0)) < kRotationTol,
              "pose: rotation is not orthonormal");
    }
  }
  const double det = R[0] * (R[4] * R[8] - R[5] * R[7]) -
                     R[1] * (R[3] * R[8] - R[5] * R[6]) +
                     R[2] * (R[3] * R[7] - R[4] * R[6]);
  require(std::abs(det - 1.0) < kRotationTol, "pose: rotation determinant is not +1");
}

Vec3 CameraPose::center() const {
  const auto& R = rotation;
  const auto& t = translation;
  return {-(R[0] * t[0] + R[3] * t[1] + R[6] * t[2]),
          -(R[1] * t[0] + R[4] * t[1] + R[7] * t[2]),
          -(R[2] * t[0] + R[5] * t[1] + R[8] * t[2])};
}

void View::validate() const {
  intrinsics.validate();
  pose.validate();
  require(image.defined() && image.dim() == 3 && image.size(0) == 3,
          "view " + id + ": image must be [3, H, W]");
  require(image.size(1) == intrinsics.height && image.size(2) == intrinsics.width,
          "view " + id + ": image size does not match intrinsics");
  require(image.min().item<double>() >= 0.0 && image.max().item<double>() <= 1.0,
          "view " + id + ": pixel values outside [0, 1]");
}

void SceneManifest::validate() const {
  require(d_min > 0 && d_min < d_max, "manifest: need 0 < d_min < d_max");
  require(views.size() >= 2, "manifest: at least two views required");
  std::set<std::string> ids;
  for (const auto& v : views) {
    require(ids.insert(v.id).second, "manifest: duplicate view id " + v.id);
    v.intrinsics.validate();
    v.pose.validate();
  }
}

const ViewRecord& SceneManifest::find(const std::string& id) const {
  for (const auto& v : views)
    if (v.id == id) return v;
  fail(ErrorCode::kNotFound, "view id not in manifest: " + id);
}

std::filesystem::path SceneManifest::resolve(const ViewRecord& record) const {
  std::filesystem::path p(record.image_path);
  return p.is_absolute() ? p : base_dir / p;
}

Mat3 quaternion_to_rotation(double qw, double qx, double qy, double qz) {
  const double n = std::sqrt(qw * qw + qx * qx + qy * qy + qz * qz);
  require(n > 0 && std::isfinite(n), "quaternion must be finite and non-zero");
  qw /= n;
  qx /= n;
  qy /= n;
  qz /= n;
  return {1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qw * qz), 2 * (qx * qz + qw * qy),
          2 * (qx * qy + qw * qz), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qw * qx),
          2 * (qx * qz - qw * qy), 2 * (qy * qz + qw * qx), 1 - 2 * (qx * qx + qy * qy)};
}

SceneManifest import_colmap(const std::filesystem::path& cameras_text,
                            const std::filesystem::path& images_text,
                            const std::filesystem::path& images_dir,
                            double d_min, double d_max) {
  std::map<long, CameraIntrinsics> cameras;
  {
    auto in = open_text(cameras_text);
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      long id = 0;
      std::string model;
      CameraIntrinsics k;
      if (!(ss >> id >> model >> k.width >> k.height))
        fail(ErrorCode::kFormat, "cameras.txt: malformed line: " + line);
      if (model == "PINHOLE") {
        if (!(ss >> k.fx >> k.fy >> k.cx >> k.cy))
          fail(ErrorCode::kFormat, "cameras.txt: PINHOLE needs 4 parameters");
      } else if (model == "SIMPLE_PINHOLE") {
        double f = 0;
        if (!(ss >> f >> k.cx >> k.cy))
          fail(ErrorCode::kFormat, "cameras.txt: SIMPLE_PINHOLE needs 3 parameters");
        k.fx = k.fy = f;
      } else {
        fail(ErrorCode::kFormat, "cameras.txt: unsupported camera model " + model +
                                     " (camera " + std::to_string(id) +
                                     "); only PINHOLE and SIMPLE_PINHOLE are supported");
      }
      k.validate();
      cameras[id] = k;
    }
  }

  SceneManifest manifest;
  manifest.name = images_dir.filename().string();
  manifest.d_min = d_min;
  manifest.d_max = d_max;
  manifest.base_dir = images_dir;

  auto in = open_text(images_text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string header = trim(line);
    if (header.empty() || header[0] == '#') continue;
    std::istringstream ss(header);
    long image_id = 0, camera_id = 0;
    double qw, qx, qy, qz;
    ViewRecord v;
    if (!(ss >> image_id >> qw >> qx >> qy >> qz >> v.pose.translation[0] >>
          v.pose.translation[1] >> v.pose.translation[2] >> camera_id >> v.image_path))
      fail(ErrorCode::kFormat, "images.txt: malformed image line: " + header);
    // Every image line is followed by its 2-D point list, possibly empty.
    std::getline(in, line);
    const auto cam = cameras.find(camera_id);
    if (cam == cameras.end())
      fail(ErrorCode::kFormat, "images.txt: image " + std::to_string(image_id) +
                                   " references unknown camera " + std::to_string(camera_id));
    v.id = std::filesystem::path(v.image_path).stem().string();
    v.intrinsics = cam->second;
    v.pose.rotation = quaternion_to_rotation(qw, qx, qy, qz);
    if (!std::filesystem::exists(images_dir / v.image_path))
      fail(ErrorCode::kNotFound, "missing image file for view " + v.id + ": " +
                                     (images_dir / v.image_path).string());
    manifest.views.push_back(std::move(v));
  }
  manifest.validate();
  return manifest;
}

SceneManifest read_manifest(const std::filesystem::path& path) {
  auto in = open_text(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, "manifest " + path.string() + ": " + e.what());
  }
  SceneManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    const auto range = j.at("depth_range").get<std::array<double, 2>>();
    m.d_min = range[0];
    m.d_max = range[1];
    for (const auto& v : j.at("views")) m.views.push_back(record_from_json(v));
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, "manifest " + path.string() + ": " + e.what());
  }
  m.base_dir = path.parent_path();
  m.validate();
  return m;
}

void write_manifest(const SceneManifest& manifest, const std::filesystem::path& path) {
  json j;
  j["name"] = manifest.name;
  j["depth_range"] = {manifest.d_min, manifest.d_max};
  j["views"] = json::array();
  for (const auto& v : manifest.views) j["views"].push_back(record_to_json(v, true));
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

ViewRecord read_pose_file(const std::filesystem::path& path) {
  auto in = open_text(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, "pose file " + path.string() + ": " + e.what());
  }
  ViewRecord v = record_from_json(j);
  v.intrinsics.validate();
  v.pose.validate();
  return v;
}

void write_pose_file(const ViewRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << record_to_json(record, false).dump(2) << "\n";
}

std::vector<ViewRecord> select_source_views(const SceneManifest& manifest,
                                            const std::string& target_id,
                                            std::size_t n) {
  return select_source_views(manifest, manifest.find(target_id).pose, n, target_id);
}

std::vector<ViewRecord> select_source_views(const SceneManifest& manifest, const CameraPose& pose,
                                            std::size_t n, const std::string& exclude_id) {
  require(n >= 1, "select_source_views: n must be at least 1");
  const Vec3 target = pose.center();
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < manifest.views.size(); ++i) {
    if (!exclude_id.empty() && manifest.views[i].id == exclude_id) continue;
    const Vec3 c = manifest.views[i].pose.center();
    const double d2 = (c[0] - target[0]) * (c[0] - target[0]) +
                      (c[1] - target[1]) * (c[1] - target[1]) +
                      (c[2] - target[2]) * (c[2] - target[2]);
    order.emplace_back(d2, i);
  }
  require(n <= order.size(), "select_source_views: requested " + std::to_string(n) +
                                 " sources but only " + std::to_string(order.size()) +
                                 " other views exist");
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ViewRecord> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(manifest.views[order[k].second]);
  return out;
}

View load_view(const SceneManifest& manifest, const ViewRecord& record) {
  View v;
  v.id = record.id;
  v.intrinsics = record.intrinsics;
  v.pose = record.pose;
  v.image = read_image(manifest.resolve(record));
  v.validate();
  return v;
}

}  // namespace svnvs

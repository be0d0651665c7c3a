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

// Exercises the shared library through its C interface only.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "svnvs/svnvs.h"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  Scratch() {
    path = fs::temp_directory_path() / ("svnvs_capi_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path path;
};

// Narrow network so the whole file runs in seconds.
const char* kTinyConfig = R"({
  "feature_stem_channels": 4, "feature_branch_channels": 2,
  "sve_channels": [4, 6], "src_hidden": 6, "refine_channels": [4, 6, 8],
  "gan": false
})";

void progress_counter(int64_t, const svnvs_loss_report* r, void* user) {
  CHECK(std::isfinite(r->total));
  ++*static_cast<int*>(user);
}

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(svnvs_version()) == "0.1.0");
  CHECK(std::string(svnvs_status_name(SVNVS_CHECK_FAILED)) == "check failed");
  svnvs_scene* scene = nullptr;
  CHECK(svnvs_scene_open("/nonexistent/manifest.json", &scene) == SVNVS_ERR_IO);
  CHECK(scene == nullptr);
  CHECK(std::strlen(svnvs_last_error()) > 0);
  CHECK(svnvs_scene_open(nullptr, &scene) == SVNVS_ERR_INVALID_ARGUMENT);
  svnvs_model* model = nullptr;
  CHECK(svnvs_model_load("/nonexistent.ckpt", &model) == SVNVS_ERR_NOT_FOUND);
  CHECK(svnvs_scene_view_count(nullptr) == 0);
  CHECK(svnvs_scene_view_id(nullptr, 0) == nullptr);
  svnvs_scene_free(nullptr);
  svnvs_model_free(nullptr);
}

TEST_CASE("generate, train, render and synthesize through the C API") {
  Scratch dir;
  svnvs_scene* scene = nullptr;
  const std::string scene_dir = (dir.path / "scene").string();
  REQUIRE(svnvs_scene_generate("two_plane", 4, 24, 32, 7, scene_dir.c_str(), &scene) == SVNVS_OK);
  CHECK(svnvs_scene_view_count(scene) == 4);
  CHECK(std::string(svnvs_scene_view_id(scene, 0)) == "view_00");
  CHECK(svnvs_scene_view_id(scene, 4) == nullptr);
  double dmin = 0, dmax = 0;
  CHECK(svnvs_scene_depth_range(scene, &dmin, &dmax) == SVNVS_OK);
  CHECK(dmin == 1.5);
  CHECK(dmax == 6.0);

  const auto config = dir.path / "tiny.json";
  std::ofstream(config) << kTinyConfig;
  const std::string manifest = scene_dir + "/manifest.json";
  const std::string runs = (dir.path / "runs").string();
  const std::string config_s = config.string();

  svnvs_train_options o;
  svnvs_train_options_init(&o);
  o.scene = manifest.c_str();
  o.out_root = runs.c_str();
  o.config_json = config_s.c_str();
  o.views = 2;
  o.planes = 4;
  o.height = 24;
  o.width = 32;
  o.steps = 3;
  o.seed = 1;
  int calls = 0;
  o.progress = progress_counter;
  o.progress_user = &calls;
  svnvs_train_result result{};
  REQUIRE(svnvs_train(&o, &result) == SVNVS_OK);
  CHECK(calls == 3);
  CHECK(result.steps == 3);
  const fs::path run_dir = result.run_dir;
  for (const char* p : {"checkpoints", "images", "depth", "metrics.csv", "config.snapshot"})
    CHECK(fs::exists(run_dir / p));
  CHECK(fs::exists(result.checkpoint));

  svnvs_model* model = nullptr;
  REQUIRE(svnvs_model_load(result.checkpoint, &model) == SVNVS_OK);
  int h = 0, w = 0, views = 0, planes = 0;
  CHECK(svnvs_model_shape(model, &h, &w, &views, &planes) == SVNVS_OK);
  CHECK(h == 24);
  CHECK(w == 32);
  CHECK(views == 2);
  CHECK(planes == 4);
  std::vector<float> rgb(3 * 24 * 32), depth(24 * 32);
  CHECK(svnvs_model_render_view(model, scene, "view_01", rgb.data(), rgb.size(), depth.data(), depth.size()) ==
        SVNVS_OK);
  for (float v : rgb) CHECK((v >= 0.0f && v <= 1.0f));
  for (float d : depth) CHECK((d >= 1.5f - 1e-4f && d <= 6.0f + 1e-4f));
  CHECK(svnvs_model_render_view(model, scene, "view_01", rgb.data(), 10, nullptr, 0) ==
        SVNVS_ERR_INVALID_ARGUMENT);
  CHECK(svnvs_model_render_view(model, scene, "nope", rgb.data(), rgb.size(), nullptr, 0) == SVNVS_ERR_NOT_FOUND);
  svnvs_model_free(model);

  svnvs_synthesize_options s;
  svnvs_synthesize_options_init(&s);
  const std::string out = (dir.path / "synth").string();
  s.checkpoint = result.checkpoint;
  s.scene = manifest.c_str();
  s.target = "view_00";
  s.out_dir = out.c_str();
  s.permute_sources = 1;
  s.seed = 3;
  svnvs_synthesize_result sr{};
  REQUIRE(svnvs_synthesize(&s, &sr) == SVNVS_OK);
  CHECK(sr.has_reference == 1);
  CHECK(sr.psnr > 0);
  CHECK(sr.has_permutation == 1);
  CHECK(sr.permutation_deviation <= 1e-5);
  CHECK(fs::exists(fs::path(out) / "metrics.csv"));
  CHECK(fs::exists(fs::path(out) / "residual.png"));
  svnvs_scene_free(scene);
}

TEST_CASE("train reports divergence-free bad arguments as invalid") {
  svnvs_train_options o;
  svnvs_train_options_init(&o);
  svnvs_train_result r{};
  CHECK(svnvs_train(&o, &r) == SVNVS_ERR_INVALID_ARGUMENT);
  CHECK(svnvs_train(nullptr, &r) == SVNVS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("check suite through the C API") {
  size_t count = 0;
  CHECK(svnvs_check("geometry", 0, nullptr, 0, &count) == SVNVS_OK);
  CHECK(count > 0);
  std::vector<svnvs_check_row> rows(count);
  CHECK(svnvs_check("geometry", 0, rows.data(), rows.size(), &count) == SVNVS_OK);
  for (const auto& r : rows) {
    CHECK(std::string(r.module).rfind("geometry", 0) == 0);
    CHECK(r.passed == 1);
  }
  REQUIRE(svnvs_debug_inject_fault("rendering.aggregate") == SVNVS_OK);
  CHECK(svnvs_check("rendering.aggregate", 0, nullptr, 0, &count) == SVNVS_CHECK_FAILED);
  CHECK(std::string(svnvs_last_error()).find("rendering.aggregate") != std::string::npos);
  REQUIRE(svnvs_debug_inject_fault(nullptr) == SVNVS_OK);
  CHECK(svnvs_check("rendering.aggregate", 0, nullptr, 0, &count) == SVNVS_OK);
  CHECK(svnvs_check("zzz", 0, nullptr, 0, &count) == SVNVS_ERR_NOT_FOUND);
}

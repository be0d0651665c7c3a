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

#include "svnvs/svnvs.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>
#include <torch/torch.h>

#include "svnvs/commands.hpp"
#include "svnvs/error.hpp"
#include "svnvs/scene_io.hpp"

struct svnvs_scene {
  svnvs::SceneManifest manifest;
};

struct svnvs_model {
  explicit svnvs_model(svnvs::Trainer t) : trainer(std::move(t)) {}
  svnvs::Trainer trainer;
};

namespace {

thread_local std::string last_error;

svnvs_status to_status(svnvs::ErrorCode code) {
  switch (code) {
    case svnvs::ErrorCode::kOk: return SVNVS_OK;
    case svnvs::ErrorCode::kInvalidArgument: return SVNVS_ERR_INVALID_ARGUMENT;
    case svnvs::ErrorCode::kIo: return SVNVS_ERR_IO;
    case svnvs::ErrorCode::kFormat: return SVNVS_ERR_FORMAT;
    case svnvs::ErrorCode::kNumerical: return SVNVS_ERR_NUMERICAL;
    case svnvs::ErrorCode::kNotFound: return SVNVS_ERR_NOT_FOUND;
    case svnvs::ErrorCode::kInternal: return SVNVS_ERR_INTERNAL;
  }
  return SVNVS_ERR_INTERNAL;
}

template <typename F>
svnvs_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const svnvs::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const c10::Error& e) {
    last_error = e.what_without_backtrace();
    return SVNVS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SVNVS_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return SVNVS_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  svnvs::require(p != nullptr, std::string(what) + " must not be null");
}

void copy_string(char* dest, std::size_t capacity, const std::string& src) {
  const std::size_t n = std::min(capacity - 1, src.size());
  std::memcpy(dest, src.data(), n);
  dest[n] = '\0';
}

svnvs_loss_report to_c(const svnvs::LossReport& r) {
  return {r.l1, r.perceptual, r.adversarial_g, r.adversarial_d, r.total, r.psnr};
}

svnvs::TrainConfig base_config(const char* path) {
  nlohmann::json j = svnvs::TrainConfig{}.to_json();
  if (path != nullptr && *path != '\0') {
    std::ifstream in(path);
    svnvs::require(in.good(), std::string("cannot read config ") + path, svnvs::ErrorCode::kIo);
    nlohmann::json user;
    try {
      user = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      svnvs::fail(svnvs::ErrorCode::kFormat, std::string("config ") + path + ": " + e.what());
    }
    svnvs::require(user.is_object(), std::string("config ") + path + ": expected an object",
                   svnvs::ErrorCode::kFormat);
    j.merge_patch(user);
  }
  return svnvs::TrainConfig::from_json(j);
}

}  // namespace

extern "C" {

const char* svnvs_last_error(void) { return last_error.c_str(); }

const char* svnvs_version(void) { return "0.1.0"; }

const char* svnvs_status_name(svnvs_status status) {
  switch (status) {
    case SVNVS_OK: return "ok";
    case SVNVS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SVNVS_ERR_IO: return "i/o error";
    case SVNVS_ERR_FORMAT: return "format error";
    case SVNVS_ERR_NUMERICAL: return "numerical error";
    case SVNVS_ERR_NOT_FOUND: return "not found";
    case SVNVS_ERR_INTERNAL: return "internal error";
    case SVNVS_CHECK_FAILED: return "check failed";
  }
  return "unknown status";
}

svnvs_status svnvs_scene_open(const char* manifest_path, svnvs_scene** out) {
  return guarded([&] {
    need(manifest_path, "manifest_path");
    need(out, "out");
    *out = new svnvs_scene{svnvs::read_manifest(manifest_path)};
    return SVNVS_OK;
  });
}

svnvs_status svnvs_scene_generate(const char* layout, int views, int height, int width, uint64_t seed,
                                  const char* out_dir, svnvs_scene** out) {
  return guarded([&] {
    need(out_dir, "out_dir");
    svnvs::GenerateOptions o;
    if (layout != nullptr) o.layout = layout;
    o.views = views;
    o.height = height;
    o.width = width;
    o.seed = seed;
    o.out = out_dir;
    auto manifest = svnvs::run_generate(o);
    if (out != nullptr) {
      manifest.base_dir = o.out;
      *out = new svnvs_scene{std::move(manifest)};
    }
    return SVNVS_OK;
  });
}

svnvs_status svnvs_scene_import_colmap(const char* cameras_txt, const char* images_txt, const char* images_dir,
                                       double d_min, double d_max, const char* manifest_path,
                                       svnvs_scene** out) {
  return guarded([&] {
    need(cameras_txt, "cameras_txt");
    need(images_txt, "images_txt");
    need(images_dir, "images_dir");
    need(manifest_path, "manifest_path");
    auto manifest = svnvs::run_import_colmap({cameras_txt, images_txt, images_dir, d_min, d_max, manifest_path});
    if (out != nullptr) *out = new svnvs_scene{std::move(manifest)};
    return SVNVS_OK;
  });
}

void svnvs_scene_free(svnvs_scene* scene) { delete scene; }

int svnvs_scene_view_count(const svnvs_scene* scene) {
  return scene == nullptr ? 0 : static_cast<int>(scene->manifest.views.size());
}

const char* svnvs_scene_view_id(const svnvs_scene* scene, int index) {
  if (scene == nullptr || index < 0 || index >= svnvs_scene_view_count(scene)) return nullptr;
  return scene->manifest.views[static_cast<std::size_t>(index)].id.c_str();
}

const char* svnvs_scene_name(const svnvs_scene* scene) {
  return scene == nullptr ? nullptr : scene->manifest.name.c_str();
}

svnvs_status svnvs_scene_depth_range(const svnvs_scene* scene, double* d_min, double* d_max) {
  return guarded([&] {
    need(scene, "scene");
    if (d_min != nullptr) *d_min = scene->manifest.d_min;
    if (d_max != nullptr) *d_max = scene->manifest.d_max;
    return SVNVS_OK;
  });
}

void svnvs_train_options_init(svnvs_train_options* o) {
  if (o == nullptr) return;
  *o = svnvs_train_options{};
  o->out_root = "runs";
  o->steps = -1;
  o->seed = -1;
  o->gan = -1;
  o->crop_height = -1;
  o->crop_width = -1;
}

svnvs_status svnvs_train(const svnvs_train_options* o, svnvs_train_result* result) {
  return guarded([&] {
    need(o, "options");
    need(o->scene, "options.scene");
    svnvs::TrainOptions t;
    t.scene = o->scene;
    if (o->out_root != nullptr) t.out_root = o->out_root;
    t.config = base_config(o->config_json);
    if (o->target != nullptr) t.target = o->target;
    if (o->views > 0) t.config.views = o->views;
    if (o->planes > 0) t.config.planes = o->planes;
    if (o->d_min > 0) t.d_min = o->d_min;
    if (o->d_max > 0) t.d_max = o->d_max;
    if (o->height > 0) t.config.height = o->height;
    if (o->width > 0) t.config.width = o->width;
    if (o->crop_height >= 0) t.config.crop_height = o->crop_height;
    if (o->crop_width >= 0) t.config.crop_width = o->crop_width;
    if (o->steps >= 0) t.config.steps = o->steps;
    if (o->seed >= 0) t.config.seed = static_cast<std::uint64_t>(o->seed);
    if (o->ablation != nullptr) t.config.model.ablation = svnvs::parse_ablation(o->ablation);
    if (o->gan >= 0) t.config.gan = o->gan != 0;
    if (o->learning_rate > 0) t.config.learning_rate = o->learning_rate;
    if (o->perceptual_weights != nullptr) t.config.perceptual_weights_path = o->perceptual_weights;
    t.checkpoint_every = o->checkpoint_every;
    svnvs::TrainProgress progress;
    if (o->progress != nullptr) {
      progress = [o](std::int64_t step, const svnvs::LossReport& r) {
        const auto c = to_c(r);
        o->progress(step, &c, o->progress_user);
      };
    }
    auto outcome = svnvs::run_train(t, progress);
    if (result != nullptr) {
      copy_string(result->run_dir, sizeof result->run_dir, outcome.run_dir.string());
      copy_string(result->checkpoint, sizeof result->checkpoint, outcome.checkpoint.string());
      result->steps = outcome.steps;
      result->last = to_c(outcome.last);
    }
    return SVNVS_OK;
  });
}

svnvs_status svnvs_write_default_config(const char* path) {
  return guarded([&] {
    need(path, "path");
    std::ofstream out(path);
    svnvs::require(out.good(), std::string("cannot write ") + path, svnvs::ErrorCode::kIo);
    out << svnvs::TrainConfig{}.to_json().dump(2) << "\n";
    return SVNVS_OK;
  });
}

svnvs_status svnvs_model_load(const char* checkpoint, svnvs_model** out) {
  return guarded([&] {
    need(checkpoint, "checkpoint");
    need(out, "out");
    svnvs::require(std::filesystem::exists(checkpoint), std::string("checkpoint not found: ") + checkpoint,
                   svnvs::ErrorCode::kNotFound);
    *out = new svnvs_model(svnvs::Trainer::load(checkpoint));
    return SVNVS_OK;
  });
}

void svnvs_model_free(svnvs_model* model) { delete model; }

svnvs_status svnvs_model_shape(const svnvs_model* model, int* height, int* width, int* views, int* planes) {
  return guarded([&] {
    need(model, "model");
    const auto& c = model->trainer.config();
    if (height != nullptr) *height = c.height;
    if (width != nullptr) *width = c.width;
    if (views != nullptr) *views = c.views;
    if (planes != nullptr) *planes = c.planes;
    return SVNVS_OK;
  });
}

svnvs_status svnvs_model_render_view(svnvs_model* model, const svnvs_scene* scene, const char* target_id,
                                     float* rgb, size_t rgb_len, float* depth, size_t depth_len) {
  return guarded([&] {
    need(model, "model");
    need(scene, "scene");
    need(target_id, "target_id");
    need(rgb, "rgb");
    const auto& c = model->trainer.config();
    const std::size_t pixels = static_cast<std::size_t>(c.height) * static_cast<std::size_t>(c.width);
    svnvs::require(rgb_len >= 3 * pixels, "rgb buffer too small");
    svnvs::require(depth == nullptr || depth_len >= pixels, "depth buffer too small");
    const auto& m = scene->manifest;
    const auto planes = svnvs::sample_depth_planes(c.d_min, c.d_max, c.planes);
    std::vector<svnvs::View> sources;
    for (const auto& r : svnvs::select_source_views(m, target_id, static_cast<std::size_t>(c.views)))
      sources.push_back(svnvs::resize_view(svnvs::load_view(m, r), c.height, c.width));
    const auto& record = m.find(target_id);
    const svnvs::Camera target{svnvs::rescale_intrinsics(record.intrinsics, c.height, c.width), record.pose};
    auto result = model->trainer.render(svnvs::make_render_input(sources, target, planes));
    auto image = result.output.clamp(0.0, 1.0).to(torch::kFloat32).contiguous();
    std::memcpy(rgb, image.data_ptr<float>(), 3 * pixels * sizeof(float));
    if (depth != nullptr) {
      auto d = model->trainer.model()->depth_map(result, planes).to(torch::kFloat32).contiguous();
      std::memcpy(depth, d.data_ptr<float>(), pixels * sizeof(float));
    }
    return SVNVS_OK;
  });
}

void svnvs_synthesize_options_init(svnvs_synthesize_options* o) {
  if (o != nullptr) *o = svnvs_synthesize_options{};
}

svnvs_status svnvs_synthesize(const svnvs_synthesize_options* o, svnvs_synthesize_result* result) {
  return guarded([&] {
    need(o, "options");
    need(o->checkpoint, "options.checkpoint");
    need(o->scene, "options.scene");
    need(o->target, "options.target");
    need(o->out_dir, "options.out_dir");
    svnvs::SynthesizeOptions s{o->checkpoint, o->scene, o->target, o->out_dir, o->permute_sources != 0, o->seed};
    auto outcome = svnvs::run_synthesize(s);
    if (result != nullptr) {
      result->has_reference = outcome.has_reference ? 1 : 0;
      result->psnr = outcome.psnr;
      result->ssim = outcome.ssim;
      result->has_permutation = outcome.permutation_deviation ? 1 : 0;
      result->permutation_deviation = outcome.permutation_deviation.value_or(0.0);
      result->file_count = static_cast<int>(outcome.files.size());
    }
    return SVNVS_OK;
  });
}

svnvs_status svnvs_check(const char* module_filter, uint64_t seed, svnvs_check_row* rows, size_t capacity,
                         size_t* count) {
  return guarded([&] {
    auto results = svnvs::run_checks(module_filter == nullptr ? "" : module_filter, seed);
    if (count != nullptr) *count = results.size();
    bool ok = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
      ok = ok && results[i].passed;
      if (rows == nullptr || i >= capacity) continue;
      copy_string(rows[i].module, sizeof rows[i].module, results[i].module);
      copy_string(rows[i].name, sizeof rows[i].name, results[i].name);
      rows[i].value = results[i].value;
      rows[i].tolerance = results[i].tolerance;
      rows[i].passed = results[i].passed ? 1 : 0;
    }
    if (!ok) {
      std::string failed;
      for (const auto& r : results)
        if (!r.passed) failed += (failed.empty() ? "" : ", ") + r.module + ":" + r.name;
      last_error = "violations: " + failed;
      return SVNVS_CHECK_FAILED;
    }
    return SVNVS_OK;
  });
}

svnvs_status svnvs_debug_inject_fault(const char* module_id) {
  return guarded([&] {
    svnvs::debug::inject_fault(module_id == nullptr ? "" : module_id);
    return SVNVS_OK;
  });
}

}  // extern "C"

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

// Command-line front end. Every command forwards to the C API.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svnvs/svnvs.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

int exit_code(svnvs_status s) {
  switch (s) {
    case SVNVS_OK: return kExitOk;
    case SVNVS_ERR_INVALID_ARGUMENT:
    case SVNVS_ERR_NOT_FOUND: return kExitUsage;
    case SVNVS_ERR_NUMERICAL: return kExitDiverged;
    default: return kExitFailure;
  }
}

int report(svnvs_status s, const char* command) {
  if (s != SVNVS_OK)
    std::cerr << "svnvs " << command << ": " << svnvs_status_name(s) << ": " << svnvs_last_error() << "\n";
  return exit_code(s);
}

struct Resolution {
  int height = -1;
  int width = -1;
};

std::string parse_resolution(const std::string& text, Resolution& out) {
  const auto x = text.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    out.height = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string w = text.substr(x + 1);
    out.width = std::stoi(w, &used);
    if (used != w.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    return "expected HxW, got '" + text + "'";
  }
  if (out.height <= 0 || out.width <= 0) return "resolution must be positive";
  return {};
}

void on_progress(int64_t step, const svnvs_loss_report* r, void* user) {
  const int every = *static_cast<int*>(user);
  if (every <= 0 || step % every != 0) return;
  std::printf("step %lld  l1 %.5f  perceptual %.5f  adv_g %.4f  adv_d %.4f  psnr %.2f\n",
              static_cast<long long>(step), r->l1, r->perceptual, r->adversarial_g, r->adversarial_d, r->psnr);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised novel view synthesis: training, synthesis and diagnostics."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(svnvs_version()));

  // train
  auto* train = app.add_subcommand("train", "Train a model on a scene manifest.");
  std::string scene, out_root = "runs", config_path, target, ablation = "none", gan = "on", res, weights,
      crop = "full";
  int views = 6, planes = 48, steps = 1000, checkpoint_every = 0, log_every = 50;
  int64_t seed = 0;
  double dmin = 0, dmax = 0, lr = 0;
  train->add_option("--scene", scene, "Scene manifest (JSON)")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out_root, "Root directory for run folders")->capture_default_str();
  train->add_option("--config", config_path, "JSON file overriding training defaults (see default-config)")
      ->check(CLI::ExistingFile);
  train->add_option("--target", target, "Train on this view only (default: leave-one-out over all views)");
  train->add_option("--views", views, "Source views per target")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--planes", planes, "Depth planes")->capture_default_str()->check(CLI::Range(2, 1024));
  train->add_option("--dmin", dmin, "Nearest depth plane (default: manifest range)")->check(CLI::PositiveNumber);
  train->add_option("--dmax", dmax, "Farthest depth plane (default: manifest range)")->check(CLI::PositiveNumber);
  train->add_option("--res", res, "Working resolution HxW (default 256x448)");
  train->add_option("--crop", crop, "Random training window HxW per step, or 'full'")->capture_default_str();
  train->add_option("--steps", steps, "Optimizer steps; 0 writes the initial checkpoint")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train->add_option("--seed", seed, "Seed; SVNVS_SEED overrides it when set")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train->add_option("--ablation", ablation, "Model variant")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "no_visibility", "no_ray_casting", "over_compositing", "no_warped_sources",
                             "no_refinement"}));
  train->add_option("--gan", gan, "Adversarial loss")->capture_default_str()->check(CLI::IsMember({"on", "off"}));
  train->add_option("--lr", lr, "Learning rate (default 2e-4)")->check(CLI::PositiveNumber);
  train->add_option("--perceptual-weights", weights, "VGG-19 weight archive (default: random conv pyramid)")
      ->check(CLI::ExistingFile);
  train->add_option("--checkpoint-every", checkpoint_every, "Intermediate checkpoint interval (0: final only)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train->add_option("--log-every", log_every, "Progress print interval (0: silent)")->capture_default_str();

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "Render a target view from a trained checkpoint.");
  std::string checkpoint, synth_scene, synth_target, synth_out;
  bool permute = false;
  int64_t synth_seed = 0;
  synth->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  synth->add_option("--scene", synth_scene, "Scene manifest (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--target", synth_target, "View id (leave-one-out) or pose file")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_flag("--permute-sources", permute, "Re-render with a seeded source shuffle and report the deviation");
  synth->add_option("--seed", synth_seed, "Shuffle seed; SVNVS_SEED overrides it when set")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  // check
  auto* check = app.add_subcommand("check", "Run gradient checks and invariant suites.");
  std::string module_filter, fault;
  int64_t check_seed = 0;
  check->add_option("--module", module_filter, "Only modules whose id starts with this prefix");
  check->add_option("--seed", check_seed, "Fixture seed; SVNVS_SEED overrides it when set")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  check->add_option("--inject-fault", fault, "Self-test: corrupt the named operation (rendering.aggregate)");

  // generate
  auto* gen = app.add_subcommand("generate", "Render a synthetic scene with ground truth.");
  std::string layout = "two_plane", gen_out, gen_res = "96x128";
  int gen_views = 4;
  int64_t gen_seed = 7;
  gen->add_option("--layout", layout, "Scene layout")->capture_default_str()->check(CLI::IsMember({"two_plane"}));
  gen->add_option("--views", gen_views, "Number of views")->capture_default_str()->check(CLI::Range(2, 64));
  gen->add_option("--res", gen_res, "Resolution HxW")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Texture seed; SVNVS_SEED overrides it when set")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--out", gen_out, "Output directory")->required();

  // import-colmap
  auto* colmap = app.add_subcommand("import-colmap", "Convert a COLMAP text model to a scene manifest.");
  std::string cameras_txt, images_txt, images_dir, manifest_out;
  double col_dmin = 0, col_dmax = 0;
  colmap->add_option("--cameras", cameras_txt, "cameras.txt")->required()->check(CLI::ExistingFile);
  colmap->add_option("--images", images_txt, "images.txt")->required()->check(CLI::ExistingFile);
  colmap->add_option("--images-dir", images_dir, "Directory holding the images")
      ->required()
      ->check(CLI::ExistingDirectory);
  colmap->add_option("--dmin", col_dmin, "Nearest scene depth")->required()->check(CLI::PositiveNumber);
  colmap->add_option("--dmax", col_dmax, "Farthest scene depth")->required()->check(CLI::PositiveNumber);
  colmap->add_option("--out", manifest_out, "Manifest path to write")->required();

  // default-config
  auto* defaults = app.add_subcommand("default-config", "Write the default training configuration as JSON.");
  std::string defaults_out;
  defaults->add_option("--out", defaults_out, "Destination file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    std::cerr << (parsed.empty() ? app.help() : parsed.back()->help());
    return kExitUsage;
  }

  if (const char* env = std::getenv("SVNVS_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (*end != '\0' || v < 0) {
      std::cerr << "SVNVS_SEED must be a non-negative integer, got '" << env << "'\n";
      return kExitUsage;
    }
    seed = synth_seed = check_seed = gen_seed = v;
  }

  if (*train) {
    svnvs_train_options o;
    svnvs_train_options_init(&o);
    Resolution r;
    if (!res.empty()) {
      if (auto err = parse_resolution(res, r); !err.empty()) {
        std::cerr << "--res: " << err << "\n" << train->help();
        return kExitUsage;
      }
    } else {
      r = {256, 448};
    }
    Resolution window{0, 0};
    if (crop != "full") {
      if (auto err = parse_resolution(crop, window); !err.empty()) {
        std::cerr << "--crop: " << err << "\n" << train->help();
        return kExitUsage;
      }
    }
    o.scene = scene.c_str();
    o.out_root = out_root.c_str();
    o.config_json = config_path.empty() ? nullptr : config_path.c_str();
    o.target = target.empty() ? nullptr : target.c_str();
    // A config file supplies the base; explicit flags override it.
    const bool has_config = !config_path.empty();
    auto given = [&](const char* flag) { return !has_config || train->count(flag) > 0; };
    o.views = given("--views") ? views : 0;
    o.planes = given("--planes") ? planes : 0;
    o.d_min = dmin;
    o.d_max = dmax;
    o.height = given("--res") ? r.height : 0;
    o.width = given("--res") ? r.width : 0;
    o.crop_height = given("--crop") ? window.height : -1;
    o.crop_width = given("--crop") ? window.width : -1;
    o.steps = given("--steps") ? steps : -1;
    o.seed = given("--seed") || std::getenv("SVNVS_SEED") ? seed : -1;
    o.ablation = given("--ablation") ? ablation.c_str() : nullptr;
    o.gan = given("--gan") ? (gan == "on" ? 1 : 0) : -1;
    o.learning_rate = lr;
    o.perceptual_weights = weights.empty() ? nullptr : weights.c_str();
    o.checkpoint_every = checkpoint_every;
    o.progress = on_progress;
    o.progress_user = &log_every;
    svnvs_train_result result{};
    const auto s = svnvs_train(&o, &result);
    if (s == SVNVS_OK) {
      std::printf("run %s\ncheckpoint %s\nsteps %lld\n", result.run_dir, result.checkpoint,
                  static_cast<long long>(result.steps));
    }
    return report(s, "train");
  }

  if (*synth) {
    svnvs_synthesize_options o;
    svnvs_synthesize_options_init(&o);
    o.checkpoint = checkpoint.c_str();
    o.scene = synth_scene.c_str();
    o.target = synth_target.c_str();
    o.out_dir = synth_out.c_str();
    o.permute_sources = permute ? 1 : 0;
    o.seed = static_cast<uint64_t>(synth_seed);
    svnvs_synthesize_result r{};
    const auto s = svnvs_synthesize(&o, &r);
    if (s == SVNVS_OK) {
      std::printf("wrote %d files to %s\n", r.file_count, synth_out.c_str());
      if (r.has_reference) std::printf("target %s  psnr %.4f  ssim %.4f\n", synth_target.c_str(), r.psnr, r.ssim);
      if (r.has_permutation) std::printf("permutation max_abs_deviation %.3g\n", r.permutation_deviation);
    }
    return report(s, "synthesize");
  }

  if (*check) {
    if (!fault.empty()) {
      if (auto s = svnvs_debug_inject_fault(fault.c_str()); s != SVNVS_OK) return report(s, "check");
    }
    size_t count = 0;
    auto s = svnvs_check(module_filter.c_str(), static_cast<uint64_t>(check_seed), nullptr, 0, &count);
    if (s != SVNVS_OK && s != SVNVS_CHECK_FAILED) return report(s, "check");
    std::vector<svnvs_check_row> rows(count);
    s = svnvs_check(module_filter.c_str(), static_cast<uint64_t>(check_seed), rows.data(), rows.size(), &count);
    if (s != SVNVS_OK && s != SVNVS_CHECK_FAILED) return report(s, "check");
    std::printf("%-34s %-28s %12s %10s  %s\n", "module", "check", "max error", "tolerance", "status");
    std::map<std::string, bool> module_ok;
    for (const auto& row : rows) {
      std::printf("%-34s %-28s %12.3e %10.1e  %s\n", row.module, row.name, row.value, row.tolerance,
                  row.passed ? "ok" : "FAIL");
      auto [it, inserted] = module_ok.emplace(row.module, true);
      it->second = it->second && row.passed;
    }
    for (const auto& [module, ok] : module_ok)
      if (!ok) std::printf("violation in %s\n", module.c_str());
    std::printf("%zu checks, %s\n", rows.size(), s == SVNVS_OK ? "all passed" : "FAILED");
    return s == SVNVS_OK ? kExitOk : kExitFailure;
  }

  if (*gen) {
    Resolution r;
    if (auto err = parse_resolution(gen_res, r); !err.empty()) {
      std::cerr << "--res: " << err << "\n" << gen->help();
      return kExitUsage;
    }
    svnvs_scene* sc = nullptr;
    const auto s = svnvs_scene_generate(layout.c_str(), gen_views, r.height, r.width,
                                        static_cast<uint64_t>(gen_seed), gen_out.c_str(), &sc);
    if (s == SVNVS_OK) {
      std::printf("wrote %d views to %s/manifest.json\n", svnvs_scene_view_count(sc), gen_out.c_str());
      svnvs_scene_free(sc);
    }
    return report(s, "generate");
  }

  if (*colmap) {
    svnvs_scene* sc = nullptr;
    const auto s = svnvs_scene_import_colmap(cameras_txt.c_str(), images_txt.c_str(), images_dir.c_str(), col_dmin,
                                             col_dmax, manifest_out.c_str(), &sc);
    if (s == SVNVS_OK) {
      std::printf("wrote %d views to %s\n", svnvs_scene_view_count(sc), manifest_out.c_str());
      svnvs_scene_free(sc);
    }
    return report(s, "import-colmap");
  }

  if (*defaults) return report(svnvs_write_default_config(defaults_out.c_str()), "default-config");
  return kExitUsage;
}

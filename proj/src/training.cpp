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

#include "svnvs/training.hpp"

#include <cmath>

#include "svnvs/archive.hpp"
#include "svnvs/error.hpp"
#include "svnvs/metrics.hpp"

namespace svnvs {

namespace F = torch::nn::functional;
using nlohmann::json;

json TrainConfig::to_json() const {
  json j;
  j["views"] = views;
  j["planes"] = planes;
  j["d_min"] = d_min;
  j["d_max"] = d_max;
  j["height"] = height;
  j["width"] = width;
  j["crop_height"] = crop_height;
  j["crop_width"] = crop_width;
  j["learning_rate"] = learning_rate;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["steps"] = steps;
  j["seed"] = seed;
  j["gan"] = gan;
  j["adversarial_weight"] = adversarial_weight;
  j["perceptual_weights_path"] = perceptual_weights_path;
  j["perceptual_layer_weights"] = perceptual_layer_weights;
  j["ablation"] = std::string(to_string(model.ablation));
  j["feature_stem_channels"] = model.features.stem_channels;
  j["feature_branch_channels"] = model.features.branch_channels;
  j["sve_channels"] = {model.sve.channels_full, model.sve.channels_low};
  j["src_hidden"] = model.src_hidden;
  j["refine_channels"] = model.refine.channels;
  return j;
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  try {
    c.views = j.at("views");
    c.planes = j.at("planes");
    c.d_min = j.at("d_min");
    c.d_max = j.at("d_max");
    c.height = j.at("height");
    c.width = j.at("width");
    c.crop_height = j.value("crop_height", 0);
    c.crop_width = j.value("crop_width", 0);
    c.learning_rate = j.at("learning_rate");
    c.beta1 = j.at("beta1");
    c.beta2 = j.at("beta2");
    c.steps = j.at("steps");
    c.seed = j.at("seed");
    c.gan = j.at("gan");
    c.adversarial_weight = j.at("adversarial_weight");
    c.perceptual_weights_path = j.at("perceptual_weights_path");
    c.perceptual_layer_weights = j.at("perceptual_layer_weights").get<std::vector<double>>();
    c.model.ablation = parse_ablation(j.at("ablation").get<std::string>());
    c.model.features.stem_channels = j.at("feature_stem_channels");
    c.model.features.branch_channels = j.at("feature_branch_channels");
    const auto sve = j.at("sve_channels").get<std::array<int, 2>>();
    c.model.sve = {sve[0], sve[1]};
    c.model.src_hidden = j.at("src_hidden");
    c.model.refine.channels = j.at("refine_channels").get<std::array<int, 3>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("train config: ") + e.what());
  }
  return c;
}

std::uint64_t TrainConfig::hash() const {
  auto j = to_json();
  j.erase("steps");
  return fnv1a(j.dump());
}

CameraIntrinsics rescale_intrinsics(const CameraIntrinsics& k, int height, int width) {
  require(height > 0 && width > 0, "rescale_intrinsics: size must be positive");
  CameraIntrinsics out = k;
  const double sx = static_cast<double>(width) / k.width;
  const double sy = static_cast<double>(height) / k.height;
  out.fx = k.fx * sx;
  out.fy = k.fy * sy;
  out.cx = (k.cx + 0.5) * sx - 0.5;
  out.cy = (k.cy + 0.5) * sy - 0.5;
  out.width = width;
  out.height = height;
  return out;
}

View resize_view(const View& view, int height, int width) {
  const auto& k = view.intrinsics;
  if (k.height == height && k.width == width) return view;
  View out = view;
  out.intrinsics = rescale_intrinsics(k, height, width);
  out.image = F::interpolate(view.image.unsqueeze(0),
                             F::InterpolateFuncOptions()
                                 .size(std::vector<int64_t>{height, width})
                                 .mode(torch::kBilinear)
                                 .align_corners(false)
                                 .antialias(true))
                  .squeeze(0)
                  .clamp(0.0, 1.0);
  return out;
}

CroppedSample crop_target(const RenderInput& input, const torch::Tensor& target, int top, int left, int height,
                          int width) {
  const auto& k = input.target.intrinsics;
  require(height > 0 && width > 0 && top >= 0 && left >= 0 && top + height <= k.height &&
              left + width <= k.width,
          "crop_target: window outside the target frame");
  require(target.dim() == 3 && target.size(1) == k.height && target.size(2) == k.width,
          "crop_target: target image does not match the target camera");
  CroppedSample out{input, target.slice(1, top, top + height).slice(2, left, left + width).contiguous()};
  auto& ck = out.input.target.intrinsics;
  ck.cx -= left;
  ck.cy -= top;
  ck.height = height;
  ck.width = width;
  return out;
}

RenderInput make_render_input(const std::vector<View>& sources, const Camera& target,
                              const DepthPlanes& planes) {
  require(!sources.empty(), "make_render_input: no source views");
  RenderInput in;
  std::vector<torch::Tensor> images;
  for (const auto& v : sources) {
    images.push_back(v.image);
    in.source_cameras.push_back({v.intrinsics, v.pose});
  }
  in.source_images = torch::stack(images);
  in.target = target;
  in.planes = planes;
  return in;
}

namespace {

std::unique_ptr<torch::optim::Adam> make_adam(std::vector<torch::Tensor> params, const TrainConfig& c) {
  return std::make_unique<torch::optim::Adam>(
      std::move(params),
      torch::optim::AdamOptions(c.learning_rate).betas({c.beta1, c.beta2}).eps(1e-8));
}

void save_adam(const torch::optim::Adam& opt, const std::string& prefix,
               const std::vector<std::pair<std::string, torch::Tensor>>& params, TensorArchive& out) {
  auto& state = const_cast<torch::optim::Adam&>(opt).state();
  for (const auto& [name, p] : params) {
    auto it = state.find(p.unsafeGetTensorImpl());
    if (it == state.end()) continue;
    const auto& s = static_cast<const torch::optim::AdamParamState&>(*it->second);
    out.tensors.emplace_back(prefix + name + "/step", torch::tensor(s.step(), torch::kInt64));
    out.tensors.emplace_back(prefix + name + "/exp_avg", s.exp_avg());
    out.tensors.emplace_back(prefix + name + "/exp_avg_sq", s.exp_avg_sq());
  }
}

void load_adam(torch::optim::Adam& opt, const std::string& prefix,
               const std::vector<std::pair<std::string, torch::Tensor>>& params, const TensorArchive& in) {
  auto& state = opt.state();
  for (const auto& [name, p] : params) {
    const auto* step = in.find(prefix + name + "/step");
    if (!step) continue;
    const auto* m = in.find(prefix + name + "/exp_avg");
    const auto* v = in.find(prefix + name + "/exp_avg_sq");
    require(m && v, "checkpoint: incomplete optimizer state for " + name, ErrorCode::kFormat);
    auto s = std::make_unique<torch::optim::AdamParamState>();
    s->step(step->item<int64_t>());
    s->exp_avg(m->clone());
    s->exp_avg_sq(v->clone());
    state[p.unsafeGetTensorImpl()] = std::move(s);
  }
}

std::vector<std::pair<std::string, torch::Tensor>> named_state(const torch::nn::Module& m) {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  for (const auto& item : m.named_parameters()) out.emplace_back(item.key(), item.value());
  for (const auto& item : m.named_buffers()) out.emplace_back(item.key(), item.value());
  return out;
}

}  // namespace

Trainer::Trainer(const TrainConfig& config) : config_(config) {
  require(config.views >= 2, "train config: need at least two source views");
  require(config.views <= 8, "train config: at most eight source views are supported");
  require(config.planes >= 2, "train config: need at least two depth planes");
  require(config.height >= 8 && config.width >= 8, "train config: resolution too small");
  require((config.crop_height == 0 && config.crop_width == 0) ||
              (config.crop_height >= 8 && config.crop_width >= 8 && config.crop_height <= config.height &&
               config.crop_width <= config.width),
          "train config: crop window must be 0x0 or between 8x8 and the resolution");
  require(config.learning_rate >= 0, "train config: negative learning rate");
  torch::manual_seed(config.seed);
  model_ = SvnvsModel(config.model);
  discriminator_ = PatchDiscriminator();
  generator_opt_ = make_adam(model_->parameters(), config);
  discriminator_opt_ = make_adam(discriminator_->parameters(), config);
  if (config.perceptual_weights_path.empty())
    perceptual_ = std::make_shared<RandomConvPyramid>();
  else
    perceptual_ = std::make_shared<Vgg19Features>(config.perceptual_weights_path);
}

void Trainer::set_learning_rate(double lr) {
  require(lr >= 0, "learning rate must be non-negative");
  config_.learning_rate = lr;
  for (auto* opt : {generator_opt_.get(), discriminator_opt_.get()})
    for (auto& group : opt->param_groups())
      static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
}

LossReport Trainer::step(const RenderInput& input, const torch::Tensor& target) {
  model_->train();
  auto result = model_->forward(input);
  const auto& output = result.output;
  require(output.sizes() == target.sizes(), "train step: target image size does not match the render");

  auto pixel = pixel_l1(output, target);
  auto full = perceptual_loss(output, target, *perceptual_, config_.perceptual_layer_weights);
  auto total = full;
  torch::Tensor adv_g;
  if (config_.gan) {
    adv_g = lsgan_generator_loss(discriminator_->forward(output));
    total = total + config_.adversarial_weight * adv_g;
  }
  if (!torch::isfinite(total).item<bool>()) {
    const auto name = result.first_non_finite().value_or("loss");
    fail(ErrorCode::kNumerical, "training diverged at step " + std::to_string(steps_done_) +
                                    ": first non-finite tensor is " + name);
  }

  generator_opt_->zero_grad();
  total.backward();
  for (const auto& item : model_->named_parameters()) {
    const auto& g = item.value().grad();
    if (g.defined() && !torch::isfinite(g).all().item<bool>())
      fail(ErrorCode::kNumerical, "training diverged at step " + std::to_string(steps_done_) +
                                      ": non-finite gradient for " + item.key());
  }
  generator_opt_->step();

  LossReport report;
  report.l1 = pixel.item<double>();
  report.perceptual = full.item<double>() - report.l1;
  if (config_.gan) {
    discriminator_opt_->zero_grad();
    auto d_loss = lsgan_discriminator_loss(discriminator_->forward(target),
                                           discriminator_->forward(output.detach()));
    d_loss.backward();
    discriminator_opt_->step();
    report.adversarial_g = adv_g.item<double>();
    report.adversarial_d = d_loss.item<double>();
  }
  report.total = total.item<double>();
  report.psnr = psnr(output.detach().clamp(0.0, 1.0), target);
  ++steps_done_;
  return report;
}

ForwardResult Trainer::render(const RenderInput& input) {
  torch::NoGradGuard no_grad;
  model_->eval();
  return model_->forward(input);
}

void Trainer::save(const std::filesystem::path& path) const {
  TensorArchive archive;
  archive.config_hash = config_.hash();
  json meta;
  meta["config"] = config_.to_json();
  meta["steps_done"] = steps_done_;
  archive.metadata = meta.dump();
  const auto model_state = named_state(*model_);
  const auto disc_state = named_state(*discriminator_);
  for (const auto& [name, t] : model_state) archive.tensors.emplace_back("model/" + name, t);
  for (const auto& [name, t] : disc_state) archive.tensors.emplace_back("discriminator/" + name, t);
  save_adam(*generator_opt_, "adam_model/", model_state, archive);
  save_adam(*discriminator_opt_, "adam_discriminator/", disc_state, archive);
  write_archive(path, archive);
}

Trainer Trainer::load(const std::filesystem::path& path) {
  const auto archive = read_archive(path);
  json meta;
  try {
    meta = json::parse(archive.metadata);
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, "checkpoint " + path.string() + ": bad metadata");
  }
  Trainer t(TrainConfig::from_json(meta.at("config")));
  require(t.config_.hash() == archive.config_hash,
          "checkpoint " + path.string() + ": config hash mismatch", ErrorCode::kFormat);
  torch::NoGradGuard no_grad;
  auto restore = [&](const std::string& prefix, const torch::nn::Module& m) {
    for (auto& [name, dst] : named_state(m)) {
      const auto* src = archive.find(prefix + name);
      require(src != nullptr, "checkpoint: missing tensor " + prefix + name, ErrorCode::kFormat);
      require(src->sizes() == dst.sizes(), "checkpoint: shape mismatch for " + prefix + name,
              ErrorCode::kFormat);
      dst.copy_(*src);
    }
  };
  restore("model/", *t.model_);
  restore("discriminator/", *t.discriminator_);
  load_adam(*t.generator_opt_, "adam_model/", named_state(*t.model_), archive);
  load_adam(*t.discriminator_opt_, "adam_discriminator/", named_state(*t.discriminator_), archive);
  t.steps_done_ = meta.at("steps_done").get<std::int64_t>();
  return t;
}

}  // namespace svnvs

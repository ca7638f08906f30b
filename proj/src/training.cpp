/* Copyright 2026 The sketchbetween Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "sketchbetween/training.hpp"

#include <chrono>
#include <cmath>
#include <regex>

#include "sketchbetween/checkpoint.hpp"
#include "sketchbetween/config_io.hpp"
#include "sketchbetween/error.hpp"
#include "sketchbetween/media_io.hpp"
#include "sketchbetween/tensor_convert.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sketchbetween {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (lookahead_k < 1) throw ConfigError("train.lookahead_k must be >= 1");
  if (!(lookahead_alpha > 0.0 && lookahead_alpha <= 1.0)) {
    throw ConfigError("train.lookahead_alpha must lie in (0, 1]");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("train.adam_beta1/adam_beta2 must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("train.adam_eps must be > 0");
  if (!(commitment_beta >= 0.0)) {
    throw ConfigError("train.commitment_beta must be >= 0");
  }
  augment.validate();
}

torch::Tensor reconstruction_loss(const torch::Tensor& pred,
                                  const torch::Tensor& target,
                                  const MetricConfig& cfg) {
  if (pred.sizes() != target.sizes()) {
    throw ShapeError("reconstruction_loss: prediction and target shapes differ");
  }
  auto p = pred.dim() == 4 ? pred.unsqueeze(0) : pred;
  auto t = target.dim() == 4 ? target.unsqueeze(0) : target;
  if (p.dim() != 5 || p.size(1) != 3) {
    throw ShapeError("reconstruction_loss: expected [B, 3, T, H, W]");
  }
  // [B, 3, T, H, W] -> [B*T, 3, H, W]
  auto to_images = [](const torch::Tensor& x) {
    return x.permute({0, 2, 1, 3, 4}).reshape({-1, 3, x.size(3), x.size(4)});
  };
  return 1.0 - ssim_per_image(to_images(p), to_images(t), cfg).mean();
}

torch::Tensor total_loss(const torch::Tensor& reconstruction,
                         const torch::Tensor& codebook_loss,
                         const torch::Tensor& commitment_loss, double beta) {
  return reconstruction + codebook_loss + beta * commitment_loss;
}

LookaheadAdam::LookaheadAdam(
    std::vector<std::pair<std::string, torch::Tensor>> params,
    const TrainConfig& cfg)
    : lr_(cfg.learning_rate),
      beta1_(cfg.adam_beta1),
      beta2_(cfg.adam_beta2),
      eps_(cfg.adam_eps),
      alpha_(cfg.lookahead_alpha),
      k_(cfg.lookahead_k) {
  torch::NoGradGuard no_grad;
  for (auto& [name, p] : params) {
    slots_.push_back({name, p, torch::zeros_like(p), torch::zeros_like(p),
                      p.detach().clone()});
  }
}

void LookaheadAdam::zero_grad() {
  for (auto& s : slots_) {
    if (s.param.grad().defined()) s.param.mutable_grad().zero_();
  }
}

void LookaheadAdam::step() {
  torch::NoGradGuard no_grad;
  ++steps_;
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (auto& s : slots_) {
    const auto& g = s.param.grad();
    if (!g.defined()) continue;
    s.exp_avg.mul_(beta1_).add_(g, 1.0 - beta1_);
    s.exp_avg_sq.mul_(beta2_).addcmul_(g, g, 1.0 - beta2_);
    auto denom = (s.exp_avg_sq.sqrt() / std::sqrt(bias2)).add_(eps_);
    s.param.addcdiv_(s.exp_avg, denom, -lr_ / bias1);
  }
  if (steps_ % k_ == 0) {
    for (auto& s : slots_) {
      s.slow.add_(s.param - s.slow, alpha_);
      s.param.copy_(s.slow);
    }
  }
}

std::map<std::string, torch::Tensor> LookaheadAdam::export_slots() const {
  std::map<std::string, torch::Tensor> out;
  for (const auto& s : slots_) {
    out["adam_m/" + s.name] = s.exp_avg.detach().clone();
    out["adam_v/" + s.name] = s.exp_avg_sq.detach().clone();
    out["slow/" + s.name] = s.slow.detach().clone();
  }
  out["steps"] = torch::tensor({steps_}, torch::kInt64);
  return out;
}

void LookaheadAdam::import_slots(
    const std::map<std::string, torch::Tensor>& slots) {
  torch::NoGradGuard no_grad;
  auto fetch = [&](const std::string& key, const torch::Tensor& like) {
    auto it = slots.find(key);
    if (it == slots.end()) {
      throw CheckpointError("optimizer slot '" + key + "' missing");
    }
    if (it->second.sizes() != like.sizes()) {
      throw CheckpointError("optimizer slot '" + key + "' has wrong shape");
    }
    return it->second;
  };
  for (auto& s : slots_) {
    s.exp_avg.copy_(fetch("adam_m/" + s.name, s.exp_avg));
    s.exp_avg_sq.copy_(fetch("adam_v/" + s.name, s.exp_avg_sq));
    s.slow.copy_(fetch("slow/" + s.name, s.slow));
  }
  auto it = slots.find("steps");
  if (it == slots.end()) throw CheckpointError("optimizer slot 'steps' missing");
  steps_ = it->second.item<std::int64_t>();
}

StepStats train_step(ModelState& state, LookaheadAdam& optimizer,
                     const torch::Tensor& inputs, const torch::Tensor& targets,
                     const TrainConfig& cfg,
                     const std::vector<std::string>& clip_ids) {
  state.net->train();
  optimizer.zero_grad();
  auto out = forward(state, inputs);
  auto rec = reconstruction_loss(out.reconstruction, targets);
  auto loss = total_loss(rec, out.vq.codebook_loss, out.vq.commitment_loss,
                         cfg.commitment_beta);

  StepStats stats;
  stats.reconstruction = rec.item<double>();
  stats.codebook = out.vq.codebook_loss.item<double>();
  stats.commitment = out.vq.commitment_loss.item<double>();
  stats.total = loss.item<double>();
  if (!std::isfinite(stats.total)) {
    std::string ids;
    for (const auto& id : clip_ids) ids += (ids.empty() ? "" : ", ") + id;
    throw TrainingError("non-finite loss at step " +
                        std::to_string(state.step + 1) + " (reconstruction " +
                        std::to_string(stats.reconstruction) + ", codebook " +
                        std::to_string(stats.codebook) + ", commitment " +
                        std::to_string(stats.commitment) + "); clips: " + ids);
  }
  loss.backward();
  optimizer.step();
  ++state.step;
  stats.code_usage = torch::bincount(out.vq.indices.flatten(), {},
                                     state.config.codebook_size);
  return stats;
}

json TrainHistory::to_json() const {
  json records = json::array();
  for (const auto& r : epochs) {
    records.push_back({{"epoch", r.epoch},
                       {"steps", r.steps},
                       {"reconstruction_loss", r.reconstruction_loss},
                       {"codebook_loss", r.codebook_loss},
                       {"commitment_loss", r.commitment_loss},
                       {"total_loss", r.total_loss},
                       {"dead_codes", r.dead_codes},
                       {"wall_seconds", r.wall_seconds}});
  }
  return {{"format", "sketchbetween-history-1"},
          {"variant", std::string(to_string(variant))},
          {"epochs", records}};
}

TrainHistory TrainHistory::from_json(const json& j) {
  TrainHistory h;
  h.variant = parse_variant(j.at("variant").get<std::string>());
  for (const auto& r : j.at("epochs")) {
    EpochRecord e;
    e.epoch = r.at("epoch");
    e.steps = r.at("steps");
    e.reconstruction_loss = r.at("reconstruction_loss");
    e.codebook_loss = r.at("codebook_loss");
    e.commitment_loss = r.at("commitment_loss");
    e.total_loss = r.at("total_loss");
    e.dead_codes = r.at("dead_codes");
    e.wall_seconds = r.at("wall_seconds");
    h.epochs.push_back(e);
  }
  return h;
}

fs::path checkpoint_path(const fs::path& work_dir, int epoch) {
  return work_dir / ("ckpt_epoch_" + std::to_string(epoch) + ".tar");
}

int latest_checkpoint_epoch(const fs::path& work_dir) {
  std::error_code ec;
  if (!fs::is_directory(work_dir, ec)) return 0;
  static const std::regex pattern(R"(ckpt_epoch_(\d+)\.tar)");
  int best = 0;
  for (const auto& e : fs::directory_iterator(work_dir)) {
    std::smatch m;
    const std::string name = e.path().filename().string();
    if (std::regex_match(name, m, pattern)) {
      best = std::max(best, std::stoi(m[1].str()));
    }
  }
  return best;
}

TrainResult train(const CorpusIndex& corpus, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, Variant variant,
                  const TrainOptions& options) {
  model_cfg.validate();
  train_cfg.validate();
  if (model_cfg.window_length != corpus.window_length) {
    throw ConfigError("model window length does not match corpus window length");
  }
  const auto clips = corpus.split(Split::kTrain);
  if (clips.empty()) throw ConfigError("train: no usable training clips");

  TrainResult result;
  result.history.variant = variant;
  int start_epoch = 0;
  const bool checkpointing = !options.work_dir.empty();

  const json metadata = {{"train_config", to_json(train_cfg)},
                         {"variant", std::string(to_string(variant))}};

  if (options.resume && checkpointing) {
    start_epoch = latest_checkpoint_epoch(options.work_dir);
  }
  if (start_epoch > 0) {
    result.state = load_checkpoint(checkpoint_path(options.work_dir, start_epoch));
    if (!(result.state.config == model_cfg)) {
      throw ConfigError("resume: checkpoint model config differs from the requested one");
    }
    const fs::path hist = options.work_dir / "history.json";
    if (fs::exists(hist)) {
      result.history = TrainHistory::from_json(read_json_file(hist));
      if (static_cast<int>(result.history.epochs.size()) > start_epoch) {
        result.history.epochs.resize(start_epoch);
      }
    }
  } else {
    result.state = init_model(model_cfg);
  }
  ModelState& state = result.state;

  LookaheadAdam optimizer(
      [&] {
        std::vector<std::pair<std::string, torch::Tensor>> params;
        for (const auto& item : state.net->named_parameters()) {
          params.emplace_back(item.key(), item.value());
        }
        return params;
      }(),
      train_cfg);
  if (start_epoch > 0) optimizer.import_slots(state.optimizer_slots);

  for (int epoch = start_epoch; epoch < train_cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng = make_rng(train_cfg.seed, static_cast<std::uint64_t>(epoch));
    EpochRecord record;
    record.epoch = epoch + 1;
    auto usage = torch::zeros({model_cfg.codebook_size}, torch::kInt64);

    for (const auto& group : plan_batches(clips.size(), train_cfg.batch_size, rng)) {
      std::vector<Example> examples;
      std::vector<std::string> ids;
      for (std::size_t i : group) {
        const AnimationClip clip = decode_animation(clips[i].path);
        examples.push_back(prepare_training_example(
            clip, model_cfg.window_length, variant, train_cfg.augment,
            train_cfg.sketch, rng));
        ids.push_back(clips[i].source_id);
      }
      auto [inputs, targets] = stack_examples(examples);
      const StepStats stats =
          train_step(state, optimizer, inputs, targets, train_cfg, ids);
      usage += stats.code_usage;
      record.reconstruction_loss += stats.reconstruction;
      record.codebook_loss += stats.codebook;
      record.commitment_loss += stats.commitment;
      record.total_loss += stats.total;
      ++record.steps;
      if (options.on_step) options.on_step({epoch + 1, state.step, &stats});
    }
    const double steps = static_cast<double>(record.steps);
    record.reconstruction_loss /= steps;
    record.codebook_loss /= steps;
    record.commitment_loss /= steps;
    record.total_loss /= steps;
    record.dead_codes = count_unused_codes(usage);
    record.wall_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
    result.history.epochs.push_back(record);

    if (checkpointing) {
      state.optimizer_slots = optimizer.export_slots();
      save_checkpoint(state, checkpoint_path(options.work_dir, epoch + 1),
                      metadata);
      write_json_file(result.history.to_json(),
                      options.work_dir / "history.json");
    }
    if (options.on_epoch) options.on_epoch(record);
  }
  state.optimizer_slots = optimizer.export_slots();
  return result;
}

}  // namespace sketchbetween

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

#ifndef SKETCHBETWEEN_TRAINING_HPP_
#define SKETCHBETWEEN_TRAINING_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "sketchbetween/dataset.hpp"
#include "sketchbetween/metrics.hpp"
#include "sketchbetween/sketchgen.hpp"
#include "sketchbetween/vqvae.hpp"

namespace sketchbetween {

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 0.001;
  int batch_size = 16;
  int lookahead_k = 5;
  double lookahead_alpha = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-7;
  double commitment_beta = 0.25;
  std::uint64_t seed = 0;
  AugmentParams augment{};
  SketchParams sketch{};

  void validate() const;
};

// 1 - mean SSIM over every frame of every sample. pred and target are
// [B, 3, T, H, W] (or [3, T, H, W]) with values in [0, 1].
torch::Tensor reconstruction_loss(const torch::Tensor& pred,
                                  const torch::Tensor& target,
                                  const MetricConfig& cfg = {});

// reconstruction + codebook + beta * commitment
torch::Tensor total_loss(const torch::Tensor& reconstruction,
                         const torch::Tensor& codebook_loss,
                         const torch::Tensor& commitment_loss, double beta);

// Adam on the fast weights; every k steps the slow weights move a fraction
// alpha toward the fast ones and the fast weights are reset to them.
class LookaheadAdam {
 public:
  LookaheadAdam(std::vector<std::pair<std::string, torch::Tensor>> params,
                const TrainConfig& cfg);

  void zero_grad();
  void step();
  std::int64_t steps() const { return steps_; }

  std::map<std::string, torch::Tensor> export_slots() const;
  // Throws CheckpointError when a slot is missing or mis-shaped.
  void import_slots(const std::map<std::string, torch::Tensor>& slots);

 private:
  struct Slot {
    std::string name;
    torch::Tensor param;
    torch::Tensor exp_avg;
    torch::Tensor exp_avg_sq;
    torch::Tensor slow;
  };
  std::vector<Slot> slots_;
  double lr_, beta1_, beta2_, eps_, alpha_;
  int k_;
  std::int64_t steps_ = 0;
};

struct StepStats {
  double reconstruction = 0.0;
  double codebook = 0.0;
  double commitment = 0.0;
  double total = 0.0;
  torch::Tensor code_usage;  // [C] counts for this batch
};

// One optimizer update. Throws TrainingError (with the step number and the
// clip ids) when the loss is not finite.
StepStats train_step(ModelState& state, LookaheadAdam& optimizer,
                     const torch::Tensor& inputs, const torch::Tensor& targets,
                     const TrainConfig& cfg,
                     const std::vector<std::string>& clip_ids = {});

struct EpochRecord {
  int epoch = 0;  // 1-based
  int steps = 0;
  double reconstruction_loss = 0.0;
  double codebook_loss = 0.0;
  double commitment_loss = 0.0;
  double total_loss = 0.0;
  std::int64_t dead_codes = 0;
  double wall_seconds = 0.0;
};

struct TrainHistory {
  Variant variant = Variant::kFull;
  std::vector<EpochRecord> epochs;

  nlohmann::json to_json() const;
  static TrainHistory from_json(const nlohmann::json& j);
};

struct StepEvent {
  int epoch = 0;
  std::int64_t step = 0;
  const StepStats* stats = nullptr;
};

struct TrainOptions {
  // Receives ckpt_epoch_<k>.tar and history.json after each epoch; empty
  // disables checkpointing.
  std::filesystem::path work_dir;
  bool resume = false;
  std::function<void(const StepEvent&)> on_step;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  ModelState state;
  TrainHistory history;
};

// One random window per training clip per epoch, batched after a seeded
// shuffle; augmentation precedes sketch synthesis.
TrainResult train(const CorpusIndex& corpus, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, Variant variant,
                  const TrainOptions& options = {});

std::filesystem::path checkpoint_path(const std::filesystem::path& work_dir,
                                      int epoch);
// Highest k with ckpt_epoch_<k>.tar present, or 0.
int latest_checkpoint_epoch(const std::filesystem::path& work_dir);

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_TRAINING_HPP_

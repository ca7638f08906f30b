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

#ifndef SKETCHBETWEEN_METRICS_HPP_
#define SKETCHBETWEEN_METRICS_HPP_

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/types.h>

#include "sketchbetween/dataset.hpp"
#include "sketchbetween/frame.hpp"
#include "sketchbetween/vqvae.hpp"

namespace sketchbetween {

inline constexpr const char* kReportFormat = "sketchbetween-report-1";

struct MetricConfig {
  int ssim_window = 11;      // Gaussian window side
  double ssim_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
  double psnr_cap = 100.0;   // reported when MSE == 0

  void validate() const;
};

// Normalized 2-D Gaussian window, [side, side]. When an image is smaller than
// the configured window the side shrinks to the largest odd size that fits.
torch::Tensor ssim_window(int side, double sigma, torch::Dtype dtype);

// SSIM per image for [M, C, H, W] tensors: Gaussian-windowed (valid
// filtering) SSIM map per channel, averaged over pixels and channels.
// Differentiable; used both as the training loss and as the metric.
torch::Tensor ssim_per_image(const torch::Tensor& a, const torch::Tensor& b,
                             const MetricConfig& cfg = {});

double ssim(const Frame& a, const Frame& b, const MetricConfig& cfg = {});

double mean_squared_error(const Frame& a, const Frame& b);

// 10 log10(L^2 / MSE), or cfg.psnr_cap when MSE is zero.
double psnr(const Frame& a, const Frame& b, const MetricConfig& cfg = {});

struct FrameScore {
  int index = 0;  // position inside the window
  double ssim = 0.0;
  double psnr = 0.0;
};

struct WindowRecord {
  std::string source_id;
  int start = 0;
  std::vector<FrameScore> frames;
};

struct ClipFailure {
  std::string source_id;
  std::string message;
};

struct EvalReport {
  Variant variant = Variant::kFull;
  int window_length = kDefaultWindowLength;
  std::vector<WindowRecord> windows;  // sorted by (source_id, start)
  std::vector<ClipFailure> failures;
  int clips_evaluated = 0;
  std::size_t frames_scored = 0;
  double mean_ssim = 0.0;
  double mean_psnr = 0.0;

  nlohmann::json to_json(const MetricConfig& cfg) const;
  static EvalReport from_json(const nlohmann::json& j);
};

// Maps a batch of model inputs [B, 3, N, H, W] to reconstructions of the same
// shape.
using Predictor = std::function<torch::Tensor(const torch::Tensor&)>;

struct EvalOptions {
  int batch_size = 4;
  std::size_t max_clips = 0;  // 0 = all test clips
  SketchParams sketch{};
};

// Scores in-between positions 1..N-2 of every test window. Clips that fail to
// decode or predict are recorded in `failures` and skipped.
EvalReport evaluate_predictor(const Predictor& predict,
                              const CorpusIndex& corpus, Variant variant,
                              const MetricConfig& cfg,
                              const EvalOptions& options = {});

// Runs the model in eval mode (batch-norm running statistics, no
// augmentation).
EvalReport evaluate(ModelState& model, const CorpusIndex& corpus,
                    Variant variant, const MetricConfig& cfg,
                    const EvalOptions& options = {});

// Recomputes the aggregates from the stored per-frame scores.
void finalize_report(EvalReport& report);

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_METRICS_HPP_

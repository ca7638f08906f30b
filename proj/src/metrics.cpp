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

#include "sketchbetween/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <torch/torch.h>

#include "sketchbetween/error.hpp"
#include "sketchbetween/media_io.hpp"
#include "sketchbetween/tensor_convert.hpp"

using nlohmann::json;

namespace sketchbetween {

void MetricConfig::validate() const {
  if (ssim_window < 1 || ssim_window % 2 == 0) {
    throw ConfigError("metric.ssim_window must be a positive odd integer");
  }
  if (!(ssim_sigma > 0.0)) throw ConfigError("metric.ssim_sigma must be > 0");
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw ConfigError("metric.k1/k2 must be > 0");
  if (!(dynamic_range > 0.0)) {
    throw ConfigError("metric.dynamic_range must be > 0");
  }
}

torch::Tensor ssim_window(int side, double sigma, torch::Dtype dtype) {
  auto coords = torch::arange(side, torch::TensorOptions().dtype(torch::kDouble)) -
                (side - 1) / 2.0;
  auto g = torch::exp(-(coords * coords) / (2.0 * sigma * sigma));
  g = g / g.sum();
  return torch::outer(g, g).to(dtype);
}

torch::Tensor ssim_per_image(const torch::Tensor& a, const torch::Tensor& b,
                             const MetricConfig& cfg) {
  if (a.sizes() != b.sizes() || a.dim() != 4) {
    throw ShapeError("ssim: expected two [M, C, H, W] tensors of equal shape");
  }
  const int64_t channels = a.size(1);
  int side = static_cast<int>(
      std::min<int64_t>({cfg.ssim_window, a.size(2), a.size(3)}));
  if (side % 2 == 0) --side;
  if (side < 1) throw ShapeError("ssim: empty image");

  auto window = ssim_window(side, cfg.ssim_sigma, a.scalar_type())
                    .to(a.device())
                    .expand({channels, 1, side, side})
                    .contiguous();
  auto filter = [&](const torch::Tensor& x) {
    return torch::conv2d(x, window, torch::Tensor(), torch::IntArrayRef{1, 1},
                         torch::IntArrayRef{0, 0}, torch::IntArrayRef{1, 1},
                         channels);
  };

  const double c1 = std::pow(cfg.k1 * cfg.dynamic_range, 2);
  const double c2 = std::pow(cfg.k2 * cfg.dynamic_range, 2);
  auto mu_a = filter(a);
  auto mu_b = filter(b);
  auto var_a = filter(a * a) - mu_a * mu_a;
  auto var_b = filter(b * b) - mu_b * mu_b;
  auto cov = filter(a * b) - mu_a * mu_b;
  auto map = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
             ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
  return map.mean({1, 2, 3});
}

double ssim(const Frame& a, const Frame& b, const MetricConfig& cfg) {
  if (a.height != b.height || a.width != b.width) {
    throw ShapeError("ssim: frame sizes differ");
  }
  torch::NoGradGuard no_grad;
  auto ta = frame_to_tensor(a, torch::kDouble).unsqueeze(0);
  auto tb = frame_to_tensor(b, torch::kDouble).unsqueeze(0);
  return ssim_per_image(ta, tb, cfg).item<double>();
}

double mean_squared_error(const Frame& a, const Frame& b) {
  if (a.height != b.height || a.width != b.width) {
    throw ShapeError("mse: frame sizes differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.pixels.size());
}

double psnr(const Frame& a, const Frame& b, const MetricConfig& cfg) {
  const double mse = mean_squared_error(a, b);
  if (mse == 0.0) return cfg.psnr_cap;
  return 10.0 * std::log10(cfg.dynamic_range * cfg.dynamic_range / mse);
}

void finalize_report(EvalReport& report) {
  std::stable_sort(report.windows.begin(), report.windows.end(),
                   [](const WindowRecord& x, const WindowRecord& y) {
                     if (x.source_id != y.source_id) {
                       return x.source_id < y.source_id;
                     }
                     return x.start < y.start;
                   });
  double sum_ssim = 0.0, sum_psnr = 0.0;
  std::size_t n = 0;
  for (const auto& w : report.windows) {
    for (const auto& f : w.frames) {
      sum_ssim += f.ssim;
      sum_psnr += f.psnr;
      ++n;
    }
  }
  report.frames_scored = n;
  report.mean_ssim = n ? sum_ssim / static_cast<double>(n) : 0.0;
  report.mean_psnr = n ? sum_psnr / static_cast<double>(n) : 0.0;
}

json EvalReport::to_json(const MetricConfig& cfg) const {
  json windows_json = json::array();
  for (const auto& w : windows) {
    json frames_json = json::array();
    for (const auto& f : w.frames) {
      frames_json.push_back(
          {{"index", f.index}, {"ssim", f.ssim}, {"psnr", f.psnr}});
    }
    windows_json.push_back({{"source_id", w.source_id},
                            {"start", w.start},
                            {"frames", frames_json}});
  }
  json failures_json = json::array();
  for (const auto& f : failures) {
    failures_json.push_back({{"source_id", f.source_id}, {"message", f.message}});
  }
  return {{"format", kReportFormat},
          {"variant", std::string(to_string(variant))},
          {"window_length", window_length},
          {"metric",
           {{"ssim_window", cfg.ssim_window},
            {"ssim_sigma", cfg.ssim_sigma},
            {"k1", cfg.k1},
            {"k2", cfg.k2},
            {"dynamic_range", cfg.dynamic_range},
            {"psnr_cap", cfg.psnr_cap}}},
          {"counts",
           {{"clips", clips_evaluated},
            {"windows", windows.size()},
            {"frames", frames_scored},
            {"failed_clips", failures.size()}}},
          {"aggregate", {{"mean_ssim", mean_ssim}, {"mean_psnr", mean_psnr}}},
          {"windows", windows_json},
          {"failures", failures_json}};
}

EvalReport EvalReport::from_json(const json& j) {
  if (j.value("format", "") != kReportFormat) {
    throw ConfigError("not a " + std::string(kReportFormat) + " document");
  }
  EvalReport r;
  r.variant = parse_variant(j.at("variant").get<std::string>());
  r.window_length = j.at("window_length");
  r.clips_evaluated = j.at("counts").at("clips");
  for (const auto& w : j.at("windows")) {
    WindowRecord rec{w.at("source_id"), w.at("start"), {}};
    for (const auto& f : w.at("frames")) {
      rec.frames.push_back({f.at("index"), f.at("ssim"), f.at("psnr")});
    }
    r.windows.push_back(std::move(rec));
  }
  for (const auto& f : j.at("failures")) {
    r.failures.push_back({f.at("source_id"), f.at("message")});
  }
  r.frames_scored = j.at("counts").at("frames");
  r.mean_ssim = j.at("aggregate").at("mean_ssim");
  r.mean_psnr = j.at("aggregate").at("mean_psnr");
  return r;
}

EvalReport evaluate_predictor(const Predictor& predict,
                              const CorpusIndex& corpus, Variant variant,
                              const MetricConfig& cfg,
                              const EvalOptions& options) {
  cfg.validate();
  const auto test = corpus.split(Split::kTest);
  if (test.empty()) throw ConfigError("evaluate: test split is empty");
  const int n = corpus.window_length;
  const int batch = std::max(1, options.batch_size);

  EvalReport report;
  report.variant = variant;
  report.window_length = n;
  std::size_t clips = 0;
  for (const auto& entry : test) {
    if (options.max_clips && clips >= options.max_clips) break;
    ++clips;
    std::vector<WindowRecord> records;
    try {
      const AnimationClip clip = decode_animation(entry.path);
      const auto examples =
          prepare_eval_examples(clip, n, variant, options.sketch);
      for (std::size_t pos = 0; pos < examples.size(); pos += batch) {
        const std::size_t end = std::min(examples.size(), pos + batch);
        std::span<const Example> chunk(examples.data() + pos, end - pos);
        auto [inputs, targets] = stack_examples(chunk);
        torch::Tensor recon;
        {
          torch::NoGradGuard no_grad;
          recon = predict(inputs);
        }
        if (recon.sizes() != targets.sizes()) {
          throw ShapeError("prediction shape does not match target");
        }
        for (std::size_t b = 0; b < chunk.size(); ++b) {
          const auto frames = tensor_to_frames(recon[b]);
          WindowRecord rec{chunk[b].source_id, chunk[b].start, {}};
          for (int i = 1; i < n - 1; ++i) {
            rec.frames.push_back({i, ssim(frames[i], chunk[b].target[i], cfg),
                                  psnr(frames[i], chunk[b].target[i], cfg)});
          }
          records.push_back(std::move(rec));
        }
      }
    } catch (const std::exception& e) {
      report.failures.push_back({entry.source_id, e.what()});
      continue;
    }
    ++report.clips_evaluated;
    for (auto& r : records) report.windows.push_back(std::move(r));
  }
  finalize_report(report);
  return report;
}

EvalReport evaluate(ModelState& model, const CorpusIndex& corpus,
                    Variant variant, const MetricConfig& cfg,
                    const EvalOptions& options) {
  if (model.config.window_length != corpus.window_length) {
    throw ConfigError("model window length " +
                      std::to_string(model.config.window_length) +
                      " does not match corpus window length " +
                      std::to_string(corpus.window_length));
  }
  const bool was_training = model.net->is_training();
  model.net->eval();
  Predictor predict = [&model](const torch::Tensor& inputs) {
    return forward(model, inputs).reconstruction;
  };
  EvalReport report = evaluate_predictor(predict, corpus, variant, cfg, options);
  model.net->train(was_training);
  return report;
}

}  // namespace sketchbetween

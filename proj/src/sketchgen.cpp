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

#include "sketchbetween/sketchgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "sketchbetween/error.hpp"

namespace sketchbetween {
namespace {

std::array<double, 3> rgb_to_hsv(double r, double g, double b) {
  const double maxc = std::max({r, g, b});
  const double minc = std::min({r, g, b});
  const double delta = maxc - minc;
  double h = 0.0;
  if (delta > 0.0) {
    if (maxc == r) {
      h = 60.0 * std::fmod((g - b) / delta, 6.0);
    } else if (maxc == g) {
      h = 60.0 * ((b - r) / delta + 2.0);
    } else {
      h = 60.0 * ((r - g) / delta + 4.0);
    }
    if (h < 0.0) h += 360.0;
  }
  const double s = maxc > 0.0 ? delta / maxc : 0.0;
  return {h, s, maxc};
}

std::array<double, 3> hsv_to_rgb(double h, double s, double v) {
  if (s <= 0.0) return {v, v, v};
  h = std::fmod(h, 360.0);
  if (h < 0.0) h += 360.0;
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  return {r + m, g + m, b + m};
}

}  // namespace

EdgeMap canny_edges(const Frame& frame, int kernel_size,
                    const CannyThresholds& thresholds) {
  if (kernel_size < 3 || kernel_size > 9 || kernel_size % 2 == 0) {
    throw ParameterError("canny kernel size must be one of 3, 5, 7, 9 (got " +
                         std::to_string(kernel_size) + ")");
  }
  if (frame.empty()) throw ParameterError("canny_edges: empty frame");
  const Gray8 mask = canny_from_smoothed(
      gaussian_blur(to_gray8(frame), kernel_size), thresholds);
  EdgeMap out{mask.height, mask.width,
              std::vector<float>(mask.values.begin(), mask.values.end())};
  return out;
}

EdgeMap multiscale_edges(const Frame& frame, const SketchParams& params) {
  if (params.kernel_sizes.empty()) {
    throw ParameterError("sketch needs at least one kernel size");
  }
  EdgeMap sum{frame.height, frame.width,
              std::vector<float>(
                  static_cast<std::size_t>(frame.height) * frame.width, 0.0f)};
  for (int k : params.kernel_sizes) {
    const EdgeMap e = canny_edges(frame, k, params.thresholds);
    for (std::size_t i = 0; i < sum.values.size(); ++i) {
      sum.values[i] += e.values[i];
    }
  }
  const float n = static_cast<float>(params.kernel_sizes.size());
  for (float& v : sum.values) v /= n;
  return sum;
}

Frame synthesize_sketch(const Frame& frame, const SketchParams& params) {
  const EdgeMap edges = multiscale_edges(frame, params);
  Frame out(frame.height, frame.width);
  for (std::size_t i = 0; i < edges.values.size(); ++i) {
    const float v = 1.0f - edges.values[i];
    out.pixels[i * 3] = v;
    out.pixels[i * 3 + 1] = v;
    out.pixels[i * 3 + 2] = v;
  }
  return out;
}

void AugmentParams::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(std::string("augment.") + name + " must lie in [0, 1]");
    }
  };
  prob(p_hue, "p_hue");
  prob(p_sat, "p_sat");
  prob(p_flip, "p_flip");
  if (!(max_hue_shift >= 0.0 && max_hue_shift < 360.0)) {
    throw ConfigError("augment.max_hue_shift must lie in [0, 360)");
  }
  if (!(max_sat_delta >= 0.0 && max_sat_delta <= 1.0)) {
    throw ConfigError("augment.max_sat_delta must lie in [0, 1]");
  }
}

AugmentDecision draw_augment(const AugmentParams& params, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AugmentDecision d;
  if (unit(rng) < params.p_hue) {
    d.hue_shift_deg = std::uniform_real_distribution<double>(
        -params.max_hue_shift, params.max_hue_shift)(rng);
  }
  if (unit(rng) < params.p_sat) {
    d.saturation_scale = std::uniform_real_distribution<double>(
        1.0 - params.max_sat_delta, 1.0 + params.max_sat_delta)(rng);
  }
  d.flip = unit(rng) < params.p_flip;
  return d;
}

Frame shift_hue_saturation(const Frame& frame, double hue_deg,
                           double saturation_scale) {
  Frame out(frame.height, frame.width);
  for (std::size_t i = 0; i < frame.pixels.size(); i += 3) {
    auto [h, s, v] = rgb_to_hsv(frame.pixels[i], frame.pixels[i + 1],
                                frame.pixels[i + 2]);
    s = std::clamp(s * saturation_scale, 0.0, 1.0);
    const auto rgb = hsv_to_rgb(h + hue_deg, s, v);
    for (int c = 0; c < 3; ++c) {
      out.pixels[i + c] = static_cast<float>(std::clamp(rgb[c], 0.0, 1.0));
    }
  }
  return out;
}

AnimationClip apply_augment(const AnimationClip& clip,
                            const AugmentDecision& decision) {
  AnimationClip out = clip;
  const bool recolor = decision.hue_shift_deg || decision.saturation_scale;
  for (Frame& f : out.frames) {
    if (recolor) {
      f = shift_hue_saturation(f, decision.hue_shift_deg.value_or(0.0),
                               decision.saturation_scale.value_or(1.0));
    }
    if (decision.flip) f = flip_horizontal(f);
  }
  return out;
}

AnimationClip augment(const AnimationClip& clip, const AugmentParams& params,
                      Rng& rng) {
  validate_clip(clip);
  return apply_augment(clip, draw_augment(params, rng));
}

}  // namespace sketchbetween

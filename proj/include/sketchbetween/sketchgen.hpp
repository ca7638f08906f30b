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

#ifndef SKETCHBETWEEN_SKETCHGEN_HPP_
#define SKETCHBETWEEN_SKETCHGEN_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sketchbetween/canny.hpp"
#include "sketchbetween/frame.hpp"

namespace sketchbetween {

using Rng = std::mt19937_64;

// Edge strength per pixel in [0, 1].
struct EdgeMap {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  float at(int y, int x) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  bool operator==(const EdgeMap&) const = default;
};

struct SketchParams {
  std::vector<int> kernel_sizes{3, 5, 7, 9};
  CannyThresholds thresholds{};
};

// Binary Canny map with a Gaussian pre-blur of aperture `kernel_size`
// (one of 3, 5, 7, 9) and a 3x3 Sobel.
EdgeMap canny_edges(const Frame& frame, int kernel_size,
                    const CannyThresholds& thresholds = {});

// Mean of the binary maps over `params.kernel_sizes`.
EdgeMap multiscale_edges(const Frame& frame, const SketchParams& params = {});

// 1 - multiscale_edges, replicated to three channels: dark strokes on white.
Frame synthesize_sketch(const Frame& frame, const SketchParams& params = {});

struct AugmentParams {
  double p_hue = 0.5;
  double max_hue_shift = 180.0;  // degrees
  double p_sat = 0.5;
  double max_sat_delta = 0.2;    // fraction
  double p_flip = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

// One draw of augmentation choices, shared by every frame of a clip.
struct AugmentDecision {
  std::optional<double> hue_shift_deg;
  std::optional<double> saturation_scale;
  bool flip = false;
};

AugmentDecision draw_augment(const AugmentParams& params, Rng& rng);
AnimationClip apply_augment(const AnimationClip& clip,
                            const AugmentDecision& decision);
AnimationClip augment(const AnimationClip& clip, const AugmentParams& params,
                      Rng& rng);

// Rotates hue by `hue_deg` and scales saturation (clamped to [0, 1]) in HSV.
Frame shift_hue_saturation(const Frame& frame, double hue_deg,
                           double saturation_scale);

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_SKETCHGEN_HPP_

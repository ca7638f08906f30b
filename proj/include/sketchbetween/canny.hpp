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

#ifndef SKETCHBETWEEN_CANNY_HPP_
#define SKETCHBETWEEN_CANNY_HPP_

#include <cstdint>
#include <vector>

#include "sketchbetween/frame.hpp"

namespace sketchbetween {

// 8-bit single-channel raster.
struct Gray8 {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> values;

  std::uint8_t at(int y, int x) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

struct CannyThresholds {
  int low = 50;
  int high = 150;
};

// Luma (0.299, 0.587, 0.114) of the 8-bit quantized channels, rounded.
Gray8 to_gray8(const Frame& frame);

// sigma for an aperture of `kernel_size` taps: 0.3 * ((k - 1) / 2 - 1) + 0.8.
double gaussian_sigma_for_aperture(int kernel_size);

// Integer taps summing to 256, symmetric about the centre.
std::vector<int> gaussian_taps_fixed(int kernel_size);

// Separable Gaussian in fixed point with reflect-101 borders. Exactly
// mirror-symmetric.
Gray8 gaussian_blur(const Gray8& image, int kernel_size);

// Canny stages after smoothing: 3x3 Sobel, L1 magnitude, non-maximum
// suppression and hysteresis. Returns a 0/1 mask.
Gray8 canny_from_smoothed(const Gray8& smoothed, const CannyThresholds& t);

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_CANNY_HPP_

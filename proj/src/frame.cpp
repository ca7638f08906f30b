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

#include "sketchbetween/frame.hpp"

#include <algorithm>
#include <cmath>

#include "sketchbetween/error.hpp"

namespace sketchbetween {

Frame::Frame(int h, int w, float fill)
    : height(h),
      width(w),
      pixels(static_cast<std::size_t>(std::max(h, 0)) * std::max(w, 0) * 3,
             fill) {}

Frame Frame::filled(int h, int w, float r, float g, float b) {
  Frame f(h, w);
  for (std::size_t i = 0; i < f.pixels.size(); i += 3) {
    f.pixels[i] = r;
    f.pixels[i + 1] = g;
    f.pixels[i + 2] = b;
  }
  return f;
}

Frame flip_horizontal(const Frame& frame) {
  Frame out(frame.height, frame.width);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(y, frame.width - 1 - x, c) = frame.at(y, x, c);
      }
    }
  }
  return out;
}

double max_abs_difference(const Frame& a, const Frame& b) {
  if (a.height != b.height || a.width != b.width) {
    throw ShapeError("max_abs_difference: frame sizes differ");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(a.pixels[i]) -
                                     static_cast<double>(b.pixels[i])));
  }
  return worst;
}

void validate_clip(const AnimationClip& clip) {
  if (clip.frames.empty()) {
    throw EmptyClipError("clip '" + clip.source_id + "' has no frames");
  }
  const Frame& first = clip.frames.front();
  for (const Frame& f : clip.frames) {
    if (f.height != first.height || f.width != first.width) {
      throw ShapeError("clip '" + clip.source_id +
                       "' mixes frame dimensions");
    }
  }
}

}  // namespace sketchbetween

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

#ifndef SKETCHBETWEEN_FRAME_HPP_
#define SKETCHBETWEEN_FRAME_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace sketchbetween {

inline constexpr int kCanonicalSize = 128;

// RGB raster with interleaved channels, values in [0, 1].
struct Frame {
  int height = 0;
  int width = 0;
  std::vector<float> pixels;  // height * width * 3, row-major, RGB

  Frame() = default;
  Frame(int h, int w, float fill = 0.0f);

  static Frame filled(int h, int w, float r, float g, float b);

  float& at(int y, int x, int c) { return pixels[index(y, x, c)]; }
  float at(int y, int x, int c) const { return pixels[index(y, x, c)]; }

  bool empty() const { return height <= 0 || width <= 0; }
  bool is_canonical() const {
    return height == kCanonicalSize && width == kCanonicalSize;
  }
  std::size_t size() const { return pixels.size(); }

  bool operator==(const Frame& other) const = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * 3 + c;
  }
};

// Mirror left/right.
Frame flip_horizontal(const Frame& frame);

// Largest per-channel absolute difference. Frames must share dimensions.
double max_abs_difference(const Frame& a, const Frame& b);

struct AnimationClip {
  std::vector<Frame> frames;
  std::string source_id;
  double fps = 10.0;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

// Throws EmptyClipError for an empty clip and ShapeError when frame sizes
// disagree.
void validate_clip(const AnimationClip& clip);

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_FRAME_HPP_

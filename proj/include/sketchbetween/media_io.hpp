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

#ifndef SKETCHBETWEEN_MEDIA_IO_HPP_
#define SKETCHBETWEEN_MEDIA_IO_HPP_

#include <cstdint>
#include <filesystem>

#include "sketchbetween/frame.hpp"

namespace sketchbetween {

// Reads a GIF, or a directory of frame_0000.png-style images taken in
// lexicographic order. Frames are composited over opaque white, normalized
// to [0, 1] and resized to 128x128.
AnimationClip decode_animation(const std::filesystem::path& path);

// Writes `path` (a GIF) and a sibling directory `<stem>_frames/` holding one
// 8-bit PNG per frame. The PNG directory decodes back within 1/255 per
// channel; the GIF is palette-limited.
void encode_animation(const AnimationClip& clip,
                      const std::filesystem::path& path, double fps);

std::filesystem::path frames_directory_for(const std::filesystem::path& gif);

// White-pads to square, then bilinearly resamples to 128x128. Canonical
// frames are returned unchanged.
Frame resize_to_canonical(const Frame& frame);

Frame pad_to_square(const Frame& frame, float fill = 1.0f);

// Bilinear resampling with half-pixel centres and clamped borders.
Frame resize_bilinear(const Frame& frame, int out_h, int out_w);

// Single still image (PNG, JPEG, ...) composited over white, not resized.
Frame read_image(const std::filesystem::path& path);

void write_png(const Frame& frame, const std::filesystem::path& path);

inline std::uint8_t to_byte(float v) {
  const float s = v * 255.0f + 0.5f;
  if (!(s > 0.0f)) return 0;
  if (s >= 255.0f) return 255;
  return static_cast<std::uint8_t>(s);
}

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_MEDIA_IO_HPP_

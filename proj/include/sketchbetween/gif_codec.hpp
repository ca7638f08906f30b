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

#ifndef SKETCHBETWEEN_GIF_CODEC_HPP_
#define SKETCHBETWEEN_GIF_CODEC_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace sketchbetween::gif {

// 8-bit raster, `channels` interleaved values per pixel.
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

struct DecodedFrame {
  Image8 canvas;      // RGBA, alpha is 0 or 255
  int delay_cs = 0;   // hundredths of a second
};

// Decodes every image of a GIF stream into full-canvas RGBA snapshots, with
// disposal methods applied between frames. Pixels never painted (or cleared
// by disposal) have alpha 0. Throws DecodeError on malformed streams.
std::vector<DecodedFrame> decode(std::span<const std::uint8_t> bytes);

// Encodes RGB frames (all the same size) as a looping GIF89a. Each frame gets
// a local colour table: exact when it holds at most 256 colours, median-cut
// otherwise.
std::vector<std::uint8_t> encode(const std::vector<Image8>& rgb_frames,
                                 int delay_cs);

// Exposed for tests.
std::vector<std::uint8_t> lzw_encode(std::span<const std::uint8_t> indices,
                                     int min_code_size);
std::vector<std::uint8_t> lzw_decode(std::span<const std::uint8_t> data,
                                     int min_code_size,
                                     std::size_t expected_pixels);

}  // namespace sketchbetween::gif

#endif  // SKETCHBETWEEN_GIF_CODEC_HPP_

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

// GIF87a/89a reading and GIF89a writing.

#include "sketchbetween/gif_codec.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <map>
#include <string>
#include <unordered_map>

#include "sketchbetween/error.hpp"

namespace sketchbetween::gif {
namespace {

constexpr int kMaxCodeSize = 12;
constexpr int kMaxCodes = 1 << kMaxCodeSize;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ >= bytes_.size(); }

  std::uint8_t u8() {
    if (pos_ >= bytes_.size()) throw DecodeError("gif: unexpected end of data");
    return bytes_[pos_++];
  }

  int u16() {
    const int lo = u8();
    const int hi = u8();
    return lo | (hi << 8);
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw DecodeError("gif: unexpected end of data");
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  // Concatenates a chain of data sub-blocks. A missing terminator at end of
  // file is tolerated.
  std::vector<std::uint8_t> sub_blocks() {
    std::vector<std::uint8_t> out;
    while (!done()) {
      const std::size_t len = u8();
      if (len == 0) break;
      const std::size_t avail = std::min(len, bytes_.size() - pos_);
      auto chunk = take(avail);
      out.insert(out.end(), chunk.begin(), chunk.end());
      if (avail < len) break;
    }
    return out;
  }

  void skip_sub_blocks() {
    while (!done()) {
      const std::size_t len = u8();
      if (len == 0) break;
      pos_ += std::min(len, bytes_.size() - pos_);
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

using Palette = std::vector<std::array<std::uint8_t, 3>>;

Palette read_palette(ByteReader& in, int bits) {
  Palette pal(static_cast<std::size_t>(1) << bits);
  for (auto& entry : pal) {
    entry[0] = in.u8();
    entry[1] = in.u8();
    entry[2] = in.u8();
  }
  return pal;
}

class BitWriter {
 public:
  void put(int code, int bits) {
    acc_ |= static_cast<std::uint32_t>(code) << nbits_;
    nbits_ += bits;
    while (nbits_ >= 8) {
      out_.push_back(static_cast<std::uint8_t>(acc_ & 0xFF));
      acc_ >>= 8;
      nbits_ -= 8;
    }
  }

  std::vector<std::uint8_t> finish() {
    if (nbits_ > 0) out_.push_back(static_cast<std::uint8_t>(acc_ & 0xFF));
    acc_ = 0;
    nbits_ = 0;
    return std::move(out_);
  }

 private:
  std::vector<std::uint8_t> out_;
  std::uint32_t acc_ = 0;
  int nbits_ = 0;
};

void put_u16(std::vector<std::uint8_t>& out, int v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

void put_sub_blocks(std::vector<std::uint8_t>& out,
                    std::span<const std::uint8_t> data) {
  for (std::size_t pos = 0; pos < data.size(); pos += 255) {
    const std::size_t n = std::min<std::size_t>(255, data.size() - pos);
    out.push_back(static_cast<std::uint8_t>(n));
    out.insert(out.end(), data.begin() + pos, data.begin() + pos + n);
  }
  out.push_back(0);
}

std::uint32_t pack_rgb(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 16) |
         (static_cast<std::uint32_t>(p[1]) << 8) | p[2];
}

struct ColorCount {
  std::array<int, 3> rgb;
  std::size_t count;
};

// Median-cut over the weighted colour histogram.
Palette median_cut(std::vector<ColorCount> colors, std::size_t max_colors) {
  struct Box {
    std::size_t begin, end;
  };
  auto widest_axis = [&](const Box& b, int* range) {
    std::array<int, 3> lo{255, 255, 255}, hi{0, 0, 0};
    for (std::size_t i = b.begin; i < b.end; ++i) {
      for (int c = 0; c < 3; ++c) {
        lo[c] = std::min(lo[c], colors[i].rgb[c]);
        hi[c] = std::max(hi[c], colors[i].rgb[c]);
      }
    }
    int axis = 0;
    for (int c = 1; c < 3; ++c) {
      if (hi[c] - lo[c] > hi[axis] - lo[axis]) axis = c;
    }
    *range = hi[axis] - lo[axis];
    return axis;
  };

  std::vector<Box> boxes{{0, colors.size()}};
  while (boxes.size() < max_colors) {
    int best = -1, best_range = 0, best_axis = 0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (boxes[i].end - boxes[i].begin < 2) continue;
      int range = 0;
      const int axis = widest_axis(boxes[i], &range);
      if (range > best_range) {
        best = static_cast<int>(i);
        best_range = range;
        best_axis = axis;
      }
    }
    if (best < 0) break;
    Box box = boxes[best];
    std::sort(colors.begin() + box.begin, colors.begin() + box.end,
              [&](const ColorCount& a, const ColorCount& b) {
                if (a.rgb[best_axis] != b.rgb[best_axis]) {
                  return a.rgb[best_axis] < b.rgb[best_axis];
                }
                return a.rgb < b.rgb;
              });
    std::size_t total = 0;
    for (std::size_t i = box.begin; i < box.end; ++i) total += colors[i].count;
    std::size_t acc = 0, split = box.begin + 1;
    for (std::size_t i = box.begin; i < box.end - 1; ++i) {
      acc += colors[i].count;
      split = i + 1;
      if (2 * acc >= total) break;
    }
    boxes[best] = {box.begin, split};
    boxes.push_back({split, box.end});
  }

  Palette pal;
  pal.reserve(boxes.size());
  for (const Box& b : boxes) {
    std::array<double, 3> sum{0, 0, 0};
    double weight = 0;
    for (std::size_t i = b.begin; i < b.end; ++i) {
      for (int c = 0; c < 3; ++c) {
        sum[c] += static_cast<double>(colors[i].rgb[c]) * colors[i].count;
      }
      weight += static_cast<double>(colors[i].count);
    }
    std::array<std::uint8_t, 3> entry{};
    for (int c = 0; c < 3; ++c) {
      entry[c] = static_cast<std::uint8_t>(
          std::clamp(static_cast<int>(sum[c] / weight + 0.5), 0, 255));
    }
    pal.push_back(entry);
  }
  return pal;
}

// Builds a palette for one frame and maps its pixels to palette indices.
Palette index_frame(const Image8& frame, std::vector<std::uint8_t>* indices) {
  const std::size_t npix =
      static_cast<std::size_t>(frame.width) * frame.height;
  std::map<std::uint32_t, std::size_t> histogram;
  for (std::size_t i = 0; i < npix; ++i) {
    ++histogram[pack_rgb(&frame.data[i * 3])];
  }

  indices->resize(npix);
  if (histogram.size() <= 256) {
    Palette pal;
    std::unordered_map<std::uint32_t, std::uint8_t> lookup;
    for (const auto& [rgb, count] : histogram) {
      lookup[rgb] = static_cast<std::uint8_t>(pal.size());
      pal.push_back({static_cast<std::uint8_t>(rgb >> 16),
                     static_cast<std::uint8_t>((rgb >> 8) & 0xFF),
                     static_cast<std::uint8_t>(rgb & 0xFF)});
    }
    for (std::size_t i = 0; i < npix; ++i) {
      (*indices)[i] = lookup[pack_rgb(&frame.data[i * 3])];
    }
    return pal;
  }

  std::vector<ColorCount> colors;
  colors.reserve(histogram.size());
  for (const auto& [rgb, count] : histogram) {
    colors.push_back({{static_cast<int>(rgb >> 16),
                       static_cast<int>((rgb >> 8) & 0xFF),
                       static_cast<int>(rgb & 0xFF)},
                      count});
  }
  Palette pal = median_cut(std::move(colors), 256);
  std::unordered_map<std::uint32_t, std::uint8_t> nearest;
  for (std::size_t i = 0; i < npix; ++i) {
    const std::uint8_t* p = &frame.data[i * 3];
    const std::uint32_t key = pack_rgb(p);
    auto it = nearest.find(key);
    if (it == nearest.end()) {
      int best = 0;
      int best_d = 1 << 30;
      for (std::size_t k = 0; k < pal.size(); ++k) {
        int d = 0;
        for (int c = 0; c < 3; ++c) {
          const int diff = static_cast<int>(p[c]) - pal[k][c];
          d += diff * diff;
        }
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(k);
        }
      }
      it = nearest.emplace(key, static_cast<std::uint8_t>(best)).first;
    }
    (*indices)[i] = it->second;
  }
  return pal;
}

void draw_image(Image8& canvas, const Palette& pal,
                std::span<const std::uint8_t> indices, int left, int top,
                int w, int h, bool interlaced, int transparent_index) {
  std::vector<int> row_order;
  row_order.reserve(h);
  if (interlaced) {
    constexpr std::array<std::pair<int, int>, 4> passes{
        {{0, 8}, {4, 8}, {2, 4}, {1, 2}}};
    for (auto [start, step] : passes) {
      for (int y = start; y < h; y += step) row_order.push_back(y);
    }
  } else {
    for (int y = 0; y < h; ++y) row_order.push_back(y);
  }
  for (int r = 0; r < h; ++r) {
    const int cy = top + row_order[r];
    if (cy < 0 || cy >= canvas.height) continue;
    for (int x = 0; x < w; ++x) {
      const std::size_t src = static_cast<std::size_t>(r) * w + x;
      if (src >= indices.size()) return;
      const int idx = indices[src];
      if (idx == transparent_index) continue;
      const int cx = left + x;
      if (cx < 0 || cx >= canvas.width) continue;
      std::uint8_t* dst =
          &canvas.data[(static_cast<std::size_t>(cy) * canvas.width + cx) * 4];
      if (static_cast<std::size_t>(idx) < pal.size()) {
        dst[0] = pal[idx][0];
        dst[1] = pal[idx][1];
        dst[2] = pal[idx][2];
      } else {
        dst[0] = dst[1] = dst[2] = 0;
      }
      dst[3] = 255;
    }
  }
}

void clear_rect(Image8& canvas, int left, int top, int w, int h) {
  for (int y = std::max(top, 0); y < std::min(top + h, canvas.height); ++y) {
    for (int x = std::max(left, 0); x < std::min(left + w, canvas.width); ++x) {
      std::memset(
          &canvas.data[(static_cast<std::size_t>(y) * canvas.width + x) * 4], 0,
          4);
    }
  }
}

}  // namespace

std::vector<std::uint8_t> lzw_decode(std::span<const std::uint8_t> data,
                                     int min_code_size,
                                     std::size_t expected_pixels) {
  if (min_code_size < 2 || min_code_size > 8) {
    throw DecodeError("gif: invalid LZW minimum code size " +
                      std::to_string(min_code_size));
  }
  const int clear = 1 << min_code_size;
  const int eoi = clear + 1;

  std::vector<std::uint16_t> prefix(kMaxCodes);
  std::vector<std::uint8_t> suffix(kMaxCodes);
  std::vector<std::uint16_t> length(kMaxCodes);
  for (int i = 0; i < clear; ++i) {
    prefix[i] = 0;
    suffix[i] = static_cast<std::uint8_t>(i);
    length[i] = 1;
  }

  std::vector<std::uint8_t> out;
  out.reserve(expected_pixels);
  std::vector<std::uint8_t> scratch;

  int code_size = min_code_size + 1;
  int next = eoi + 1;
  int prev = -1;
  std::uint32_t acc = 0;
  int nbits = 0;
  std::size_t pos = 0;

  auto emit = [&](int code) {
    scratch.resize(length[code]);
    int c = code;
    for (int i = length[code] - 1; i >= 0; --i) {
      scratch[i] = suffix[c];
      c = prefix[c];
    }
    out.insert(out.end(), scratch.begin(), scratch.end());
    return scratch.front();
  };

  while (out.size() < expected_pixels) {
    while (nbits < code_size && pos < data.size()) {
      acc |= static_cast<std::uint32_t>(data[pos++]) << nbits;
      nbits += 8;
    }
    if (nbits < code_size) break;
    const int code = static_cast<int>(acc & ((1u << code_size) - 1));
    acc >>= code_size;
    nbits -= code_size;

    if (code == clear) {
      code_size = min_code_size + 1;
      next = eoi + 1;
      prev = -1;
      continue;
    }
    if (code == eoi) break;

    if (prev < 0) {
      if (code >= clear) break;  // corrupt: first code must be a literal
      emit(code);
      prev = code;
      continue;
    }

    std::uint8_t first;
    if (code < next) {
      first = emit(code);
    } else if (code == next) {
      // KwKwK case: the string of prev followed by its own first byte.
      scratch.resize(length[prev]);
      int c = prev;
      for (int i = length[prev] - 1; i >= 0; --i) {
        scratch[i] = suffix[c];
        c = prefix[c];
      }
      first = scratch.front();
      out.insert(out.end(), scratch.begin(), scratch.end());
      out.push_back(first);
    } else {
      break;
    }
    if (next < kMaxCodes) {
      prefix[next] = static_cast<std::uint16_t>(prev);
      suffix[next] = first;
      length[next] = static_cast<std::uint16_t>(length[prev] + 1);
      ++next;
      if (next == (1 << code_size) && code_size < kMaxCodeSize) ++code_size;
    }
    prev = code;
  }
  out.resize(expected_pixels, 0);
  return out;
}

std::vector<std::uint8_t> lzw_encode(std::span<const std::uint8_t> indices,
                                     int min_code_size) {
  const int clear = 1 << min_code_size;
  const int eoi = clear + 1;
  BitWriter bits;
  std::unordered_map<std::uint32_t, int> dict;
  int code_size = min_code_size + 1;
  int next = eoi + 1;

  bits.put(clear, code_size);
  if (indices.empty()) {
    bits.put(eoi, code_size);
    return bits.finish();
  }

  int cur = indices[0];
  int codes_since_clear = 0;
  for (std::size_t i = 1; i < indices.size(); ++i) {
    const int k = indices[i];
    const std::uint32_t key = (static_cast<std::uint32_t>(cur) << 8) | k;
    auto it = dict.find(key);
    if (it != dict.end()) {
      cur = it->second;
      continue;
    }
    bits.put(cur, code_size);
    ++codes_since_clear;
    if (next < kMaxCodes) {
      dict.emplace(key, next++);
      if (next > (1 << code_size) && code_size < kMaxCodeSize) ++code_size;
    } else {
      bits.put(clear, code_size);
      dict.clear();
      code_size = min_code_size + 1;
      next = eoi + 1;
      codes_since_clear = 0;
    }
    cur = k;
  }
  bits.put(cur, code_size);
  ++codes_since_clear;
  // The decoder adds one more table entry after reading the final code and
  // may widen its code size before reading EOI.
  if (codes_since_clear >= 2 && next == (1 << code_size) &&
      code_size < kMaxCodeSize) {
    ++code_size;
  }
  bits.put(eoi, code_size);
  return bits.finish();
}

std::vector<DecodedFrame> decode(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  auto sig = in.take(6);
  const std::string magic(sig.begin(), sig.end());
  if (magic != "GIF87a" && magic != "GIF89a") {
    throw DecodeError("gif: bad signature");
  }
  const int screen_w = in.u16();
  const int screen_h = in.u16();
  const int packed = in.u8();
  in.u8();  // background colour index; the canvas starts transparent
  in.u8();  // pixel aspect ratio
  if (screen_w <= 0 || screen_h <= 0) {
    throw DecodeError("gif: zero-sized logical screen");
  }

  Palette global;
  if (packed & 0x80) global = read_palette(in, (packed & 0x07) + 1);

  Image8 canvas{screen_w, screen_h, 4,
                std::vector<std::uint8_t>(
                    static_cast<std::size_t>(screen_w) * screen_h * 4, 0)};

  std::vector<DecodedFrame> frames;
  int disposal = 0;
  int delay = 0;
  int transparent = -1;

  while (!in.done()) {
    const int block = in.u8();
    if (block == 0x3B) break;
    if (block == 0x21) {
      const int label = in.u8();
      if (label == 0xF9) {
        auto gce = in.sub_blocks();
        if (gce.size() >= 4) {
          disposal = (gce[0] >> 2) & 0x07;
          delay = gce[1] | (gce[2] << 8);
          transparent = (gce[0] & 0x01) ? gce[3] : -1;
        }
      } else {
        in.skip_sub_blocks();
      }
      continue;
    }
    if (block != 0x2C) {
      // Stray bytes after the last image are common in the wild.
      if (!frames.empty()) break;
      throw DecodeError("gif: unknown block 0x" + std::to_string(block));
    }

    const int left = in.u16();
    const int top = in.u16();
    const int w = in.u16();
    const int h = in.u16();
    const int ipacked = in.u8();
    Palette local;
    if (ipacked & 0x80) local = read_palette(in, (ipacked & 0x07) + 1);
    const Palette& pal = local.empty() ? global : local;
    const int min_code = in.u8();
    auto lzw = in.sub_blocks();
    const auto indices = lzw_decode(
        lzw, min_code, static_cast<std::size_t>(w) * static_cast<std::size_t>(h));

    Image8 saved;
    if (disposal == 3) saved = canvas;
    draw_image(canvas, pal, indices, left, top, w, h, (ipacked & 0x40) != 0,
               transparent);
    frames.push_back({canvas, delay});

    if (disposal == 2) {
      clear_rect(canvas, left, top, w, h);
    } else if (disposal == 3) {
      canvas = std::move(saved);
    }
    disposal = 0;
    delay = 0;
    transparent = -1;
  }
  return frames;
}

std::vector<std::uint8_t> encode(const std::vector<Image8>& rgb_frames,
                                 int delay_cs) {
  if (rgb_frames.empty()) return {};
  const int w = rgb_frames.front().width;
  const int h = rgb_frames.front().height;

  std::vector<std::uint8_t> out;
  const char* magic = "GIF89a";
  out.insert(out.end(), magic, magic + 6);
  put_u16(out, w);
  put_u16(out, h);
  out.push_back(0x00);  // no global colour table
  out.push_back(0x00);
  out.push_back(0x00);

  // NETSCAPE2.0 application extension: loop forever.
  out.push_back(0x21);
  out.push_back(0xFF);
  out.push_back(0x0B);
  const char* app = "NETSCAPE2.0";
  out.insert(out.end(), app, app + 11);
  out.push_back(0x03);
  out.push_back(0x01);
  put_u16(out, 0);
  out.push_back(0x00);

  std::vector<std::uint8_t> indices;
  for (const Image8& frame : rgb_frames) {
    if (frame.width != w || frame.height != h || frame.channels != 3) {
      throw ParameterError("gif: frames must be RGB and share dimensions");
    }
    Palette pal = index_frame(frame, &indices);
    int table_bits = 1;
    while ((1u << table_bits) < pal.size()) ++table_bits;
    pal.resize(static_cast<std::size_t>(1) << table_bits, {0, 0, 0});

    out.push_back(0x21);
    out.push_back(0xF9);
    out.push_back(0x04);
    out.push_back(0x04);  // disposal: do not dispose
    put_u16(out, delay_cs);
    out.push_back(0x00);
    out.push_back(0x00);

    out.push_back(0x2C);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, w);
    put_u16(out, h);
    out.push_back(static_cast<std::uint8_t>(0x80 | (table_bits - 1)));
    for (const auto& entry : pal) {
      out.insert(out.end(), entry.begin(), entry.end());
    }
    const int min_code = std::max(2, table_bits);
    out.push_back(static_cast<std::uint8_t>(min_code));
    put_sub_blocks(out, lzw_encode(indices, min_code));
  }
  out.push_back(0x3B);
  return out;
}

}  // namespace sketchbetween::gif

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

#include <cstdint>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sketchbetween/error.hpp"
#include "sketchbetween/gif_codec.hpp"

namespace gif = sketchbetween::gif;

namespace {

// Minimal GIF writer used as an independent oracle. Pixel data is written as
// an uncompressed LZW stream: every pixel is a literal code and a clear code
// is re-emitted before the table would widen the code size.
class GifBuilder {
 public:
  GifBuilder(int w, int h, std::vector<std::array<std::uint8_t, 3>> palette)
      : palette_(std::move(palette)) {
    for (char c : std::string("GIF89a")) bytes_.push_back(c);
    u16(w);
    u16(h);
    bits_ = 1;
    while ((1 << bits_) < static_cast<int>(palette_.size())) ++bits_;
    bytes_.push_back(static_cast<std::uint8_t>(0x80 | (bits_ - 1)));
    bytes_.push_back(0);
    bytes_.push_back(0);
    for (int i = 0; i < (1 << bits_); ++i) {
      const auto c = i < static_cast<int>(palette_.size())
                         ? palette_[i]
                         : std::array<std::uint8_t, 3>{0, 0, 0};
      bytes_.insert(bytes_.end(), c.begin(), c.end());
    }
  }

  void frame(int x, int y, int w, int h, const std::vector<int>& indices,
             int disposal = 1, int transparent = -1, bool interlaced = false,
             int delay = 7) {
    bytes_.insert(bytes_.end(), {0x21, 0xF9, 0x04});
    bytes_.push_back(static_cast<std::uint8_t>((disposal << 2) |
                                               (transparent >= 0 ? 1 : 0)));
    u16(delay);
    bytes_.push_back(static_cast<std::uint8_t>(transparent >= 0 ? transparent : 0));
    bytes_.push_back(0);
    bytes_.push_back(0x2C);
    u16(x);
    u16(y);
    u16(w);
    u16(h);
    bytes_.push_back(interlaced ? 0x40 : 0x00);
    const int min_code = std::max(2, bits_);
    bytes_.push_back(static_cast<std::uint8_t>(min_code));
    const auto data = literal_lzw(indices, min_code);
    for (std::size_t i = 0; i < data.size(); i += 255) {
      const std::size_t n = std::min<std::size_t>(255, data.size() - i);
      bytes_.push_back(static_cast<std::uint8_t>(n));
      bytes_.insert(bytes_.end(), data.begin() + i, data.begin() + i + n);
    }
    bytes_.push_back(0);
  }

  std::vector<std::uint8_t> finish() {
    auto out = bytes_;
    out.push_back(0x3B);
    return out;
  }

  static std::vector<std::uint8_t> literal_lzw(const std::vector<int>& idx,
                                               int min_code) {
    const int clear = 1 << min_code;
    const int eoi = clear + 1;
    const int width = min_code + 1;
    // After a clear the decoder adds one table entry per code from the
    // second one on; the code size widens when the table reaches 2^width.
    const int max_run = (1 << width) - (clear + 2);
    std::vector<std::uint8_t> out;
    std::uint32_t acc = 0;
    int nbits = 0;
    auto put = [&](int code) {
      acc |= static_cast<std::uint32_t>(code) << nbits;
      nbits += width;
      while (nbits >= 8) {
        out.push_back(static_cast<std::uint8_t>(acc & 0xFF));
        acc >>= 8;
        nbits -= 8;
      }
    };
    int run = 0;
    put(clear);
    for (int v : idx) {
      if (run == max_run) {
        put(clear);
        run = 0;
      }
      put(v);
      ++run;
    }
    put(eoi);
    if (nbits > 0) out.push_back(static_cast<std::uint8_t>(acc & 0xFF));
    return out;
  }

 private:
  void u16(int v) {
    bytes_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    bytes_.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  }
  std::vector<std::array<std::uint8_t, 3>> palette_;
  std::vector<std::uint8_t> bytes_;
  int bits_ = 1;
};

std::array<int, 4> rgba(const gif::Image8& img, int x, int y) {
  const std::size_t o = (static_cast<std::size_t>(y) * img.width + x) * 4;
  return {img.data[o], img.data[o + 1], img.data[o + 2], img.data[o + 3]};
}

const std::vector<std::array<std::uint8_t, 3>> kPalette = {
    {255, 0, 0}, {0, 255, 0}, {0, 0, 255}, {255, 255, 255}};

}  // namespace

TEST(LzwTest, RoundTripsRandomStreamsAtEveryCodeSize) {
  std::mt19937_64 rng(5);
  for (int min_code = 2; min_code <= 8; ++min_code) {
    for (std::size_t len : {0u, 1u, 2u, 17u, 5000u, 70000u}) {
      std::uniform_int_distribution<int> pick(0, (1 << min_code) - 1);
      std::vector<std::uint8_t> idx(len);
      // Mix random noise with long runs so the table both fills and resets.
      for (std::size_t i = 0; i < len; ++i) {
        idx[i] = (i / 300) % 2 ? static_cast<std::uint8_t>(pick(rng))
                               : static_cast<std::uint8_t>((i / 40) % 3);
      }
      const auto packed = gif::lzw_encode(idx, min_code);
      const auto back = gif::lzw_decode(packed, min_code, len);
      ASSERT_EQ(back, idx) << "min_code " << min_code << " len " << len;
    }
  }
}

TEST(LzwTest, DecodesLiteralOnlyStreams) {
  std::vector<int> idx;
  std::vector<std::uint8_t> expect;
  for (int i = 0; i < 1000; ++i) {
    idx.push_back((i * 7) % 4);
    expect.push_back(static_cast<std::uint8_t>((i * 7) % 4));
  }
  const auto data = GifBuilder::literal_lzw(idx, 2);
  EXPECT_EQ(gif::lzw_decode(data, 2, idx.size()), expect);
}

TEST(GifDecodeTest, ReadsHandBuiltFrame) {
  GifBuilder b(3, 2, kPalette);
  b.frame(0, 0, 3, 2, {0, 1, 2, 3, 2, 1}, 1, -1, false, 12);
  const auto frames = gif::decode(b.finish());
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].delay_cs, 12);
  const auto& c = frames[0].canvas;
  ASSERT_EQ(c.width, 3);
  ASSERT_EQ(c.height, 2);
  EXPECT_EQ(rgba(c, 0, 0), (std::array<int, 4>{255, 0, 0, 255}));
  EXPECT_EQ(rgba(c, 1, 0), (std::array<int, 4>{0, 255, 0, 255}));
  EXPECT_EQ(rgba(c, 2, 0), (std::array<int, 4>{0, 0, 255, 255}));
  EXPECT_EQ(rgba(c, 0, 1), (std::array<int, 4>{255, 255, 255, 255}));
}

TEST(GifDecodeTest, TransparentPixelsStayClear) {
  GifBuilder b(2, 2, kPalette);
  b.frame(0, 0, 2, 2, {3, 3, 3, 0}, 1, 3);
  const auto frames = gif::decode(b.finish());
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(rgba(frames[0].canvas, 0, 0)[3], 0);
  EXPECT_EQ(rgba(frames[0].canvas, 1, 1), (std::array<int, 4>{255, 0, 0, 255}));
}

TEST(GifDecodeTest, DisposalModes) {
  // Frame 1 paints red everywhere. Frame 2 paints green in the top-left
  // pixel. Frame 3 paints nothing visible (fully transparent 1x1 patch).
  for (int disposal : {1, 2, 3}) {
    GifBuilder b(2, 2, kPalette);
    b.frame(0, 0, 2, 2, {0, 0, 0, 0}, 1);
    b.frame(0, 0, 1, 1, {1}, disposal);
    b.frame(1, 1, 1, 1, {3}, 1, 3);
    const auto frames = gif::decode(b.finish());
    ASSERT_EQ(frames.size(), 3u);
    EXPECT_EQ(rgba(frames[1].canvas, 0, 0), (std::array<int, 4>{0, 255, 0, 255}));
    const auto after = rgba(frames[2].canvas, 0, 0);
    if (disposal == 1) {
      EXPECT_EQ(after, (std::array<int, 4>{0, 255, 0, 255}));
    } else if (disposal == 2) {
      EXPECT_EQ(after[3], 0);
    } else {
      EXPECT_EQ(after, (std::array<int, 4>{255, 0, 0, 255}));
    }
    EXPECT_EQ(rgba(frames[2].canvas, 1, 0), (std::array<int, 4>{255, 0, 0, 255}));
  }
}

TEST(GifDecodeTest, InterlacedRowsLandInPlace) {
  const int h = 11;
  // Rows in transmission order: 0,8 | 4 | 2,6,10 | 1,3,5,7,9
  const std::vector<int> order = {0, 8, 4, 2, 6, 10, 1, 3, 5, 7, 9};
  std::vector<int> idx;
  for (int row : order) {
    idx.push_back(row % 4);
    idx.push_back(row % 4);
  }
  GifBuilder b(2, h, kPalette);
  b.frame(0, 0, 2, h, idx, 1, -1, true);
  const auto frames = gif::decode(b.finish());
  ASSERT_EQ(frames.size(), 1u);
  for (int y = 0; y < h; ++y) {
    const auto& c = kPalette[y % 4];
    EXPECT_EQ(rgba(frames[0].canvas, 1, y),
              (std::array<int, 4>{c[0], c[1], c[2], 255}))
        << "row " << y;
  }
}

TEST(GifDecodeTest, RejectsGarbage) {
  const std::vector<std::uint8_t> junk = {'N', 'O', 'T', 'G', 'I', 'F', 0, 0};
  EXPECT_THROW(gif::decode(junk), sketchbetween::DecodeError);
  const std::vector<std::uint8_t> cut = {'G', 'I', 'F', '8', '9', 'a', 4};
  EXPECT_THROW(gif::decode(cut), sketchbetween::DecodeError);
}

TEST(GifEncodeTest, ExactForSmallPalettes) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pick(0, 199);
  std::vector<std::array<std::uint8_t, 3>> colours(200);
  for (auto& c : colours) {
    for (auto& v : c) v = static_cast<std::uint8_t>(rng() & 0xFF);
  }
  std::vector<gif::Image8> frames(4);
  for (auto& f : frames) {
    f.width = 37;
    f.height = 21;
    f.channels = 3;
    for (int i = 0; i < f.width * f.height; ++i) {
      const auto& c = colours[pick(rng)];
      f.data.insert(f.data.end(), c.begin(), c.end());
    }
  }
  const auto decoded = gif::decode(gif::encode(frames, 9));
  ASSERT_EQ(decoded.size(), frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    EXPECT_EQ(decoded[k].delay_cs, 9);
    for (int i = 0; i < 37 * 21; ++i) {
      for (int c = 0; c < 3; ++c) {
        ASSERT_EQ(decoded[k].canvas.data[i * 4 + c], frames[k].data[i * 3 + c]);
      }
      ASSERT_EQ(decoded[k].canvas.data[i * 4 + 3], 255);
    }
  }
}

TEST(GifEncodeTest, ManyColoursStayClose) {
  std::mt19937_64 rng(10);
  gif::Image8 f;
  f.width = f.height = 64;
  f.channels = 3;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      f.data.push_back(static_cast<std::uint8_t>(x * 4));
      f.data.push_back(static_cast<std::uint8_t>(y * 4));
      f.data.push_back(static_cast<std::uint8_t>((x + y) * 2));
    }
  }
  const auto decoded = gif::decode(gif::encode({f}, 10));
  ASSERT_EQ(decoded.size(), 1u);
  double err = 0.0;
  for (int i = 0; i < 64 * 64; ++i) {
    for (int c = 0; c < 3; ++c) {
      err += std::abs(decoded[0].canvas.data[i * 4 + c] - f.data[i * 3 + c]);
    }
  }
  EXPECT_LT(err / (64 * 64 * 3), 8.0);
}

TEST(GifEncodeTest, RejectsMismatchedFrames) {
  gif::Image8 a{2, 2, 3, std::vector<std::uint8_t>(12)};
  gif::Image8 b{3, 2, 3, std::vector<std::uint8_t>(18)};
  EXPECT_THROW(gif::encode({a, b}, 10), sketchbetween::ParameterError);
}

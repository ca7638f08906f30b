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

#include "sketchbetween/canny.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "sketchbetween/error.hpp"
#include "sketchbetween/media_io.hpp"

namespace sketchbetween {
namespace {

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

// tan(22.5 deg) in Q15, as in most Canny implementations.
constexpr std::int64_t kTan22Q15 = 13573;

}  // namespace

Gray8 to_gray8(const Frame& frame) {
  Gray8 out{frame.height, frame.width,
            std::vector<std::uint8_t>(
                static_cast<std::size_t>(frame.height) * frame.width)};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double luma = 0.299 * to_byte(frame.pixels[i * 3]) +
                        0.587 * to_byte(frame.pixels[i * 3 + 1]) +
                        0.114 * to_byte(frame.pixels[i * 3 + 2]);
    out.values[i] = static_cast<std::uint8_t>(
        std::clamp(static_cast<int>(std::lround(luma)), 0, 255));
  }
  return out;
}

double gaussian_sigma_for_aperture(int kernel_size) {
  return 0.3 * ((kernel_size - 1) * 0.5 - 1.0) + 0.8;
}

std::vector<int> gaussian_taps_fixed(int kernel_size) {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw ParameterError("gaussian aperture must be a positive odd integer");
  }
  const double sigma = gaussian_sigma_for_aperture(kernel_size);
  const int r = kernel_size / 2;
  std::vector<double> w(kernel_size);
  double sum = 0.0;
  for (int i = 0; i < kernel_size; ++i) {
    const double d = i - r;
    w[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += w[i];
  }
  std::vector<int> taps(kernel_size);
  int total = 0;
  for (int i = 0; i < kernel_size; ++i) {
    taps[i] = static_cast<int>(std::lround(w[i] / sum * 256.0));
    total += taps[i];
  }
  taps[r] += 256 - total;
  return taps;
}

Gray8 gaussian_blur(const Gray8& image, int kernel_size) {
  const auto taps = gaussian_taps_fixed(kernel_size);
  const int r = kernel_size / 2;
  const int h = image.height, w = image.width;

  std::vector<std::int32_t> horiz(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int32_t acc = 0;
      for (int k = -r; k <= r; ++k) {
        acc += taps[k + r] * image.at(y, reflect101(x + k, w));
      }
      horiz[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }

  Gray8 out{h, w, std::vector<std::uint8_t>(horiz.size())};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int64_t acc = 0;
      for (int k = -r; k <= r; ++k) {
        acc += static_cast<std::int64_t>(taps[k + r]) *
               horiz[static_cast<std::size_t>(reflect101(y + k, h)) * w + x];
      }
      const std::int64_t v = (acc + (1 << 15)) >> 16;
      out.values[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(std::clamp<std::int64_t>(v, 0, 255));
    }
  }
  return out;
}

Gray8 canny_from_smoothed(const Gray8& img, const CannyThresholds& t) {
  if (t.low < 0 || t.high < t.low) {
    throw ParameterError("canny: need 0 <= low <= high");
  }
  const int h = img.height, w = img.width;
  const auto idx = [w](int y, int x) {
    return static_cast<std::size_t>(y) * w + x;
  };
  auto px = [&](int y, int x) {
    return static_cast<int>(img.at(reflect101(y, h), reflect101(x, w)));
  };

  std::vector<int> gx(static_cast<std::size_t>(h) * w);
  std::vector<int> gy(gx.size());
  std::vector<int> mag(gx.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int dx = (px(y - 1, x + 1) + 2 * px(y, x + 1) + px(y + 1, x + 1)) -
                     (px(y - 1, x - 1) + 2 * px(y, x - 1) + px(y + 1, x - 1));
      const int dy = (px(y + 1, x - 1) + 2 * px(y + 1, x) + px(y + 1, x + 1)) -
                     (px(y - 1, x - 1) + 2 * px(y - 1, x) + px(y - 1, x + 1));
      gx[idx(y, x)] = dx;
      gy[idx(y, x)] = dy;
      mag[idx(y, x)] = std::abs(dx) + std::abs(dy);
    }
  }
  auto mag_at = [&](int y, int x) {
    if (y < 0 || y >= h || x < 0 || x >= w) return 0;
    return mag[idx(y, x)];
  };

  // 0 = suppressed, 1 = weak candidate, 2 = strong seed.
  std::vector<std::uint8_t> state(gx.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int m = mag[idx(y, x)];
      if (m <= t.low) continue;
      const std::int64_t ax = std::abs(gx[idx(y, x)]);
      const std::int64_t ay = static_cast<std::int64_t>(std::abs(gy[idx(y, x)]))
                              << 15;
      const std::int64_t tg22 = ax * kTan22Q15;
      int a, b;
      if (ay < tg22) {
        a = mag_at(y, x - 1);
        b = mag_at(y, x + 1);
      } else if (ay > tg22 + (ax << 16)) {
        a = mag_at(y - 1, x);
        b = mag_at(y + 1, x);
      } else {
        const int s = ((gx[idx(y, x)] ^ gy[idx(y, x)]) < 0) ? -1 : 1;
        a = mag_at(y - 1, x - s);
        b = mag_at(y + 1, x + s);
      }
      // Symmetric tie rule: plateaus keep both pixels so the result commutes
      // with mirroring.
      if (m >= std::max(a, b) && m > std::min(a, b)) {
        state[idx(y, x)] = m > t.high ? 2 : 1;
      }
    }
  }

  Gray8 out{h, w, std::vector<std::uint8_t>(gx.size(), 0)};
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 2) {
      out.values[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int y = static_cast<int>(i / w), x = static_cast<int>(i % w);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int ny = y + dy, nx = x + dx;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const std::size_t j = idx(ny, nx);
        if (state[j] != 0 && out.values[j] == 0) {
          out.values[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return out;
}

}  // namespace sketchbetween

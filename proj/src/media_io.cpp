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

#include "sketchbetween/media_io.hpp"

#include <cctype>
#include <cstdio>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <opencv2/imgcodecs.hpp>

#include "sketchbetween/error.hpp"
#include "sketchbetween/gif_codec.hpp"

namespace fs = std::filesystem;

namespace sketchbetween {
namespace {

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Frame composite_rgba(const gif::Image8& rgba) {
  Frame f(rgba.height, rgba.width);
  const std::size_t npix = static_cast<std::size_t>(rgba.width) * rgba.height;
  for (std::size_t i = 0; i < npix; ++i) {
    const std::uint8_t* p = &rgba.data[i * 4];
    const float alpha = p[3] / 255.0f;
    for (int c = 0; c < 3; ++c) {
      f.pixels[i * 3 + c] = (p[c] / 255.0f) * alpha + (1.0f - alpha);
    }
  }
  return f;
}

bool is_png(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png";
}

AnimationClip decode_png_directory(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_png(entry.path())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  AnimationClip clip;
  clip.source_id = dir.filename().string();
  for (const auto& f : files) clip.frames.push_back(read_image(f));
  return clip;
}

AnimationClip decode_gif_file(const fs::path& path) {
  const auto bytes = read_file(path);
  const auto decoded = gif::decode(bytes);
  AnimationClip clip;
  clip.source_id = path.stem().string();
  if (!decoded.empty() && decoded.front().delay_cs > 0) {
    clip.fps = 100.0 / decoded.front().delay_cs;
  }
  clip.frames.reserve(decoded.size());
  for (const auto& d : decoded) clip.frames.push_back(composite_rgba(d.canvas));
  return clip;
}

}  // namespace

AnimationClip decode_animation(const fs::path& path) {
  std::error_code ec;
  AnimationClip clip;
  if (fs::is_directory(path, ec)) {
    clip = decode_png_directory(path);
  } else if (fs::is_regular_file(path, ec)) {
    clip = decode_gif_file(path);
  } else {
    throw DecodeError("cannot read animation '" + path.string() + "'");
  }
  if (clip.frames.empty()) {
    throw EmptyClipError("'" + path.string() + "' contains no frames");
  }
  for (Frame& f : clip.frames) f = resize_to_canonical(f);
  return clip;
}

fs::path frames_directory_for(const fs::path& gif) {
  return gif.parent_path() / (gif.stem().string() + "_frames");
}

void encode_animation(const AnimationClip& clip, const fs::path& path,
                      double fps) {
  validate_clip(clip);
  if (!(fps > 0.0)) throw ParameterError("encode_animation: fps must be > 0");

  std::vector<gif::Image8> rgb;
  rgb.reserve(clip.frames.size());
  for (const Frame& f : clip.frames) {
    gif::Image8 img{f.width, f.height, 3, std::vector<std::uint8_t>(f.size())};
    std::transform(f.pixels.begin(), f.pixels.end(), img.data.begin(), to_byte);
    rgb.push_back(std::move(img));
  }
  const int delay_cs =
      std::max(1, static_cast<int>(std::lround(100.0 / fps)));
  const auto bytes = gif::encode(rgb, delay_cs);

  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path.string() + "'");
  }

  const fs::path dir = frames_directory_for(path);
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "'");
  // Stale frames from a longer earlier clip would otherwise be picked up.
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_png(entry.path())) {
      fs::remove(entry.path(), ec);
    }
  }
  for (std::size_t i = 0; i < clip.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu.png", i);
    write_png(clip.frames[i], dir / name);
  }
}

Frame pad_to_square(const Frame& frame, float fill) {
  if (frame.height == frame.width) return frame;
  const int side = std::max(frame.height, frame.width);
  Frame out(side, side, fill);
  const int top = (side - frame.height) / 2;
  const int left = (side - frame.width) / 2;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(y + top, x + left, c) = frame.at(y, x, c);
      }
    }
  }
  return out;
}

Frame resize_bilinear(const Frame& frame, int out_h, int out_w) {
  if (frame.empty() || out_h <= 0 || out_w <= 0) {
    throw ParameterError("resize: zero-area image");
  }
  if (frame.height == out_h && frame.width == out_w) return frame;

  struct Tap {
    int i0, i1;
    float w1;
  };
  auto taps = [](int in, int out) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / out;
    for (int o = 0; o < out; ++o) {
      double src = (o + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const int i0 = static_cast<int>(std::floor(src));
      const int i1 = std::min(i0 + 1, in - 1);
      t[o] = {i0, i1, static_cast<float>(src - i0)};
    }
    return t;
  };
  const auto ty = taps(frame.height, out_h);
  const auto tx = taps(frame.width, out_w);

  Frame out(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    const Tap& vy = ty[y];
    for (int x = 0; x < out_w; ++x) {
      const Tap& vx = tx[x];
      for (int c = 0; c < 3; ++c) {
        const float top = frame.at(vy.i0, vx.i0, c) * (1.0f - vx.w1) +
                          frame.at(vy.i0, vx.i1, c) * vx.w1;
        const float bottom = frame.at(vy.i1, vx.i0, c) * (1.0f - vx.w1) +
                             frame.at(vy.i1, vx.i1, c) * vx.w1;
        out.at(y, x, c) = top * (1.0f - vy.w1) + bottom * vy.w1;
      }
    }
  }
  return out;
}

Frame resize_to_canonical(const Frame& frame) {
  if (frame.empty()) throw ParameterError("resize_to_canonical: zero-area frame");
  if (frame.is_canonical()) return frame;
  return resize_bilinear(pad_to_square(frame), kCanonicalSize, kCanonicalSize);
}

Frame read_image(const fs::path& path) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw DecodeError("cannot decode image '" + path.string() + "'");

  double scale = 1.0 / 255.0;
  if (img.depth() == CV_16U) {
    scale = 1.0 / 65535.0;
  } else if (img.depth() != CV_8U) {
    throw DecodeError("unsupported bit depth in '" + path.string() + "'");
  }
  cv::Mat f32;
  img.convertTo(f32, CV_32F, scale);

  const int ch = f32.channels();
  Frame out(f32.rows, f32.cols);
  for (int y = 0; y < f32.rows; ++y) {
    const float* row = f32.ptr<float>(y);
    for (int x = 0; x < f32.cols; ++x) {
      const float* p = row + static_cast<std::ptrdiff_t>(x) * ch;
      float r, g, b, a = 1.0f;
      if (ch == 1 || ch == 2) {
        r = g = b = p[0];
        if (ch == 2) a = p[1];
      } else {
        // OpenCV stores BGR(A).
        b = p[0];
        g = p[1];
        r = p[2];
        if (ch == 4) a = p[3];
      }
      out.at(y, x, 0) = r * a + (1.0f - a);
      out.at(y, x, 1) = g * a + (1.0f - a);
      out.at(y, x, 2) = b * a + (1.0f - a);
    }
  }
  return out;
}

void write_png(const Frame& frame, const fs::path& path) {
  cv::Mat img(frame.height, frame.width, CV_8UC3);
  for (int y = 0; y < frame.height; ++y) {
    auto* row = img.ptr<std::uint8_t>(y);
    for (int x = 0; x < frame.width; ++x) {
      row[x * 3 + 0] = to_byte(frame.at(y, x, 2));
      row[x * 3 + 1] = to_byte(frame.at(y, x, 1));
      row[x * 3 + 2] = to_byte(frame.at(y, x, 0));
    }
  }
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), img);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write '" + path.string() + "': " + e.what());
  }
  if (!ok) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace sketchbetween

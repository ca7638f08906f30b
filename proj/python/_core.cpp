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

// Python bindings. Frames cross the boundary as float32 arrays of shape
// [H, W, 3] and clips as [T, H, W, 3], values in [0, 1].

#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sketchbetween/checkpoint.hpp"
#include "sketchbetween/cli.hpp"
#include "sketchbetween/error.hpp"
#include "sketchbetween/media_io.hpp"
#include "sketchbetween/metrics.hpp"
#include "sketchbetween/sketchgen.hpp"
#include "sketchbetween/tensor_convert.hpp"
#include "sketchbetween/vqvae.hpp"

namespace py = pybind11;
namespace sb = sketchbetween;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

sb::Frame to_frame(const FloatArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw sb::ShapeError("expected a float array of shape [H, W, 3]");
  }
  sb::Frame f(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), f.pixels.begin());
  return f;
}

FloatArray from_frame(const sb::Frame& f) {
  FloatArray a(std::vector<py::ssize_t>{f.height, f.width, 3});
  std::copy(f.pixels.begin(), f.pixels.end(), a.mutable_data());
  return a;
}

std::vector<sb::Frame> to_frames(const FloatArray& a) {
  if (a.ndim() != 4 || a.shape(3) != 3) {
    throw sb::ShapeError("expected a float array of shape [T, H, W, 3]");
  }
  const auto h = static_cast<int>(a.shape(1)), w = static_cast<int>(a.shape(2));
  const std::size_t per = static_cast<std::size_t>(h) * w * 3;
  std::vector<sb::Frame> frames;
  for (py::ssize_t t = 0; t < a.shape(0); ++t) {
    sb::Frame f(h, w);
    std::copy(a.data() + t * per, a.data() + (t + 1) * per, f.pixels.begin());
    frames.push_back(std::move(f));
  }
  return frames;
}

FloatArray from_frames(const std::vector<sb::Frame>& frames) {
  if (frames.empty()) return FloatArray(std::vector<py::ssize_t>{0, 0, 0, 3});
  const int h = frames[0].height, w = frames[0].width;
  FloatArray a({static_cast<py::ssize_t>(frames.size()), static_cast<py::ssize_t>(h),
                static_cast<py::ssize_t>(w), py::ssize_t{3}});
  float* out = a.mutable_data();
  for (const auto& f : frames) out = std::copy(f.pixels.begin(), f.pixels.end(), out);
  return a;
}

sb::SketchParams sketch_params(const std::vector<int>& kernels, int low, int high) {
  sb::SketchParams p;
  p.kernel_sizes = kernels;
  p.thresholds.low = low;
  p.thresholds.high = high;
  return p;
}

// A loaded checkpoint in eval mode.
class Model {
 public:
  explicit Model(const std::filesystem::path& path)
      : state_(sb::load_checkpoint(path)) {
    state_.net->eval();
  }

  int window_length() const { return state_.config.window_length; }

  // [N, 128, 128, 3] model input -> [N, 128, 128, 3] reconstruction.
  FloatArray predict(const FloatArray& window) {
    const auto frames = to_frames(window);
    std::vector<sb::Frame> result;
    {
      py::gil_scoped_release release;
      torch::NoGradGuard no_grad;
      result = sb::tensor_to_frames(
          sb::forward(state_, sb::frames_to_tensor(frames)).reconstruction);
    }
    return from_frames(result);
  }

 private:
  sb::ModelState state_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "sketchbetween native core";

  py::register_exception<sb::Error>(m, "SketchbetweenError", PyExc_RuntimeError);

  m.def(
      "decode_animation",
      [](const std::filesystem::path& path) {
        const auto clip = sb::decode_animation(path);
        return py::make_tuple(from_frames(clip.frames), clip.fps);
      },
      py::arg("path"), "Decode a GIF or PNG frame directory to ([T, H, W, 3], fps).");

  m.def(
      "encode_animation",
      [](const FloatArray& frames, const std::filesystem::path& path, double fps) {
        sb::AnimationClip clip;
        clip.frames = to_frames(frames);
        clip.source_id = path.stem().string();
        clip.fps = fps;
        sb::encode_animation(clip, path, fps);
      },
      py::arg("frames"), py::arg("path"), py::arg("fps") = 10.0,
      "Write a GIF plus a sibling directory of lossless PNG frames.");

  m.def(
      "resize_to_canonical",
      [](const FloatArray& frame) { return from_frame(sb::resize_to_canonical(to_frame(frame))); },
      py::arg("frame"));

  m.def(
      "synthesize_sketch",
      [](const FloatArray& frame, const std::vector<int>& kernels, int low, int high) {
        return from_frame(sb::synthesize_sketch(to_frame(frame), sketch_params(kernels, low, high)));
      },
      py::arg("frame"), py::arg("kernel_sizes") = std::vector<int>{3, 5, 7, 9},
      py::arg("low") = sb::CannyThresholds{}.low, py::arg("high") = sb::CannyThresholds{}.high,
      "Dark strokes on white from averaged multi-scale Canny edges.");

  m.def(
      "canny_edges",
      [](const FloatArray& frame, int kernel_size, int low, int high) {
        const auto e = sb::canny_edges(to_frame(frame), kernel_size, {low, high});
        py::array_t<float> a(std::vector<py::ssize_t>{e.height, e.width});
        std::copy(e.values.begin(), e.values.end(), a.mutable_data());
        return a;
      },
      py::arg("frame"), py::arg("kernel_size"), py::arg("low") = sb::CannyThresholds{}.low,
      py::arg("high") = sb::CannyThresholds{}.high);

  m.def(
      "ssim",
      [](const FloatArray& a, const FloatArray& b) { return sb::ssim(to_frame(a), to_frame(b)); },
      py::arg("a"), py::arg("b"));
  m.def(
      "psnr",
      [](const FloatArray& a, const FloatArray& b) { return sb::psnr(to_frame(a), to_frame(b)); },
      py::arg("a"), py::arg("b"));

  py::class_<Model>(m, "Model")
      .def(py::init<const std::filesystem::path&>(), py::arg("checkpoint"))
      .def_property_readonly("window_length", &Model::window_length)
      .def("predict", &Model::predict, py::arg("window"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"sketchbetween"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = sb::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a command line invocation; returns (exit_code, stdout, stderr).");
}

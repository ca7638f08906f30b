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

#include "sketchbetween/tensor_convert.hpp"

#include <cstring>
#include <torch/torch.h>

#include "sketchbetween/error.hpp"

namespace sketchbetween {

torch::Tensor frame_to_tensor(const Frame& frame, torch::Dtype dtype) {
  auto hwc = torch::from_blob(const_cast<float*>(frame.pixels.data()),
                              {frame.height, frame.width, 3}, torch::kFloat32);
  return hwc.permute({2, 0, 1}).to(dtype).contiguous();
}

torch::Tensor frames_to_tensor(std::span<const Frame> frames,
                               torch::Dtype dtype) {
  if (frames.empty()) throw ShapeError("frames_to_tensor: no frames");
  std::vector<torch::Tensor> planes;
  planes.reserve(frames.size());
  for (const Frame& f : frames) {
    if (f.height != frames.front().height || f.width != frames.front().width) {
      throw ShapeError("frames_to_tensor: mixed frame sizes");
    }
    planes.push_back(frame_to_tensor(f, dtype));
  }
  return torch::stack(planes, 1);
}

Frame tensor_to_frame(const torch::Tensor& chw) {
  if (chw.dim() != 3 || chw.size(0) != 3) {
    throw ShapeError("tensor_to_frame: expected [3, H, W]");
  }
  auto hwc = chw.detach().to(torch::kCPU, torch::kFloat32).permute({1, 2, 0})
                 .contiguous();
  Frame f(static_cast<int>(hwc.size(0)), static_cast<int>(hwc.size(1)));
  std::memcpy(f.pixels.data(), hwc.data_ptr<float>(),
              f.pixels.size() * sizeof(float));
  return f;
}

std::vector<Frame> tensor_to_frames(const torch::Tensor& cthw) {
  if (cthw.dim() != 4 || cthw.size(0) != 3) {
    throw ShapeError("tensor_to_frames: expected [3, T, H, W]");
  }
  std::vector<Frame> out;
  out.reserve(cthw.size(1));
  for (int64_t t = 0; t < cthw.size(1); ++t) {
    out.push_back(tensor_to_frame(cthw.select(1, t)));
  }
  return out;
}

std::pair<torch::Tensor, torch::Tensor> stack_examples(
    std::span<const Example> examples) {
  if (examples.empty()) throw ShapeError("stack_examples: empty batch");
  std::vector<torch::Tensor> inputs, targets;
  for (const Example& ex : examples) {
    inputs.push_back(frames_to_tensor(ex.input.frames));
    targets.push_back(frames_to_tensor(ex.target));
  }
  return {torch::stack(inputs), torch::stack(targets)};
}

}  // namespace sketchbetween

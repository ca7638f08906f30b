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

#ifndef SKETCHBETWEEN_TENSOR_CONVERT_HPP_
#define SKETCHBETWEEN_TENSOR_CONVERT_HPP_

#include <span>
#include <vector>

#include <torch/types.h>

#include "sketchbetween/dataset.hpp"
#include "sketchbetween/frame.hpp"

namespace sketchbetween {

// Frame (H, W, RGB interleaved) -> float tensor [3, H, W].
torch::Tensor frame_to_tensor(const Frame& frame,
                              torch::Dtype dtype = torch::kFloat32);

// Stack of frames -> [3, T, H, W], the per-sample layout the network uses.
torch::Tensor frames_to_tensor(std::span<const Frame> frames,
                               torch::Dtype dtype = torch::kFloat32);

// [3, H, W] -> Frame.
Frame tensor_to_frame(const torch::Tensor& chw);

// [3, T, H, W] -> T frames.
std::vector<Frame> tensor_to_frames(const torch::Tensor& cthw);

// Examples -> ([B, 3, T, H, W] inputs, [B, 3, T, H, W] targets).
std::pair<torch::Tensor, torch::Tensor> stack_examples(
    std::span<const Example> examples);

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_TENSOR_CONVERT_HPP_

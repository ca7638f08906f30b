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

#ifndef SKETCHBETWEEN_VQVAE_HPP_
#define SKETCHBETWEEN_VQVAE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <torch/torch.h>

namespace sketchbetween {

struct ModelConfig {
  int window_length = 5;    // N
  int embedding_dim = 8;    // D
  int codebook_size = 256;  // C
  std::vector<int> encoder_filters{32, 64, 64, 128, 64, 8};
  std::vector<int> decoder_filters{128, 64, 64, 64, 32, 16, 3};
  double commitment_beta = 0.25;
  std::uint64_t seed = 0;

  // Six encoder layers ending at D, seven decoder layers ending at 3.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Encoder: 3x3x3 convs (first two strided 2 in y and x), then two 1x1x1
// projections down to D. Decoder: transposed convs mirroring the strides,
// a 1x1x1 second-to-last layer and a 3x3x3 output layer. Every hidden layer
// is conv -> ReLU -> BatchNorm.
class VqVaeImpl : public torch::nn::Module {
 public:
  explicit VqVaeImpl(const ModelConfig& config);

  // [B, 3, T, H, W] -> [B, D, T, H/4, W/4]
  torch::Tensor encode(const torch::Tensor& x);
  // [B, D, T, h, w] -> [B, 3, T, 4h, 4w], sigmoid output
  torch::Tensor decode(const torch::Tensor& z);

  std::vector<torch::nn::Conv3d> encoder_convs;
  std::vector<torch::nn::BatchNorm3d> encoder_norms;
  std::vector<torch::nn::ConvTranspose3d> decoder_convs;
  std::vector<torch::nn::BatchNorm3d> decoder_norms;
  torch::Tensor codebook;  // [C, D]
};
TORCH_MODULE(VqVae);

// Weights, codebook, config and optimizer slots. `net` is a shared handle;
// copying a ModelState aliases the same parameters.
struct ModelState {
  ModelConfig config;
  VqVae net{nullptr};
  std::int64_t step = 0;
  std::map<std::string, torch::Tensor> optimizer_slots;
};

// Fan-in scaled uniform conv weights and codebook rows uniform in
// [-1/C, 1/C], all drawn from a generator seeded with config.seed.
ModelState init_model(const ModelConfig& config);

struct QuantizeResult {
  torch::Tensor quantized;        // straight-through: forward = codebook rows
  torch::Tensor indices;          // int64, [B, T, h, w]
  torch::Tensor codebook_loss;    // mean ||sg(z) - e||^2
  torch::Tensor commitment_loss;  // mean ||z - sg(e)||^2
};

// Nearest codebook row per latent vector (squared Euclidean, lowest index
// wins ties).
QuantizeResult quantize(const torch::Tensor& latent,
                        const torch::Tensor& codebook);

// Exhaustive nearest-row search on [M, D] vectors in double precision.
std::vector<std::int64_t> nearest_codes(const torch::Tensor& vectors,
                                        const torch::Tensor& codebook);

torch::Tensor encode(ModelState& state, const torch::Tensor& input);
torch::Tensor decode(ModelState& state, const torch::Tensor& quantized);

struct ForwardResult {
  torch::Tensor reconstruction;  // [B, 3, T, H, W]
  QuantizeResult vq;
};

// encode -> quantize -> decode. Accepts [3, T, H, W] or [B, 3, T, H, W].
ForwardResult forward(ModelState& state, const torch::Tensor& input);

// Number of codebook rows that `indices` never selects.
std::int64_t count_unused_codes(const torch::Tensor& usage_counts);

// Ordered (name, tensor) pairs of every parameter and buffer.
std::vector<std::pair<std::string, torch::Tensor>> named_state(
    const ModelState& state);

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_VQVAE_HPP_

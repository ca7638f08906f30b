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

#include "sketchbetween/vqvae.hpp"

#include <limits>
#include <cmath>
#include <random>
#include <set>

#include "sketchbetween/error.hpp"

namespace sketchbetween {
namespace {

constexpr int kEncoderLayers = 6;
constexpr int kDecoderLayers = 7;

bool encoder_strided(int layer) { return layer < 2; }
int encoder_kernel(int layer) { return layer < 4 ? 3 : 1; }
bool decoder_strided(int layer) { return layer < 2; }
int decoder_kernel(int layer) { return layer == kDecoderLayers - 2 ? 1 : 3; }

void fill_uniform(torch::Tensor t, double bound, std::mt19937_64& rng) {
  torch::NoGradGuard guard;
  auto cpu = torch::empty(t.sizes(), torch::kFloat32);
  std::uniform_real_distribution<double> dist(-bound, bound);
  float* p = cpu.data_ptr<float>();
  for (int64_t i = 0; i < cpu.numel(); ++i) p[i] = static_cast<float>(dist(rng));
  t.copy_(cpu);
}

void check_latent(const torch::Tensor& t, int64_t depth, const char* what) {
  if (t.dim() != 5 || t.size(1) != depth) {
    throw ShapeError(std::string(what) + ": expected [B, " +
                     std::to_string(depth) + ", T, h, w] tensor");
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (window_length < 3) throw ConfigError("model.window_length must be >= 3");
  if (embedding_dim < 1) throw ConfigError("model.embedding_dim must be >= 1");
  if (codebook_size < 2) throw ConfigError("model.codebook_size must be >= 2");
  if (static_cast<int>(encoder_filters.size()) != kEncoderLayers) {
    throw ConfigError("model.encoder_filters must list 6 layers");
  }
  if (static_cast<int>(decoder_filters.size()) != kDecoderLayers) {
    throw ConfigError("model.decoder_filters must list 7 layers");
  }
  for (int f : encoder_filters) {
    if (f < 1) throw ConfigError("model.encoder_filters must be positive");
  }
  for (int f : decoder_filters) {
    if (f < 1) throw ConfigError("model.decoder_filters must be positive");
  }
  if (encoder_filters.back() != embedding_dim) {
    throw ConfigError("encoder must end at embedding_dim");
  }
  if (decoder_filters.back() != 3) {
    throw ConfigError("decoder must end at 3 channels");
  }
  if (!(commitment_beta >= 0.0)) {
    throw ConfigError("model.commitment_beta must be >= 0");
  }
}

VqVaeImpl::VqVaeImpl(const ModelConfig& config) {
  config.validate();
  int in = 3;
  for (int i = 0; i < kEncoderLayers; ++i) {
    const int k = encoder_kernel(i);
    const int s = encoder_strided(i) ? 2 : 1;
    auto conv = torch::nn::Conv3d(
        torch::nn::Conv3dOptions(in, config.encoder_filters[i], k)
            .stride({1, s, s})
            .padding(k / 2));
    encoder_convs.push_back(
        register_module("encoder_conv" + std::to_string(i), conv));
    if (i + 1 < kEncoderLayers) {
      encoder_norms.push_back(register_module(
          "encoder_bn" + std::to_string(i),
          torch::nn::BatchNorm3d(config.encoder_filters[i])));
    }
    in = config.encoder_filters[i];
  }
  in = config.embedding_dim;
  for (int i = 0; i < kDecoderLayers; ++i) {
    const int k = decoder_kernel(i);
    const int s = decoder_strided(i) ? 2 : 1;
    auto deconv = torch::nn::ConvTranspose3d(
        torch::nn::ConvTranspose3dOptions(in, config.decoder_filters[i], k)
            .stride({1, s, s})
            .padding(k / 2)
            .output_padding({0, s - 1, s - 1}));
    decoder_convs.push_back(
        register_module("decoder_deconv" + std::to_string(i), deconv));
    if (i + 1 < kDecoderLayers) {
      decoder_norms.push_back(register_module(
          "decoder_bn" + std::to_string(i),
          torch::nn::BatchNorm3d(config.decoder_filters[i])));
    }
    in = config.decoder_filters[i];
  }
  codebook = register_parameter(
      "codebook",
      torch::zeros({config.codebook_size, config.embedding_dim}));
}

torch::Tensor VqVaeImpl::encode(const torch::Tensor& x) {
  torch::Tensor h = x;
  for (std::size_t i = 0; i < encoder_convs.size(); ++i) {
    h = encoder_convs[i]->forward(h);
    if (i < encoder_norms.size()) h = encoder_norms[i]->forward(torch::relu(h));
  }
  return h;
}

torch::Tensor VqVaeImpl::decode(const torch::Tensor& z) {
  torch::Tensor h = z;
  for (std::size_t i = 0; i < decoder_convs.size(); ++i) {
    h = decoder_convs[i]->forward(h);
    if (i < decoder_norms.size()) h = decoder_norms[i]->forward(torch::relu(h));
  }
  return torch::sigmoid(h);
}

ModelState init_model(const ModelConfig& config) {
  ModelState state;
  state.config = config;
  state.net = VqVae(config);
  std::mt19937_64 rng(config.seed);

  auto init_layer = [&](torch::Tensor weight, torch::Tensor bias,
                        int64_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    fill_uniform(weight, bound, rng);
    fill_uniform(bias, bound, rng);
  };
  for (auto& conv : state.net->encoder_convs) {
    const auto& w = conv->weight;  // [out, in, k, k, k]
    init_layer(w, conv->bias, w.size(1) * w.size(2) * w.size(3) * w.size(4));
  }
  for (auto& deconv : state.net->decoder_convs) {
    const auto& w = deconv->weight;  // [in, out, k, k, k]
    init_layer(w, deconv->bias, w.size(0) * w.size(2) * w.size(3) * w.size(4));
  }
  fill_uniform(state.net->codebook, 1.0 / config.codebook_size, rng);

  // Rows must start distinct.
  auto rows = state.net->codebook.detach().contiguous();
  std::set<std::vector<float>> seen;
  const float* p = rows.data_ptr<float>();
  for (int64_t r = 0; r < rows.size(0); ++r) {
    std::vector<float> row(p + r * rows.size(1), p + (r + 1) * rows.size(1));
    if (!seen.insert(std::move(row)).second) {
      throw ConfigError("codebook initialisation produced duplicate rows");
    }
  }
  return state;
}

std::vector<std::int64_t> nearest_codes(const torch::Tensor& vectors,
                                        const torch::Tensor& codebook) {
  if (vectors.dim() != 2 || codebook.dim() != 2 ||
      vectors.size(1) != codebook.size(1)) {
    throw ShapeError("nearest_codes: expected [M, D] and [C, D]");
  }
  const auto z = vectors.detach().to(torch::kCPU, torch::kDouble).contiguous();
  const auto e = codebook.detach().to(torch::kCPU, torch::kDouble).contiguous();
  const int64_t m = z.size(0), d = z.size(1), c = e.size(0);
  const double* zp = z.data_ptr<double>();
  const double* ep = e.data_ptr<double>();
  std::vector<std::int64_t> out(m);
  for (int64_t i = 0; i < m; ++i) {
    const double* zi = zp + i * d;
    std::int64_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int64_t k = 0; k < c; ++k) {
      const double* ek = ep + k * d;
      double dist = 0.0;
      for (int64_t j = 0; j < d; ++j) {
        const double diff = zi[j] - ek[j];
        dist += diff * diff;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    out[i] = best;
  }
  return out;
}

QuantizeResult quantize(const torch::Tensor& latent,
                        const torch::Tensor& codebook) {
  check_latent(latent, codebook.size(1), "quantize");
  const int64_t depth = latent.size(1);
  // [B, D, T, h, w] -> [B, T, h, w, D]
  auto channels_last = latent.permute({0, 2, 3, 4, 1});
  auto flat = channels_last.reshape({-1, depth});

  auto idx = nearest_codes(flat, codebook);
  auto indices = torch::from_blob(idx.data(), {static_cast<int64_t>(idx.size())},
                                  torch::kInt64)
                     .clone();
  auto rows = codebook.index_select(0, indices).to(latent.dtype());

  QuantizeResult r;
  r.codebook_loss = (flat.detach() - rows).pow(2).sum(1).mean();
  r.commitment_loss = (flat - rows.detach()).pow(2).sum(1).mean();
  // Forward value is exactly `rows`; the gradient reaches `flat` unchanged.
  auto straight_through = rows.detach() + (flat - flat.detach());
  r.quantized = straight_through.reshape(channels_last.sizes())
                    .permute({0, 4, 1, 2, 3})
                    .contiguous();
  r.indices = indices.reshape({latent.size(0), latent.size(2), latent.size(3),
                               latent.size(4)});
  return r;
}

torch::Tensor encode(ModelState& state, const torch::Tensor& input) {
  const auto& cfg = state.config;
  if (input.dim() != 5 || input.size(1) != 3 ||
      input.size(2) != cfg.window_length || input.size(3) % 4 != 0 ||
      input.size(4) % 4 != 0 || input.size(3) == 0 || input.size(4) == 0) {
    throw ShapeError("encode: expected [B, 3, " +
                     std::to_string(cfg.window_length) +
                     ", H, W] with H, W divisible by 4");
  }
  return state.net->encode(input);
}

torch::Tensor decode(ModelState& state, const torch::Tensor& quantized) {
  check_latent(quantized, state.config.embedding_dim, "decode");
  if (quantized.size(2) != state.config.window_length) {
    throw ShapeError("decode: temporal extent does not match window length");
  }
  return state.net->decode(quantized);
}

ForwardResult forward(ModelState& state, const torch::Tensor& input) {
  const bool unbatched = input.dim() == 4;
  auto x = unbatched ? input.unsqueeze(0) : input;
  auto latent = encode(state, x);
  ForwardResult r;
  r.vq = quantize(latent, state.net->codebook);
  r.reconstruction = decode(state, r.vq.quantized);
  if (unbatched) r.reconstruction = r.reconstruction.squeeze(0);
  return r;
}

std::int64_t count_unused_codes(const torch::Tensor& usage_counts) {
  return (usage_counts == 0).sum().item<std::int64_t>();
}

std::vector<std::pair<std::string, torch::Tensor>> named_state(
    const ModelState& state) {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  for (const auto& item : state.net->named_parameters()) {
    out.emplace_back("model/" + item.key(), item.value());
  }
  for (const auto& item : state.net->named_buffers()) {
    out.emplace_back("model/" + item.key(), item.value());
  }
  return out;
}

}  // namespace sketchbetween

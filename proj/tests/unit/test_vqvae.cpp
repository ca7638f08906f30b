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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>
#include <torch/torch.h>

#include "sketchbetween/error.hpp"
#include "sketchbetween/vqvae.hpp"
#include "synthetic.hpp"

using namespace sketchbetween;

namespace {

// Exhaustive nearest row, lowest index on ties.
std::int64_t brute_nearest(const torch::Tensor& v, const torch::Tensor& book) {
  std::int64_t best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < book.size(0); ++k) {
    double d = 0;
    for (std::int64_t j = 0; j < book.size(1); ++j) {
      const double diff = v[j].item<double>() - book[k][j].item<double>();
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

bool same(const torch::Tensor& a, const torch::Tensor& b) {
  return a.sizes() == b.sizes() && torch::equal(a, b);
}

}  // namespace

TEST(ModelConfigTest, DefaultArchitecture) {
  const ModelState s = init_model(ModelConfig{});
  ASSERT_EQ(s.net->encoder_convs.size(), 6u);
  ASSERT_EQ(s.net->decoder_convs.size(), 7u);
  EXPECT_EQ(s.net->encoder_norms.size(), 5u);
  EXPECT_EQ(s.net->decoder_norms.size(), 6u);
  EXPECT_EQ(s.net->codebook.sizes(), (std::vector<std::int64_t>{256, 8}));

  const std::vector<int> enc_out = {32, 64, 64, 128, 64, 8};
  const std::vector<int> enc_k = {3, 3, 3, 3, 1, 1};
  for (int i = 0; i < 6; ++i) {
    const auto& w = s.net->encoder_convs[i]->weight;
    EXPECT_EQ(w.size(0), enc_out[i]);
    EXPECT_EQ(w.size(2), enc_k[i]);
    const auto stride = s.net->encoder_convs[i]->options.stride();
    EXPECT_EQ((*stride)[0], 1);
    EXPECT_EQ((*stride)[1], i < 2 ? 2 : 1);
  }
  const std::vector<int> dec_out = {128, 64, 64, 64, 32, 16, 3};
  const std::vector<int> dec_k = {3, 3, 3, 3, 3, 1, 3};
  for (int i = 0; i < 7; ++i) {
    const auto& w = s.net->decoder_convs[i]->weight;  // [in, out, k, k, k]
    EXPECT_EQ(w.size(1), dec_out[i]);
    EXPECT_EQ(w.size(2), dec_k[i]);
    const auto stride = s.net->decoder_convs[i]->options.stride();
    EXPECT_EQ((*stride)[2], i < 2 ? 2 : 1);
  }
}

TEST(ModelConfigTest, InvalidConfigsAreRejected) {
  ModelConfig c;
  c.encoder_filters = {32, 64, 64, 128, 8};
  EXPECT_THROW(init_model(c), ConfigError);
  c = {};
  c.encoder_filters.back() = 7;
  EXPECT_THROW(init_model(c), ConfigError);
  c = {};
  c.decoder_filters.back() = 1;
  EXPECT_THROW(init_model(c), ConfigError);
  c = {};
  c.codebook_size = 1;
  EXPECT_THROW(init_model(c), ConfigError);
  c = {};
  c.window_length = 2;
  EXPECT_THROW(init_model(c), ConfigError);
}

TEST(InitTest, SeededAndBounded) {
  const auto cfg = sbtest::tiny_model_config(5, 11);
  const ModelState a = init_model(cfg);
  const ModelState b = init_model(cfg);
  auto other_cfg = cfg;
  other_cfg.seed = 12;
  const ModelState c = init_model(other_cfg);
  const auto na = named_state(a), nb = named_state(b), nc = named_state(c);
  ASSERT_EQ(na.size(), nb.size());
  bool any_diff = false;
  for (std::size_t i = 0; i < na.size(); ++i) {
    EXPECT_EQ(na[i].first, nb[i].first);
    EXPECT_TRUE(same(na[i].second, nb[i].second)) << na[i].first;
    any_diff |= !same(na[i].second, nc[i].second);
  }
  EXPECT_TRUE(any_diff);
  const double bound = 1.0 / cfg.codebook_size;
  EXPECT_LE(a.net->codebook.abs().max().item<double>(), bound);
  const auto& w0 = a.net->encoder_convs[0]->weight;
  EXPECT_LE(w0.abs().max().item<double>(), 1.0 / std::sqrt(3.0 * 27.0) + 1e-7);
}

TEST(ShapeTest, DefaultModelShapeTrace) {
  torch::NoGradGuard no_grad;
  ModelState s = init_model(ModelConfig{});
  s.net->eval();
  const auto x = torch::rand({1, 3, 5, 128, 128});
  const auto z = encode(s, x);
  EXPECT_EQ(z.sizes(), (std::vector<std::int64_t>{1, 8, 5, 32, 32}));
  const auto y = decode(s, z);
  EXPECT_EQ(y.sizes(), (std::vector<std::int64_t>{1, 3, 5, 128, 128}));
}

TEST(ShapeTest, BatchAndWindowPassThrough) {
  torch::NoGradGuard no_grad;
  for (int n : {3, 5, 7}) {
    ModelState s = init_model(sbtest::tiny_model_config(n));
    const auto r = forward(s, torch::rand({3, 3, n, 32, 16}));
    EXPECT_EQ(r.reconstruction.sizes(), (std::vector<std::int64_t>{3, 3, n, 32, 16}));
    EXPECT_EQ(r.vq.indices.sizes(), (std::vector<std::int64_t>{3, n, 8, 4}));
    const auto single = forward(s, torch::rand({3, n, 16, 16}));
    EXPECT_EQ(single.reconstruction.sizes(), (std::vector<std::int64_t>{3, n, 16, 16}));
  }
}

TEST(ShapeTest, BadInputsThrow) {
  ModelState s = init_model(sbtest::tiny_model_config(5));
  EXPECT_THROW(encode(s, torch::rand({1, 3, 4, 16, 16})), ShapeError);
  EXPECT_THROW(encode(s, torch::rand({1, 3, 5, 18, 16})), ShapeError);
  EXPECT_THROW(encode(s, torch::rand({1, 1, 5, 16, 16})), ShapeError);
  EXPECT_THROW(decode(s, torch::rand({1, 3, 5, 4, 4})), ShapeError);
  EXPECT_THROW(quantize(torch::rand({1, 3, 5, 4, 4}), s.net->codebook), ShapeError);
}

TEST(ShapeTest, ZeroWeightsGiveZeroFeatures) {
  torch::NoGradGuard no_grad;
  ModelState s = init_model(sbtest::tiny_model_config(5));
  auto& conv = s.net->encoder_convs[0];
  conv->weight.zero_();
  conv->bias.zero_();
  const auto pre_bn = conv->forward(torch::rand({2, 3, 5, 16, 16}));
  EXPECT_EQ(pre_bn.abs().max().item<float>(), 0.0f);
}

TEST(ShapeTest, DecoderOutputStaysInUnitRange) {
  torch::NoGradGuard no_grad;
  ModelState s = init_model(sbtest::tiny_model_config(5));
  for (auto& p : s.net->parameters()) p.mul_(40.0);
  const auto y = decode(s, torch::randn({2, 4, 5, 4, 4}) * 100);
  EXPECT_GE(y.min().item<float>(), 0.0f);
  EXPECT_LE(y.max().item<float>(), 1.0f);
}

TEST(QuantizeTest, ExactRowMatch) {
  const auto book = torch::randn({16, 8});
  auto latent = book[7].reshape({1, 8, 1, 1, 1}).clone();
  const auto r = quantize(latent, book);
  EXPECT_EQ(r.indices.item<std::int64_t>(), 7);
  EXPECT_EQ(r.codebook_loss.item<float>(), 0.0f);
  EXPECT_EQ(r.commitment_loss.item<float>(), 0.0f);
}

TEST(QuantizeTest, NearerOfTwoRows) {
  auto book = torch::stack({torch::zeros({8}), torch::ones({8})});
  const auto r = quantize(torch::full({1, 8, 1, 1, 1}, 0.4), book);
  EXPECT_EQ(r.indices.item<std::int64_t>(), 0);
  // Exactly halfway: lowest index wins.
  EXPECT_EQ(quantize(torch::full({1, 8, 1, 1, 1}, 0.5), book).indices.item<std::int64_t>(), 0);
}

TEST(QuantizeTest, MatchesBruteForceSearch) {
  torch::manual_seed(4);
  const auto book = torch::randn({4, 3});
  const auto latent = torch::randn({2, 3, 1, 2, 2});
  const auto r = quantize(latent, book);
  for (int b = 0; b < 2; ++b) {
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 2; ++x) {
        const auto v = latent.index({b, torch::indexing::Slice(), 0, y, x});
        EXPECT_EQ(r.indices[b][0][y][x].item<std::int64_t>(), brute_nearest(v, book));
        EXPECT_TRUE(torch::equal(
            r.quantized.index({b, torch::indexing::Slice(), 0, y, x}),
            book[brute_nearest(v, book)]));
      }
    }
  }
}

TEST(QuantizeTest, IdempotentOnQuantizedField) {
  torch::manual_seed(5);
  const auto book = torch::randn({32, 4});
  const auto first = quantize(torch::randn({2, 4, 3, 4, 4}), book);
  const auto second = quantize(first.quantized.detach(), book);
  EXPECT_TRUE(torch::equal(first.indices, second.indices));
  EXPECT_EQ(second.codebook_loss.item<float>(), 0.0f);
}

TEST(QuantizeTest, LossesAreMeanSquaredDistances) {
  torch::manual_seed(6);
  const auto book = torch::randn({8, 4});
  const auto latent = torch::randn({1, 4, 2, 2, 2});
  const auto r = quantize(latent, book);
  const auto diff = latent - r.quantized.detach();
  const double expect = diff.pow(2).sum(1).mean().item<double>();
  EXPECT_NEAR(r.codebook_loss.item<double>(), expect, 1e-6);
  EXPECT_NEAR(r.commitment_loss.item<double>(), expect, 1e-6);
  EXPECT_GT(expect, 0.0);
}

TEST(StraightThroughTest, GradientPassesAsIdentity) {
  torch::manual_seed(7);
  const auto book = torch::randn({4, 6}, torch::kDouble);
  auto z = torch::randn({1, 6, 1, 1, 1}, torch::kDouble).requires_grad_(true);
  const auto q = quantize(z, book).quantized;
  // A non-linear scalar loss of the quantized values.
  const auto loss = (q.pow(3) + 2 * q).sum();
  loss.backward();

  // Gradient w.r.t. the post-quantization values, taken directly.
  auto qleaf = q.detach().clone().requires_grad_(true);
  (qleaf.pow(3) + 2 * qleaf).sum().backward();
  EXPECT_TRUE(torch::allclose(z.grad(), qleaf.grad(), 0, 0));

  // Finite differences through the straight-through surrogate z + (q - z).
  const auto offset = (q - z).detach();
  auto f = [&](const torch::Tensor& zz) {
    const auto qq = zz + offset;
    return (qq.pow(3) + 2 * qq).sum().item<double>();
  };
  for (int j = 0; j < 6; ++j) {
    auto zp = z.detach().clone(), zm = z.detach().clone();
    const double h = 1e-6;
    zp.view(-1)[j] += h;
    zm.view(-1)[j] -= h;
    const double fd = (f(zp) - f(zm)) / (2 * h);
    EXPECT_NEAR(fd, z.grad().view(-1)[j].item<double>(), 1e-6);
  }
}

TEST(StraightThroughTest, CodebookGetsGradientOnlyFromCodebookLoss) {
  torch::manual_seed(8);
  auto book = torch::randn({4, 3}).requires_grad_(true);
  auto z = torch::randn({1, 3, 1, 2, 2}).requires_grad_(true);
  const auto r = quantize(z, book);
  (r.quantized.sum() + r.commitment_loss).backward();
  ASSERT_TRUE(!book.grad().defined() || book.grad().abs().max().item<float>() == 0.0f);
  r.codebook_loss.backward();
  EXPECT_GT(book.grad().abs().max().item<float>(), 0.0f);
}

TEST(GradientTest, EncoderReceivesGradientMatchingFiniteDifferences) {
  ModelState s = init_model(sbtest::tiny_model_config(5, 21));
  s.net->to(torch::kDouble);
  torch::manual_seed(9);
  // Larger steps cross ReLU kinks; 1e-8 is still far above double rounding.
  const auto x = torch::rand({2, 3, 5, 16, 16}, torch::kDouble);
  const auto target = torch::rand({2, 3, 5, 16, 16}, torch::kDouble);

  auto z0 = s.net->encode(x);
  const auto r = quantize(z0, s.net->codebook);
  const auto recon = s.net->decode(r.quantized);
  const auto loss = (recon - target).pow(2).mean();
  loss.backward();
  auto& w = s.net->encoder_convs[0]->weight;
  const auto grad = w.grad().clone();
  ASSERT_GT(grad.abs().max().item<double>(), 0.0);

  // Hold the quantization offset fixed, as the straight-through rule does.
  const auto offset = (r.quantized - z0).detach();
  auto f = [&]() {
    torch::NoGradGuard g;
    const auto rr = s.net->decode(s.net->encode(x) + offset);
    return (rr - target).pow(2).mean().item<double>();
  };
  const auto order = grad.abs().view(-1).argsort(0, true);
  for (int i = 0; i < 3; ++i) {
    const auto j = order[i].item<std::int64_t>();
    const double h = 1e-8;
    double fp, fm;
    {
      torch::NoGradGuard g;
      w.view(-1)[j] += h;
    }
    fp = f();
    {
      torch::NoGradGuard g;
      w.view(-1)[j] -= 2 * h;
    }
    fm = f();
    {
      torch::NoGradGuard g;
      w.view(-1)[j] += h;
    }
    const double fd = (fp - fm) / (2 * h);
    const double ad = grad.view(-1)[j].item<double>();
    EXPECT_NEAR(fd, ad, 1e-3 * std::abs(ad)) << "coordinate " << j;
  }
}

TEST(ForwardTest, EvalModeIsDeterministic) {
  ModelState s = init_model(sbtest::tiny_model_config(5));
  s.net->eval();
  torch::NoGradGuard no_grad;
  const auto x = torch::rand({2, 3, 5, 16, 16});
  const auto a = forward(s, x);
  const auto b = forward(s, x);
  EXPECT_TRUE(torch::equal(a.reconstruction, b.reconstruction));
  EXPECT_TRUE(torch::equal(a.vq.indices, b.vq.indices));
  EXPECT_EQ(a.reconstruction.sizes(), x.sizes());
}

TEST(ForwardTest, UnusedCodeCount) {
  const auto counts = torch::tensor({0, 3, 0, 1}, torch::kInt64);
  EXPECT_EQ(count_unused_codes(counts), 2);
}

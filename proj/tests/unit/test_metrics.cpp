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
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "sketchbetween/error.hpp"
#include "sketchbetween/metrics.hpp"
#include "sketchbetween/tensor_convert.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace sketchbetween;

TEST(SsimTest, MatchesBruteForceDefinition) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) {
    const Frame a = sbtest::random_frame(16, 16, rng);
    Frame b = sbtest::random_frame(16, 16, rng);
    // Correlate half of the pairs so values spread over the range.
    if (k % 2) {
      for (std::size_t i = 0; i < b.pixels.size(); ++i) {
        b.pixels[i] = 0.7f * a.pixels[i] + 0.3f * b.pixels[i];
      }
    }
    EXPECT_NEAR(ssim(a, b), sbtest::brute_force_ssim(a, b), 1e-6);
  }
}

TEST(SsimTest, IdentitySymmetryAndBounds) {
  std::mt19937_64 rng(2);
  const Frame a = sbtest::random_frame(32, 24, rng);
  const Frame b = sbtest::random_frame(32, 24, rng);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(ssim(a, b), ssim(b, a));
  EXPECT_LT(ssim(a, b), 1.0);
  Frame neg = a;
  for (auto& v : neg.pixels) v = 1.0f - v;
  const double s = ssim(a, neg);
  EXPECT_GE(s, -1.0);
  EXPECT_LT(s, 0.0);
}

TEST(SsimTest, ShapeMismatchThrows) {
  EXPECT_THROW(ssim(Frame(16, 16), Frame(16, 17)), ShapeError);
  EXPECT_THROW(psnr(Frame(16, 16), Frame(17, 16)), ShapeError);
}

TEST(SsimTest, TensorAndFramePathsAgree) {
  std::mt19937_64 rng(3);
  const Frame a = sbtest::random_frame(20, 20, rng);
  const Frame b = sbtest::random_frame(20, 20, rng);
  const auto ta = frame_to_tensor(a, torch::kDouble).unsqueeze(0);
  const auto tb = frame_to_tensor(b, torch::kDouble).unsqueeze(0);
  EXPECT_NEAR(ssim_per_image(ta, tb)[0].item<double>(), ssim(a, b), 1e-12);
  const auto fa = frame_to_tensor(a).unsqueeze(0);
  const auto fb = frame_to_tensor(b).unsqueeze(0);
  EXPECT_NEAR(ssim_per_image(fa, fb)[0].item<double>(), ssim(a, b), 1e-5);
}

TEST(SsimTest, WindowIsNormalizedGaussian) {
  const auto w = ssim_window(11, 1.5, torch::kDouble);
  EXPECT_NEAR(w.sum().item<double>(), 1.0, 1e-12);
  EXPECT_NEAR((w[5][5] / w[5][6]).item<double>(), std::exp(1.0 / (2 * 2.25)), 1e-12);
}

TEST(PsnrTest, CapAndAnalyticValues) {
  std::mt19937_64 rng(4);
  const Frame a = sbtest::random_frame(16, 16, rng);
  EXPECT_EQ(psnr(a, a), 100.0);
  const Frame g = Frame::filled(16, 16, 0.5f, 0.5f, 0.5f);
  const Frame h = Frame::filled(16, 16, 0.6f, 0.4f, 0.6f);
  EXPECT_NEAR(psnr(g, h), 20.0, 1e-5);
}

TEST(PsnrTest, MatchesDirectFormulaAndIsMonotone) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const Frame a = sbtest::random_frame(16, 16, rng);
    const Frame b = sbtest::random_frame(16, 16, rng);
    const double mse = sbtest::brute_force_mse(a, b);
    EXPECT_NEAR(mean_squared_error(a, b), mse, 1e-12);
    EXPECT_NEAR(psnr(a, b), 10.0 * std::log10(1.0 / mse), 1e-9);
    Frame closer = b;
    for (std::size_t i = 0; i < b.pixels.size(); ++i) {
      closer.pixels[i] = 0.5f * (a.pixels[i] + b.pixels[i]);
    }
    EXPECT_GT(psnr(a, closer), psnr(a, b));
  }
}

TEST(MetricConfigTest, Validation) {
  MetricConfig c;
  c.k1 = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.ssim_window = 4;
  EXPECT_THROW(c.validate(), ConfigError);
}

class EvaluateTest : public ::testing::Test {
 protected:
  void SetUp() override {
    sbtest::CorpusSpec spec;
    spec.train = 1;
    spec.test = 3;
    spec.min_frames = 5;
    spec.max_frames = 8;
    sbtest::write_corpus(dir_.path(), spec);
    corpus_ = scan_corpus(dir_.path(), 5);
  }
  sbtest::TempDir dir_;
  CorpusIndex corpus_;
};

TEST_F(EvaluateTest, ScoresOnlyInBetweenFrames) {
  const Predictor copy = [](const torch::Tensor& x) { return x.clone(); };
  const EvalReport r = evaluate_predictor(copy, corpus_, Variant::kFull, {});
  std::size_t expected_windows = 0;
  for (const auto& e : corpus_.split(Split::kTest)) expected_windows += e.frame_count - 4;
  ASSERT_EQ(r.windows.size(), expected_windows);
  EXPECT_EQ(r.frames_scored, 3 * expected_windows);
  EXPECT_EQ(r.clips_evaluated, 3);
  double s = 0, p = 0;
  for (const auto& w : r.windows) {
    ASSERT_EQ(w.frames.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(w.frames[i].index, i + 1);
    for (const auto& f : w.frames) {
      // A copied sketch never matches the rendered frame.
      EXPECT_LT(f.ssim, 1.0);
      s += f.ssim;
      p += f.psnr;
    }
  }
  EXPECT_DOUBLE_EQ(r.mean_ssim, s / r.frames_scored);
  EXPECT_DOUBLE_EQ(r.mean_psnr, p / r.frames_scored);
  for (std::size_t i = 1; i < r.windows.size(); ++i) {
    const auto& a = r.windows[i - 1];
    const auto& b = r.windows[i];
    EXPECT_TRUE(a.source_id < b.source_id ||
                (a.source_id == b.source_id && a.start < b.start));
  }
}

TEST_F(EvaluateTest, BatchSizeDoesNotChangeScores) {
  const Predictor dim = [](const torch::Tensor& x) { return x * 0.9; };
  EvalOptions one, many;
  one.batch_size = 1;
  many.batch_size = 7;
  const auto a = evaluate_predictor(dim, corpus_, Variant::kNoSketch, {}, one);
  const auto b = evaluate_predictor(dim, corpus_, Variant::kNoSketch, {}, many);
  EXPECT_EQ(a.to_json({}).dump(), b.to_json({}).dump());
}

TEST_F(EvaluateTest, BrokenClipIsReportedNotFatal) {
  const auto test = corpus_.split(Split::kTest);
  std::ofstream(test[1].path, std::ios::trunc) << "corrupt";
  const Predictor copy = [](const torch::Tensor& x) { return x.clone(); };
  const EvalReport r = evaluate_predictor(copy, corpus_, Variant::kFull, {});
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].source_id, test[1].source_id);
  EXPECT_EQ(r.clips_evaluated, 2);
  EXPECT_GT(r.frames_scored, 0u);
}

TEST_F(EvaluateTest, ReportJsonRoundTrip) {
  const Predictor copy = [](const torch::Tensor& x) { return x.clone(); };
  EvalOptions opts;
  opts.max_clips = 2;
  const EvalReport r = evaluate_predictor(copy, corpus_, Variant::kNoFinal, {}, opts);
  EXPECT_EQ(r.clips_evaluated, 2);
  const auto j = r.to_json({});
  EXPECT_EQ(j["format"], "sketchbetween-report-1");
  EXPECT_EQ(j["variant"], "no_final");
  const EvalReport back = EvalReport::from_json(j);
  EXPECT_EQ(back.to_json({}).dump(), j.dump());
  EXPECT_DOUBLE_EQ(back.mean_ssim, r.mean_ssim);
}

TEST_F(EvaluateTest, ModelWindowMustMatchCorpus) {
  ModelState m = init_model(sbtest::tiny_model_config(3));
  EXPECT_THROW(evaluate(m, corpus_, Variant::kFull, {}), ConfigError);
}

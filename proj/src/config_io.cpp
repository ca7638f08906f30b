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

#include "sketchbetween/config_io.hpp"

#include <fstream>
#include <set>

#include "sketchbetween/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sketchbetween {
namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out,
                const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

json to_json(const ModelConfig& c) {
  return {{"window_length", c.window_length},
          {"embedding_dim", c.embedding_dim},
          {"codebook_size", c.codebook_size},
          {"encoder_filters", c.encoder_filters},
          {"decoder_filters", c.decoder_filters},
          {"commitment_beta", c.commitment_beta},
          {"seed", c.seed}};
}

void merge_json(const json& j, ModelConfig& c) {
  const std::string where = "model";
  require_object(j, where);
  reject_unknown(j,
                 {"window_length", "embedding_dim", "codebook_size",
                  "encoder_filters", "decoder_filters", "commitment_beta",
                  "seed"},
                 where);
  read_field(j, "window_length", c.window_length, where);
  read_field(j, "embedding_dim", c.embedding_dim, where);
  read_field(j, "codebook_size", c.codebook_size, where);
  read_field(j, "encoder_filters", c.encoder_filters, where);
  read_field(j, "decoder_filters", c.decoder_filters, where);
  read_field(j, "commitment_beta", c.commitment_beta, where);
  read_field(j, "seed", c.seed, where);
}

json to_json(const AugmentParams& c) {
  return {{"p_hue", c.p_hue},
          {"max_hue_shift", c.max_hue_shift},
          {"p_sat", c.p_sat},
          {"max_sat_delta", c.max_sat_delta},
          {"p_flip", c.p_flip},
          {"seed", c.seed}};
}

void merge_json(const json& j, AugmentParams& c) {
  const std::string where = "train.augment";
  require_object(j, where);
  reject_unknown(
      j, {"p_hue", "max_hue_shift", "p_sat", "max_sat_delta", "p_flip", "seed"},
      where);
  read_field(j, "p_hue", c.p_hue, where);
  read_field(j, "max_hue_shift", c.max_hue_shift, where);
  read_field(j, "p_sat", c.p_sat, where);
  read_field(j, "max_sat_delta", c.max_sat_delta, where);
  read_field(j, "p_flip", c.p_flip, where);
  read_field(j, "seed", c.seed, where);
}

json to_json(const SketchParams& c) {
  return {{"kernel_sizes", c.kernel_sizes},
          {"low_threshold", c.thresholds.low},
          {"high_threshold", c.thresholds.high}};
}

void merge_json(const json& j, SketchParams& c) {
  const std::string where = "train.sketch";
  require_object(j, where);
  reject_unknown(j, {"kernel_sizes", "low_threshold", "high_threshold"}, where);
  read_field(j, "kernel_sizes", c.kernel_sizes, where);
  read_field(j, "low_threshold", c.thresholds.low, where);
  read_field(j, "high_threshold", c.thresholds.high, where);
}

json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"lookahead_k", c.lookahead_k},
          {"lookahead_alpha", c.lookahead_alpha},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_eps", c.adam_eps},
          {"commitment_beta", c.commitment_beta},
          {"seed", c.seed},
          {"augment", to_json(c.augment)},
          {"sketch", to_json(c.sketch)}};
}

void merge_json(const json& j, TrainConfig& c) {
  const std::string where = "train";
  require_object(j, where);
  reject_unknown(j,
                 {"epochs", "learning_rate", "batch_size", "lookahead_k",
                  "lookahead_alpha", "adam_beta1", "adam_beta2", "adam_eps",
                  "commitment_beta", "seed", "augment", "sketch"},
                 where);
  read_field(j, "epochs", c.epochs, where);
  read_field(j, "learning_rate", c.learning_rate, where);
  read_field(j, "batch_size", c.batch_size, where);
  read_field(j, "lookahead_k", c.lookahead_k, where);
  read_field(j, "lookahead_alpha", c.lookahead_alpha, where);
  read_field(j, "adam_beta1", c.adam_beta1, where);
  read_field(j, "adam_beta2", c.adam_beta2, where);
  read_field(j, "adam_eps", c.adam_eps, where);
  read_field(j, "commitment_beta", c.commitment_beta, where);
  read_field(j, "seed", c.seed, where);
  if (j.contains("augment")) merge_json(j.at("augment"), c.augment);
  if (j.contains("sketch")) merge_json(j.at("sketch"), c.sketch);
}

json to_json(const MetricConfig& c) {
  return {{"ssim_window", c.ssim_window},
          {"ssim_sigma", c.ssim_sigma},
          {"k1", c.k1},
          {"k2", c.k2},
          {"dynamic_range", c.dynamic_range},
          {"psnr_cap", c.psnr_cap}};
}

void merge_json(const json& j, MetricConfig& c) {
  const std::string where = "metric";
  require_object(j, where);
  reject_unknown(
      j, {"ssim_window", "ssim_sigma", "k1", "k2", "dynamic_range", "psnr_cap"},
      where);
  read_field(j, "ssim_window", c.ssim_window, where);
  read_field(j, "ssim_sigma", c.ssim_sigma, where);
  read_field(j, "k1", c.k1, where);
  read_field(j, "k2", c.k2, where);
  read_field(j, "dynamic_range", c.dynamic_range, where);
  read_field(j, "psnr_cap", c.psnr_cap, where);
}

json to_json(const RunConfig& c) {
  return {{"model", to_json(c.model)},
          {"train", to_json(c.train)},
          {"metric", to_json(c.metric)}};
}

void merge_json(const json& j, RunConfig& c) {
  require_object(j, "config");
  reject_unknown(j, {"model", "train", "metric"}, "config");
  if (j.contains("model")) merge_json(j.at("model"), c.model);
  if (j.contains("train")) merge_json(j.at("train"), c.train);
  if (j.contains("metric")) merge_json(j.at("metric"), c.metric);
  // The commitment weight lives in both structs; whichever side names it
  // wins, the training side when both do.
  const bool in_train = j.contains("train") && j["train"].contains("commitment_beta");
  const bool in_model = j.contains("model") && j["model"].contains("commitment_beta");
  if (in_train) {
    c.model.commitment_beta = c.train.commitment_beta;
  } else if (in_model) {
    c.train.commitment_beta = c.model.commitment_beta;
  }
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
}

void write_json_file(const json& j, const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

}  // namespace sketchbetween

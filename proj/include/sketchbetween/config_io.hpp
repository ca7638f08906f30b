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

#ifndef SKETCHBETWEEN_CONFIG_IO_HPP_
#define SKETCHBETWEEN_CONFIG_IO_HPP_

#include <filesystem>

#include <json.hpp>

#include "sketchbetween/metrics.hpp"
#include "sketchbetween/sketchgen.hpp"
#include "sketchbetween/training.hpp"
#include "sketchbetween/vqvae.hpp"

namespace sketchbetween {

// JSON views of the configuration structs. Readers treat every field as
// optional and keep the current value for absent keys; unknown keys are
// rejected with ConfigError.
nlohmann::json to_json(const ModelConfig& c);
nlohmann::json to_json(const AugmentParams& c);
nlohmann::json to_json(const SketchParams& c);
nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const MetricConfig& c);

void merge_json(const nlohmann::json& j, ModelConfig& c);
void merge_json(const nlohmann::json& j, AugmentParams& c);
void merge_json(const nlohmann::json& j, SketchParams& c);
void merge_json(const nlohmann::json& j, TrainConfig& c);
void merge_json(const nlohmann::json& j, MetricConfig& c);

// Full run configuration: {"model": ..., "train": ..., "metric": ...}.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  MetricConfig metric;
};

nlohmann::json to_json(const RunConfig& c);
void merge_json(const nlohmann::json& j, RunConfig& c);

nlohmann::json read_json_file(const std::filesystem::path& path);
// Pretty-printed with a trailing newline.
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_CONFIG_IO_HPP_

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

#ifndef SKETCHBETWEEN_DATASET_HPP_
#define SKETCHBETWEEN_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sketchbetween/frame.hpp"
#include "sketchbetween/sketchgen.hpp"

namespace sketchbetween {

inline constexpr int kDefaultWindowLength = 5;

// Which positions of the model input carry rendered frames.
//   full:      keyframe, sketch ... sketch, keyframe
//   no_sketch: keyframe, blank ... blank, keyframe
//   no_final:  keyframe, sketch ... sketch, sketch
enum class Variant { kFull, kNoSketch, kNoFinal };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

enum class Split { kTrain, kTest };
std::string_view to_string(Split s);

struct CorpusEntry {
  std::string source_id;
  std::filesystem::path path;
  int frame_count = 0;
  Split split = Split::kTrain;
};

struct CorpusIndex {
  std::filesystem::path root;
  int window_length = kDefaultWindowLength;
  std::vector<CorpusEntry> entries;  // train entries first, each split sorted
  int num_excluded_train = 0;        // decodable but shorter than window
  int num_excluded_test = 0;
  std::vector<std::string> undecodable;

  std::vector<CorpusEntry> split(Split s) const;
};

// Indexes `<root>/train` and `<root>/test` (GIF files or PNG-frame
// directories). Throws ConfigError when a split directory is missing.
CorpusIndex scan_corpus(const std::filesystem::path& root,
                        int window_length = kDefaultWindowLength);

struct Window {
  std::string source_id;
  int start = 0;
  std::vector<Frame> frames;
};

std::vector<Window> enumerate_eval_windows(const AnimationClip& clip,
                                           int window_length);

Window sample_training_window(const AnimationClip& clip, int window_length,
                              Rng& rng);

struct ModelInput {
  std::vector<Frame> frames;
  Variant variant = Variant::kFull;
};

struct Example {
  ModelInput input;
  std::vector<Frame> target;  // the rendered window, untouched
  std::string source_id;
  int start = 0;
};

Example assemble_model_input(const Window& window, Variant variant,
                             const SketchParams& sketch = {});

// Stage log used to check the order of pipeline steps.
struct PipelineTrace {
  std::vector<std::string> stages;
};

// Training path: sample a window, augment it, then sketch.
Example prepare_training_example(const AnimationClip& clip, int window_length,
                                 Variant variant,
                                 const AugmentParams& augment_params,
                                 const SketchParams& sketch, Rng& rng,
                                 PipelineTrace* trace = nullptr);

// Evaluation path: every window, never augmented.
std::vector<Example> prepare_eval_examples(const AnimationClip& clip,
                                           int window_length, Variant variant,
                                           const SketchParams& sketch,
                                           PipelineTrace* trace = nullptr);

// Shuffled index groups covering [0, count); the last group may be short.
std::vector<std::vector<std::size_t>> plan_batches(std::size_t count,
                                                   int batch_size, Rng& rng);

struct Batch {
  std::vector<Example> items;
};

std::vector<Batch> make_batches(const std::vector<Example>& items,
                                int batch_size, Rng& rng);

// Independent stream for (seed, epoch, purpose).
Rng make_rng(std::uint64_t seed, std::uint64_t epoch = 0,
             std::uint64_t stream = 0);

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_DATASET_HPP_

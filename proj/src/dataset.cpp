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

#include "sketchbetween/dataset.hpp"

#include <cctype>
#include <algorithm>
#include <numeric>

#include "sketchbetween/error.hpp"
#include "sketchbetween/media_io.hpp"

namespace fs = std::filesystem;

namespace sketchbetween {
namespace {

void check_window_length(int n) {
  if (n < 3) throw ParameterError("window length must be >= 3");
}

bool is_animation_path(const fs::directory_entry& e) {
  if (e.is_directory()) return true;
  if (!e.is_regular_file()) return false;
  std::string ext = e.path().extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".gif";
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kNoSketch: return "no_sketch";
    case Variant::kNoFinal: return "no_final";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "full") return Variant::kFull;
  if (name == "no_sketch") return Variant::kNoSketch;
  if (name == "no_final") return Variant::kNoFinal;
  throw ParameterError("unknown variant '" + std::string(name) +
                       "' (expected full, no_sketch or no_final)");
}

std::string_view to_string(Split s) {
  return s == Split::kTrain ? "train" : "test";
}

std::vector<CorpusEntry> CorpusIndex::split(Split s) const {
  std::vector<CorpusEntry> out;
  for (const auto& e : entries) {
    if (e.split == s) out.push_back(e);
  }
  return out;
}

CorpusIndex scan_corpus(const fs::path& root, int window_length) {
  check_window_length(window_length);
  CorpusIndex index;
  index.root = root;
  index.window_length = window_length;
  for (Split split : {Split::kTrain, Split::kTest}) {
    const fs::path dir = root / std::string(to_string(split));
    if (!fs::is_directory(dir)) {
      throw ConfigError("corpus split directory missing: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (is_animation_path(e)) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      AnimationClip clip;
      try {
        clip = decode_animation(path);
      } catch (const Error&) {
        index.undecodable.push_back(path.string());
        continue;
      }
      const int count = static_cast<int>(clip.frames.size());
      if (count < window_length) {
        (split == Split::kTrain ? index.num_excluded_train
                                : index.num_excluded_test)++;
        continue;
      }
      index.entries.push_back({clip.source_id, path, count, split});
    }
  }
  return index;
}

std::vector<Window> enumerate_eval_windows(const AnimationClip& clip,
                                           int window_length) {
  check_window_length(window_length);
  const int len = static_cast<int>(clip.frames.size());
  if (len < window_length) {
    throw ParameterError("clip '" + clip.source_id + "' has " +
                         std::to_string(len) + " frames, needs " +
                         std::to_string(window_length));
  }
  std::vector<Window> out;
  out.reserve(len - window_length + 1);
  for (int start = 0; start + window_length <= len; ++start) {
    out.push_back({clip.source_id, start,
                   {clip.frames.begin() + start,
                    clip.frames.begin() + start + window_length}});
  }
  return out;
}

Window sample_training_window(const AnimationClip& clip, int window_length,
                              Rng& rng) {
  check_window_length(window_length);
  const int len = static_cast<int>(clip.frames.size());
  if (len < window_length) {
    throw ParameterError("clip '" + clip.source_id + "' has " +
                         std::to_string(len) + " frames, needs " +
                         std::to_string(window_length));
  }
  const int start =
      std::uniform_int_distribution<int>(0, len - window_length)(rng);
  return {clip.source_id, start,
          {clip.frames.begin() + start,
           clip.frames.begin() + start + window_length}};
}

Example assemble_model_input(const Window& window, Variant variant,
                             const SketchParams& sketch) {
  const int n = static_cast<int>(window.frames.size());
  check_window_length(n);
  Example ex;
  ex.source_id = window.source_id;
  ex.start = window.start;
  ex.target = window.frames;
  ex.input.variant = variant;
  ex.input.frames.reserve(n);

  const Frame& first = window.frames.front();
  ex.input.frames.push_back(first);
  for (int i = 1; i < n - 1; ++i) {
    switch (variant) {
      case Variant::kFull:
      case Variant::kNoFinal:
        ex.input.frames.push_back(synthesize_sketch(window.frames[i], sketch));
        break;
      case Variant::kNoSketch:
        ex.input.frames.emplace_back(first.height, first.width, 1.0f);
        break;
      default:
        throw ParameterError("unknown variant");
    }
  }
  if (variant == Variant::kNoFinal) {
    ex.input.frames.push_back(synthesize_sketch(window.frames.back(), sketch));
  } else {
    ex.input.frames.push_back(window.frames.back());
  }
  return ex;
}

Example prepare_training_example(const AnimationClip& clip, int window_length,
                                 Variant variant,
                                 const AugmentParams& augment_params,
                                 const SketchParams& sketch, Rng& rng,
                                 PipelineTrace* trace) {
  Window w = sample_training_window(clip, window_length, rng);
  if (trace) trace->stages.push_back("window");
  AnimationClip as_clip{std::move(w.frames), w.source_id, clip.fps};
  as_clip = augment(as_clip, augment_params, rng);
  if (trace) trace->stages.push_back("augment");
  w.frames = std::move(as_clip.frames);
  Example ex = assemble_model_input(w, variant, sketch);
  if (trace) trace->stages.push_back("sketch");
  return ex;
}

std::vector<Example> prepare_eval_examples(const AnimationClip& clip,
                                           int window_length, Variant variant,
                                           const SketchParams& sketch,
                                           PipelineTrace* trace) {
  std::vector<Example> out;
  for (const Window& w : enumerate_eval_windows(clip, window_length)) {
    if (trace) trace->stages.push_back("window");
    out.push_back(assemble_model_input(w, variant, sketch));
    if (trace) trace->stages.push_back("sketch");
  }
  return out;
}

std::vector<std::vector<std::size_t>> plan_batches(std::size_t count,
                                                   int batch_size, Rng& rng) {
  if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
  if (count == 0) throw ParameterError("cannot batch an empty item list");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t pos = 0; pos < count; pos += batch_size) {
    const std::size_t end = std::min(count, pos + batch_size);
    out.emplace_back(order.begin() + pos, order.begin() + end);
  }
  return out;
}

std::vector<Batch> make_batches(const std::vector<Example>& items,
                                int batch_size, Rng& rng) {
  std::vector<Batch> out;
  for (const auto& group : plan_batches(items.size(), batch_size, rng)) {
    Batch b;
    for (std::size_t i : group) b.items.push_back(items[i]);
    out.push_back(std::move(b));
  }
  return out;
}

Rng make_rng(std::uint64_t seed, std::uint64_t epoch, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch),
                    static_cast<std::uint32_t>(epoch >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

}  // namespace sketchbetween

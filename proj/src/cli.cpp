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

#include "sketchbetween/cli.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sketchbetween/checkpoint.hpp"
#include "sketchbetween/config_io.hpp"
#include "sketchbetween/dataset.hpp"
#include "sketchbetween/error.hpp"
#include "sketchbetween/media_io.hpp"
#include "sketchbetween/metrics.hpp"
#include "sketchbetween/sketchgen.hpp"
#include "sketchbetween/tensor_convert.hpp"
#include "sketchbetween/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sketchbetween {
namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04zu.png", prefix, i);
  return buf;
}

bool is_still_image(const fs::path& p) {
  if (!fs::is_regular_file(p)) return false;
  std::string ext = p.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(ch));
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

AnimationClip load_clip_or_image(const fs::path& p) {
  if (is_still_image(p)) {
    AnimationClip clip;
    clip.source_id = p.stem().string();
    clip.frames.push_back(resize_to_canonical(read_image(p)));
    return clip;
  }
  return decode_animation(p);
}

Frame to_grayscale_rgb(const Frame& f) {
  Frame out(f.height, f.width);
  for (std::size_t i = 0; i < f.pixels.size(); i += 3) {
    const float y = 0.299f * f.pixels[i] + 0.587f * f.pixels[i + 1] +
                    0.114f * f.pixels[i + 2];
    out.pixels[i] = out.pixels[i + 1] = out.pixels[i + 2] = y;
  }
  return out;
}

// --- sketch ----------------------------------------------------------------

struct SketchArgs {
  std::string input;
  std::string out;
  std::vector<int> kernels{3, 5, 7, 9};
  int low = 50;
  int high = 150;
};

int cmd_sketch(const SketchArgs& a, std::ostream& out) {
  SketchParams params;
  params.kernel_sizes = a.kernels;
  params.thresholds = {a.low, a.high};
  const AnimationClip clip = load_clip_or_image(a.input);
  fs::create_directories(a.out);
  for (std::size_t i = 0; i < clip.frames.size(); ++i) {
    write_png(synthesize_sketch(clip.frames[i], params),
              fs::path(a.out) / numbered("sketch", i));
  }
  out << "wrote " << clip.frames.size() << " sketch frame(s) to " << a.out
      << "\n";
  return 0;
}

// --- shared config resolution -------------------------------------------------

RunConfig resolve_config(const std::string& config_path) {
  RunConfig cfg;
  if (!config_path.empty()) merge_json(read_json_file(config_path), cfg);
  return cfg;
}

// --- prepare -----------------------------------------------------------------

struct PrepareArgs {
  std::string data;
  std::string out;
  std::string split = "test";
  std::string variant = "full";
  std::string config;
  int window = kDefaultWindowLength;
  std::uint64_t seed = 0;
  std::size_t limit = 0;
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out) {
  RunConfig cfg = resolve_config(a.config);
  cfg.model.window_length = a.window;
  cfg.train.seed = a.seed;
  const Variant variant = parse_variant(a.variant);
  if (a.split != "train" && a.split != "test") {
    throw UsageError("--split must be train or test");
  }
  const Split split = a.split == "train" ? Split::kTrain : Split::kTest;

  fs::create_directories(a.out);
  json resolved = to_json(cfg);
  resolved["paths"] = {{"data", a.data}, {"out", a.out}};
  resolved["prepare"] = {{"split", a.split}, {"variant", a.variant}, {"limit", a.limit}};
  write_json_file(resolved, fs::path(a.out) / "resolved_config.json");

  const CorpusIndex corpus = scan_corpus(a.data, a.window);
  const auto entries = corpus.split(split);
  Rng rng = make_rng(a.seed);

  json items = json::array();
  std::size_t count = 0;
  for (const auto& entry : entries) {
    if (a.limit && count >= a.limit) break;
    ++count;
    const AnimationClip clip = decode_animation(entry.path);
    std::vector<Example> examples;
    if (split == Split::kTrain) {
      examples.push_back(prepare_training_example(
          clip, a.window, variant, cfg.train.augment, cfg.train.sketch, rng));
    } else {
      examples = prepare_eval_examples(clip, a.window, variant, cfg.train.sketch);
    }
    for (const Example& ex : examples) {
      const std::string dir_name =
          ex.source_id + "_" + std::to_string(ex.start);
      const fs::path dir = fs::path(a.out) / dir_name;
      for (std::size_t i = 0; i < ex.input.frames.size(); ++i) {
        write_png(ex.input.frames[i], dir / numbered("input", i));
        write_png(ex.target[i], dir / numbered("target", i));
      }
      items.push_back({{"source_id", ex.source_id},
                       {"start", ex.start},
                       {"variant", std::string(to_string(ex.input.variant))},
                       {"split", a.split},
                       {"dir", dir_name}});
    }
  }
  json manifest = {{"format", "sketchbetween-prepare-1"},
                   {"window_length", a.window},
                   {"excluded_train", corpus.num_excluded_train},
                   {"excluded_test", corpus.num_excluded_test},
                   {"windows", items}};
  write_json_file(manifest, fs::path(a.out) / "manifest.json");
  out << "prepared " << items.size() << " window(s) in " << a.out << "\n";
  return 0;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string out;
  std::string variant = "full";
  std::string config;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  std::optional<int> batch_size;
  bool resume = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  RunConfig cfg = resolve_config(a.config);
  if (a.epochs) cfg.train.epochs = *a.epochs;
  if (a.seed) {
    cfg.train.seed = *a.seed;
    cfg.model.seed = *a.seed;
  }
  if (a.batch_size) cfg.train.batch_size = *a.batch_size;
  const Variant variant = parse_variant(a.variant);
  cfg.model.validate();
  cfg.train.validate();

  fs::create_directories(a.out);
  json resolved = to_json(cfg);
  resolved["paths"] = {{"data", a.data}, {"out", a.out}};
  resolved["variant"] = a.variant;
  write_json_file(resolved, fs::path(a.out) / "resolved_config.json");

  const CorpusIndex corpus = scan_corpus(a.data, cfg.model.window_length);
  out << "corpus: " << corpus.split(Split::kTrain).size() << " train / "
      << corpus.split(Split::kTest).size() << " test clips (excluded "
      << corpus.num_excluded_train << " / " << corpus.num_excluded_test
      << ")\n";

  TrainOptions options;
  options.work_dir = a.out;
  options.resume = a.resume;
  options.on_epoch = [&out](const EpochRecord& r) {
    out << "epoch " << r.epoch << ": loss " << r.total_loss << " (1-ssim "
        << r.reconstruction_loss << ", codebook " << r.codebook_loss
        << ", commitment " << r.commitment_loss << "), dead codes "
        << r.dead_codes << ", " << r.wall_seconds << " s\n";
    out.flush();
  };
  const TrainResult result =
      train(corpus, cfg.model, cfg.train, variant, options);
  out << "trained " << result.history.epochs.size() << " epoch(s), "
      << result.state.step << " step(s)\n";
  return 0;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string ckpt;
  std::string data;
  std::string variant;
  std::string report;
  std::string config;
  int batch_size = 4;
  std::size_t max_clips = 0;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  json metadata;
  ModelState model = load_checkpoint(a.ckpt, &metadata);

  RunConfig cfg;
  cfg.model = model.config;
  if (metadata.is_object() && metadata.contains("train_config")) {
    merge_json(metadata["train_config"], cfg.train);
  }
  if (!a.config.empty()) {
    const json user = read_json_file(a.config);
    if (user.contains("metric")) merge_json(user["metric"], cfg.metric);
    if (user.contains("train") && user["train"].contains("sketch")) {
      merge_json(user["train"]["sketch"], cfg.train.sketch);
    }
  }
  std::string variant_name = a.variant;
  if (variant_name.empty()) {
    variant_name = metadata.is_object() ? metadata.value("variant", "full") : "full";
  }
  const Variant variant = parse_variant(variant_name);

  const fs::path report_path(a.report);
  const fs::path run_dir =
      report_path.has_parent_path() ? report_path.parent_path() : fs::path(".");
  json resolved = to_json(cfg);
  resolved["paths"] = {{"ckpt", a.ckpt}, {"data", a.data}, {"report", a.report}};
  resolved["variant"] = variant_name;
  write_json_file(resolved, run_dir / "resolved_eval_config.json");

  const CorpusIndex corpus = scan_corpus(a.data, model.config.window_length);
  EvalOptions options;
  options.batch_size = a.batch_size;
  options.max_clips = a.max_clips;
  options.sketch = cfg.train.sketch;
  const EvalReport report = evaluate(model, corpus, variant, cfg.metric, options);
  write_json_file(report.to_json(cfg.metric), report_path);
  out << "variant " << variant_name << ": mean SSIM " << report.mean_ssim
      << ", mean PSNR " << report.mean_psnr << " dB over "
      << report.frames_scored << " frame(s)";
  if (!report.failures.empty()) {
    out << " (" << report.failures.size() << " clip(s) failed)";
  }
  out << "\n";
  return 0;
}

// --- infer -------------------------------------------------------------------

struct InferArgs {
  std::string ckpt;
  std::string first;
  std::string last;
  std::vector<std::string> sketches;
  std::string out;
  double fps = 10.0;
  bool paste_keyframes = false;
};

int cmd_infer(const InferArgs& a, std::ostream& out) {
  ModelState model = load_checkpoint(a.ckpt);
  const int n = model.config.window_length;
  if (static_cast<int>(a.sketches.size()) != n - 2) {
    throw UsageError("checkpoint expects window length " + std::to_string(n) +
                     ", so exactly " + std::to_string(n - 2) +
                     " --sketch images are required (got " +
                     std::to_string(a.sketches.size()) + ")");
  }
  std::vector<Frame> inputs;
  inputs.push_back(resize_to_canonical(read_image(a.first)));
  for (const auto& s : a.sketches) {
    inputs.push_back(to_grayscale_rgb(resize_to_canonical(read_image(s))));
  }
  inputs.push_back(resize_to_canonical(read_image(a.last)));

  model.net->eval();
  torch::Tensor recon;
  {
    torch::NoGradGuard no_grad;
    recon = forward(model, frames_to_tensor(inputs)).reconstruction;
  }
  AnimationClip clip;
  clip.source_id = fs::path(a.out).stem().string();
  clip.frames = tensor_to_frames(recon);
  if (a.paste_keyframes) {
    clip.frames.front() = inputs.front();
    clip.frames.back() = inputs.back();
  }
  encode_animation(clip, a.out, a.fps);
  out << "wrote " << clip.frames.size() << " frame(s) to " << a.out << " and "
      << frames_directory_for(a.out).string() << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"sketchbetween: keyframe + sketch in-betweening pipeline"};
  app.require_subcommand(1);

  SketchArgs sketch;
  auto* sk = app.add_subcommand("sketch", "Synthesize sketch PNGs for an animation");
  sk->add_option("input", sketch.input, "GIF, PNG frame directory or still image")
      ->required();
  sk->add_option("--out", sketch.out, "Output directory")->required();
  sk->add_option("--kernels", sketch.kernels, "Gaussian apertures")
      ->delimiter(',');
  sk->add_option("--low", sketch.low, "Low hysteresis threshold (8-bit scale)");
  sk->add_option("--high", sketch.high, "High hysteresis threshold (8-bit scale)");

  PrepareArgs prep;
  auto* pr = app.add_subcommand("prepare", "Materialize model inputs as PNG stacks");
  pr->add_option("--data", prep.data, "Corpus root with train/ and test/")->required();
  pr->add_option("--out", prep.out, "Output directory")->required();
  pr->add_option("--split", prep.split, "train or test");
  pr->add_option("--variant", prep.variant, "full, no_sketch or no_final");
  pr->add_option("--config", prep.config, "JSON config file");
  pr->add_option("--window", prep.window, "Window length N");
  pr->add_option("--seed", prep.seed, "Seed for training-path sampling");
  pr->add_option("--limit", prep.limit, "Maximum number of clips");

  TrainArgs tr;
  auto* tc = app.add_subcommand("train", "Train the model");
  tc->add_option("--data", tr.data, "Corpus root with train/ and test/")->required();
  tc->add_option("--out", tr.out, "Run directory")->required();
  tc->add_option("--variant", tr.variant, "full, no_sketch or no_final");
  tc->add_option("--config", tr.config, "JSON config file");
  tc->add_option("--epochs", tr.epochs, "Override train.epochs");
  tc->add_option("--seed", tr.seed, "Override model and train seeds");
  tc->add_option("--batch-size", tr.batch_size, "Override train.batch_size");
  tc->add_flag("--resume", tr.resume, "Continue from the latest checkpoint in --out");

  EvalArgs ev;
  auto* ec = app.add_subcommand("eval", "Score a checkpoint on the test split");
  ec->add_option("--ckpt", ev.ckpt, "Checkpoint archive")->required();
  ec->add_option("--data", ev.data, "Corpus root with train/ and test/")->required();
  ec->add_option("--variant", ev.variant, "Defaults to the checkpoint's variant");
  ec->add_option("--report", ev.report, "Output report JSON")->required();
  ec->add_option("--config", ev.config, "JSON config file (metric section)");
  ec->add_option("--batch-size", ev.batch_size, "Windows per forward pass");
  ec->add_option("--max-clips", ev.max_clips, "Limit the number of test clips");

  InferArgs inf;
  auto* ic = app.add_subcommand("infer", "Render in-betweens from keyframes and sketches");
  ic->add_option("--ckpt", inf.ckpt, "Checkpoint archive")->required();
  ic->add_option("--first", inf.first, "First keyframe image")->required();
  ic->add_option("--last", inf.last, "Last keyframe image")->required();
  ic->add_option("--sketch", inf.sketches, "In-between sketch (repeat, in order)");
  ic->add_option("--out", inf.out, "Output GIF path")->required();
  ic->add_option("--fps", inf.fps, "Playback rate of the output GIF");
  ic->add_flag("--paste-keyframes", inf.paste_keyframes,
               "Copy the input keyframes into the output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sk) return cmd_sketch(sketch, out);
    if (*pr) return cmd_prepare(prep, out);
    if (*tc) return cmd_train(tr, out);
    if (*ec) return cmd_eval(ev, out);
    if (*ic) return cmd_infer(inf, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace sketchbetween

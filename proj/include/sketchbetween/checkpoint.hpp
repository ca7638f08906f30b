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

#ifndef SKETCHBETWEEN_CHECKPOINT_HPP_
#define SKETCHBETWEEN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketchbetween/vqvae.hpp"

namespace sketchbetween {

inline constexpr const char* kCheckpointFormat = "sketchbetween-ckpt-1";

// Checkpoints are uncompressed POSIX tar archives:
//   manifest.json       format version, model config, step, free-form
//                       metadata and one record per tensor
//                       (name, file, dtype, shape, bytes, crc32)
//   tensors/NNNNN.bin   raw little-endian tensor data
// Header timestamps and owners are zeroed so equal states give equal bytes.
void save_checkpoint(const ModelState& state, const std::filesystem::path& path,
                     const nlohmann::json& metadata = nullptr);

ModelState load_checkpoint(const std::filesystem::path& path,
                           nlohmann::json* metadata = nullptr);

// Reads only the manifest.
nlohmann::json read_checkpoint_manifest(const std::filesystem::path& path);

namespace tar {

struct Member {
  std::string name;
  std::vector<std::uint8_t> data;
};

std::vector<std::uint8_t> pack(const std::vector<Member>& members);
// Throws CheckpointError on a malformed or truncated archive.
std::vector<Member> unpack(const std::vector<std::uint8_t>& bytes);

}  // namespace tar

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_CHECKPOINT_HPP_

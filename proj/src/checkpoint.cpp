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

#include "sketchbetween/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include <zlib.h>

#include "sketchbetween/config_io.hpp"
#include "sketchbetween/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sketchbetween {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are written in native (little-endian) order");

namespace tar {
namespace {

constexpr std::size_t kBlock = 512;

void put_octal(std::uint8_t* field, std::size_t width, std::uint64_t value) {
  // width - 1 digits followed by NUL.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*llo", static_cast<int>(width - 1),
                static_cast<unsigned long long>(value));
  std::memcpy(field, buf, width - 1);
  field[width - 1] = 0;
}

std::uint64_t parse_octal(const std::uint8_t* field, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const char c = static_cast<char>(field[i]);
    if (c == 0 || c == ' ') {
      if (v != 0) break;
      continue;
    }
    if (c < '0' || c > '7') throw CheckpointError("tar: bad octal field");
    v = v * 8 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

unsigned header_checksum(const std::uint8_t* h) {
  unsigned sum = 0;
  for (std::size_t i = 0; i < kBlock; ++i) {
    sum += (i >= 148 && i < 156) ? ' ' : h[i];
  }
  return sum;
}

}  // namespace

std::vector<std::uint8_t> pack(const std::vector<Member>& members) {
  std::vector<std::uint8_t> out;
  for (const Member& m : members) {
    if (m.name.size() >= 100) throw CheckpointError("tar: name too long");
    std::uint8_t h[kBlock] = {};
    std::memcpy(h, m.name.data(), m.name.size());
    put_octal(h + 100, 8, 0644);
    put_octal(h + 108, 8, 0);
    put_octal(h + 116, 8, 0);
    put_octal(h + 124, 12, m.data.size());
    put_octal(h + 136, 12, 0);
    h[156] = '0';
    std::memcpy(h + 257, "ustar", 6);
    std::memcpy(h + 263, "00", 2);
    char sum[8];
    std::snprintf(sum, sizeof(sum), "%06o", header_checksum(h));
    std::memcpy(h + 148, sum, 6);
    h[154] = 0;
    h[155] = ' ';
    out.insert(out.end(), h, h + kBlock);
    out.insert(out.end(), m.data.begin(), m.data.end());
    out.resize(out.size() + (kBlock - m.data.size() % kBlock) % kBlock, 0);
  }
  out.resize(out.size() + 2 * kBlock, 0);
  return out;
}

std::vector<Member> unpack(const std::vector<std::uint8_t>& bytes) {
  std::vector<Member> members;
  std::size_t pos = 0;
  while (true) {
    if (pos + kBlock > bytes.size()) {
      throw CheckpointError("tar: archive truncated (missing end marker)");
    }
    const std::uint8_t* h = bytes.data() + pos;
    if (std::all_of(h, h + kBlock, [](std::uint8_t b) { return b == 0; })) {
      break;
    }
    if (parse_octal(h + 148, 8) != header_checksum(h)) {
      throw CheckpointError("tar: header checksum mismatch at offset " +
                            std::to_string(pos));
    }
    Member m;
    m.name.assign(reinterpret_cast<const char*>(h),
                  strnlen(reinterpret_cast<const char*>(h), 100));
    const std::uint64_t size = parse_octal(h + 124, 12);
    pos += kBlock;
    if (size > bytes.size() - pos) {
      throw CheckpointError("tar: member '" + m.name + "' truncated (" +
                            std::to_string(bytes.size() - pos) + " of " +
                            std::to_string(size) + " bytes)");
    }
    if (h[156] == '0' || h[156] == 0) {
      m.data.assign(bytes.begin() + pos, bytes.begin() + pos + size);
      members.push_back(std::move(m));
    }
    pos += size + (kBlock - size % kBlock) % kBlock;
  }
  return members;
}

}  // namespace tar

namespace {

std::vector<std::uint8_t> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string dtype_name(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return "float32";
    case torch::kInt64: return "int64";
    default:
      throw CheckpointError(std::string("unsupported tensor dtype ") +
                            c10::toString(t));
  }
}

torch::ScalarType parse_dtype(const std::string& s) {
  if (s == "float32") return torch::kFloat32;
  if (s == "int64") return torch::kInt64;
  throw CheckpointError("unsupported dtype '" + s + "' in manifest");
}

std::uint32_t crc_of(const std::vector<std::uint8_t>& data) {
  return static_cast<std::uint32_t>(
      crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

std::vector<std::pair<std::string, torch::Tensor>> all_tensors(
    const ModelState& state) {
  auto named = named_state(state);
  for (const auto& [name, t] : state.optimizer_slots) {
    named.emplace_back("optim/" + name, t);
  }
  return named;
}

const tar::Member& find_member(const std::vector<tar::Member>& members,
                               const std::string& name,
                               const fs::path& path) {
  for (const auto& m : members) {
    if (m.name == name) return m;
  }
  throw CheckpointError("checkpoint '" + path.string() + "' has no member '" +
                        name + "'");
}

}  // namespace

void save_checkpoint(const ModelState& state, const fs::path& path,
                     const json& metadata) {
  std::vector<tar::Member> members(1);
  json records = json::array();
  int index = 0;
  for (const auto& [name, tensor] : all_tensors(state)) {
    auto cpu = tensor.detach().to(torch::kCPU).contiguous();
    const std::string dtype = dtype_name(cpu.scalar_type());
    tar::Member m;
    char file[32];
    std::snprintf(file, sizeof(file), "tensors/%05d.bin", index++);
    m.name = file;
    const auto* begin = static_cast<const std::uint8_t*>(cpu.data_ptr());
    m.data.assign(begin, begin + cpu.nbytes());
    records.push_back({{"name", name},
                       {"file", m.name},
                       {"dtype", dtype},
                       {"shape", cpu.sizes().vec()},
                       {"bytes", m.data.size()},
                       {"crc32", crc_of(m.data)}});
    members.push_back(std::move(m));
  }
  json manifest = {{"format", kCheckpointFormat},
                   {"model_config", to_json(state.config)},
                   {"step", state.step},
                   {"metadata", metadata},
                   {"tensors", records}};
  const std::string text = manifest.dump(2);
  members[0].name = "manifest.json";
  members[0].data.assign(text.begin(), text.end());

  const auto bytes = tar::pack(members);
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  // Write to a temporary name first so an interrupted save never leaves a
  // half-written archive under the final name.
  const fs::path tmp = path.string() + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

json read_checkpoint_manifest(const fs::path& path) {
  const auto members = tar::unpack(read_all(path));
  const auto& m = find_member(members, "manifest.json", path);
  json manifest;
  try {
    manifest = json::parse(m.data.begin(), m.data.end());
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint '" + path.string() +
                          "': unreadable manifest: " + e.what());
  }
  const std::string format = manifest.value("format", "");
  if (format != kCheckpointFormat) {
    throw CheckpointError("checkpoint '" + path.string() + "': format '" +
                          format + "' is not " + kCheckpointFormat);
  }
  return manifest;
}

ModelState load_checkpoint(const fs::path& path, json* metadata) {
  const auto members = tar::unpack(read_all(path));
  const auto& mm = find_member(members, "manifest.json", path);
  json manifest;
  try {
    manifest = json::parse(mm.data.begin(), mm.data.end());
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint '" + path.string() +
                          "': unreadable manifest: " + e.what());
  }
  const std::string format = manifest.value("format", "");
  if (format != kCheckpointFormat) {
    throw CheckpointError("checkpoint '" + path.string() + "': format '" +
                          format + "' is not " + kCheckpointFormat);
  }

  ModelState state;
  merge_json(manifest.at("model_config"), state.config);
  state.config.validate();
  state.net = VqVae(state.config);
  state.step = manifest.at("step").get<std::int64_t>();
  if (metadata) *metadata = manifest.value("metadata", json());

  std::map<std::string, torch::Tensor> model_tensors;
  for (auto& [name, t] : named_state(state)) model_tensors.emplace(name, t);

  std::set<std::string> seen;
  torch::NoGradGuard no_grad;
  for (const auto& rec : manifest.at("tensors")) {
    const std::string name = rec.at("name");
    const std::string context =
        "checkpoint '" + path.string() + "', tensor '" + name + "'";
    if (!seen.insert(name).second) {
      throw CheckpointError(context + " listed twice");
    }
    const auto& blob = find_member(members, rec.at("file"), path);
    const auto bytes = rec.at("bytes").get<std::size_t>();
    if (blob.data.size() != bytes) {
      throw CheckpointError(context + ": blob has " +
                            std::to_string(blob.data.size()) +
                            " bytes, manifest says " + std::to_string(bytes));
    }
    if (crc_of(blob.data) != rec.at("crc32").get<std::uint32_t>()) {
      throw CheckpointError(context + ": crc32 mismatch (corrupt blob)");
    }
    const auto dtype = parse_dtype(rec.at("dtype"));
    const auto shape = rec.at("shape").get<std::vector<int64_t>>();
    auto loaded =
        torch::from_blob(const_cast<std::uint8_t*>(blob.data.data()), shape,
                         dtype)
            .clone();
    if (static_cast<std::size_t>(loaded.nbytes()) != bytes) {
      throw CheckpointError(context + ": shape does not match byte count");
    }

    if (name.rfind("optim/", 0) == 0) {
      state.optimizer_slots.emplace(name.substr(6), loaded);
      continue;
    }
    auto it = model_tensors.find(name);
    if (it == model_tensors.end()) {
      throw CheckpointError(context + " is not part of the model");
    }
    if (it->second.sizes() != loaded.sizes() ||
        it->second.scalar_type() != loaded.scalar_type()) {
      throw CheckpointError(context + ": shape or dtype mismatch");
    }
    it->second.copy_(loaded);
  }
  for (const auto& [name, t] : model_tensors) {
    if (!seen.count(name)) {
      throw CheckpointError("checkpoint '" + path.string() +
                            "' is missing tensor '" + name + "'");
    }
  }
  return state;
}

}  // namespace sketchbetween

// Copyright 2026 The FLAN Graph Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Model checkpoint layout (all integers little-endian):
//
//   offset  size  field
//   0       8     magic "FLANCKP1"
//   8       4     u32 header length H
//   12      H     UTF-8 JSON header:
//                   {"config": {...}, "tensors": [{"name", "rows", "cols"}, ...]}
//   12+H    4·N   f32 values, tensors in header order, each row-major
//
// N is the total element count over all listed tensors.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>

#include "flan/gnn.hpp"

namespace flan {

inline constexpr std::string_view kCheckpointMagic = "FLANCKP1";

inline std::string serialize_checkpoint(const ModelParams& params, const ModelConfig& config) {
  json tensors = json::array();
  std::size_t total = 0;
  for_each_tensor(params, [&](const std::string& name, const Matrix& m) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    total += m.size();
  });
  const std::string header = json{{"config", config}, {"tensors", tensors}}.dump();
  std::string out(kCheckpointMagic);
  embed_detail::put_u32(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  out.reserve(out.size() + 4 * total);
  for_each_tensor(params, [&](const std::string&, const Matrix& m) {
    for (double v : m.flat())
      embed_detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  });
  return out;
}

inline std::pair<ModelParams, ModelConfig> parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < 12) fail(ErrorCode::kTruncatedFile, "checkpoint header is incomplete");
  if (bytes.substr(0, 8) != kCheckpointMagic) fail(ErrorCode::kBadMagic, "not a FLANCKP1 checkpoint");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t hlen = embed_detail::get_u32(p + 8);
  if (bytes.size() < 12 + static_cast<std::size_t>(hlen))
    fail(ErrorCode::kTruncatedFile, "checkpoint JSON header is cut short");
  json header;
  try {
    header = json::parse(bytes.substr(12, hlen));
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("checkpoint header: ") + e.what());
  }
  const ModelConfig config = config_from_json(header.at("config"));
  ModelParams params = zero_params(config);
  const auto& tensors = header.at("tensors");
  std::size_t k = 0, offset = 12 + hlen;
  for_each_tensor(params, [&](const std::string& name, Matrix& m) {
    if (k >= tensors.size()) fail(ErrorCode::kShapeMismatch, "checkpoint lacks tensor " + name);
    const auto& t = tensors[k++];
    if (t.at("name").get<std::string>() != name || t.at("rows").get<std::size_t>() != m.rows() ||
        t.at("cols").get<std::size_t>() != m.cols())
      fail(ErrorCode::kShapeMismatch, "checkpoint tensor " + name + " does not match the config");
    if (bytes.size() < offset + 4 * m.size())
      fail(ErrorCode::kTruncatedFile, "checkpoint payload is cut short in " + name);
    for (double& v : m.flat()) {
      v = static_cast<double>(std::bit_cast<float>(embed_detail::get_u32(p + offset)));
      offset += 4;
    }
  });
  if (k != tensors.size()) fail(ErrorCode::kShapeMismatch, "checkpoint lists extra tensors");
  if (offset != bytes.size()) fail(ErrorCode::kParseError, "trailing bytes after checkpoint payload");
  return {std::move(params), config};
}

// Rounds every parameter through f32, matching what a save/load cycle keeps.
inline ModelParams round_to_f32(ModelParams params) {
  for_each_tensor(params, [](const std::string&, Matrix& m) {
    for (double& v : m.flat()) v = static_cast<double>(static_cast<float>(v));
  });
  return params;
}

inline void save_checkpoint(const std::string& path, const ModelParams& params,
                            const ModelConfig& config) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write '" + path + "'");
  const std::string bytes = serialize_checkpoint(params, config);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIoError, "write failed for '" + path + "'");
}

inline std::pair<ModelParams, ModelConfig> load_checkpoint(const std::string& path) {
  return parse_checkpoint(embed_detail::read_file(path));
}

}  // namespace flan

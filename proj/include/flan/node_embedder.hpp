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

// Node text -> feature vector.
//
// Two backends: a deterministic feature-hashing embedder (word unigrams and
// bigrams, signed buckets, L2-normalized) and a lookup table of externally
// computed sentence embeddings keyed by the FNV-1a 64 hash of the node text.
//
// FLANEMB1 layout (little-endian):
//   bytes 0..7   "FLANEMB1"
//   u32          dim
//   u32          count
//   count x { u64 key, dim x f32 }

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "flan/core.hpp"
#include "flan/error.hpp"
#include "flan/graph_builder.hpp"
#include "flan/tensor.hpp"
#include "flan/text.hpp"

namespace flan {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = kFnvOffset) {
  std::uint64_t h = basis;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Key used for embedding tables: FNV-1a 64 of the exact UTF-8 node text.
inline std::uint64_t embedding_key(std::string_view node_text) { return fnv1a64(node_text); }

// Signed feature hashing of lowercased word unigrams and bigrams. The result
// is unit-norm, or the zero vector when no feature survives.
inline std::vector<double> hash_embed(std::string_view text_in, int dim, std::uint64_t seed) {
  if (dim < 8) fail(ErrorCode::kInvalidArgument, "hash_embed dim must be >= 8");
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  const auto words = text::words(text_in);
  const std::uint64_t basis = kFnvOffset ^ splitmix64(seed);
  auto add = [&](std::string_view feature) {
    const std::uint64_t h = fnv1a64(feature, basis);
    const std::size_t bucket = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim));
    const double sign = (splitmix64(h) >> 63) ? -1.0 : 1.0;
    v[bucket] += sign;
  };
  std::string buf;
  for (std::size_t i = 0; i < words.size(); ++i) {
    buf = "u\x1f" + words[i];
    add(buf);
    if (i + 1 < words.size()) {
      buf = "b\x1f" + words[i] + "\x1f" + words[i + 1];
      add(buf);
    }
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) return v;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

struct EmbeddingTable {
  std::uint32_t dim = 0;
  std::unordered_map<std::uint64_t, std::vector<float>> entries;

  const std::vector<float>* find(std::uint64_t key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  }

  void insert(std::uint64_t key, std::vector<float> vec) {
    if (vec.size() != dim)
      fail(ErrorCode::kDimMismatch, "vector of length " + std::to_string(vec.size()) +
                                        " in table of dim " + std::to_string(dim));
    for (float x : vec)
      if (!std::isfinite(x)) fail(ErrorCode::kNonFinite, "non-finite embedding value");
    if (!entries.emplace(key, std::move(vec)).second)
      fail(ErrorCode::kDuplicateKey, "duplicate embedding key " + std::to_string(key));
  }

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;
};

namespace embed_detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint64_t get_u64(const unsigned char* p) {
  return static_cast<std::uint64_t>(get_u32(p)) |
         (static_cast<std::uint64_t>(get_u32(p + 4)) << 32);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline EmbeddingTable parse_binary(std::string_view bytes) {
  if (bytes.size() < 16) fail(ErrorCode::kTruncatedFile, "FLANEMB1 header is incomplete");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  EmbeddingTable t;
  t.dim = get_u32(p + 8);
  const std::uint32_t count = get_u32(p + 12);
  if (t.dim == 0) fail(ErrorCode::kDimMismatch, "FLANEMB1 dim is zero");
  const std::uint64_t record = 8 + 4ULL * t.dim;
  const std::uint64_t need = 16 + record * count;
  if (bytes.size() < need)
    fail(ErrorCode::kTruncatedFile, "FLANEMB1 payload has " + std::to_string(bytes.size()) +
                                        " bytes, expected " + std::to_string(need));
  if (bytes.size() > need) fail(ErrorCode::kParseError, "trailing bytes after FLANEMB1 payload");
  t.entries.reserve(count);
  const unsigned char* r = p + 16;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t key = get_u64(r);
    std::vector<float> vec(t.dim);
    for (std::uint32_t d = 0; d < t.dim; ++d) vec[d] = std::bit_cast<float>(get_u32(r + 8 + 4 * d));
    t.insert(key, std::move(vec));
    r += record;
  }
  return t;
}

inline EmbeddingTable parse_jsonl(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  std::string line;
  EmbeddingTable t;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!header) {
      if (!j.contains("dim") || !j["dim"].is_number_unsigned() || j["dim"].get<std::uint64_t>() == 0)
        fail(ErrorCode::kBadMagic, "JSONL embedding file must start with {\"dim\": D}");
      t.dim = j["dim"].get<std::uint32_t>();
      header = true;
      continue;
    }
    std::uint64_t key = 0;
    const auto& jk = j.at("key");
    if (jk.is_string()) {
      key = std::stoull(jk.get<std::string>());
    } else {
      key = jk.get<std::uint64_t>();
    }
    std::vector<float> vec;
    for (const auto& x : j.at("vec")) vec.push_back(static_cast<float>(x.get<double>()));
    if (vec.size() != t.dim)
      fail(ErrorCode::kDimMismatch, "line " + std::to_string(lineno) + ": vector length " +
                                        std::to_string(vec.size()) + " != dim " + std::to_string(t.dim));
    t.insert(key, std::move(vec));
  }
  if (!header) fail(ErrorCode::kTruncatedFile, "empty JSONL embedding file");
  return t;
}

}  // namespace embed_detail

inline EmbeddingTable parse_embedding_table(std::string_view bytes) {
  if (bytes.size() >= 8 && bytes.substr(0, 8) == "FLANEMB1") return embed_detail::parse_binary(bytes);
  std::size_t i = 0;
  while (i < bytes.size() && (bytes[i] == ' ' || bytes[i] == '\n' || bytes[i] == '\r' || bytes[i] == '\t')) ++i;
  if (i < bytes.size() && bytes[i] == '{') return embed_detail::parse_jsonl(bytes);
  if (bytes.size() < 8 && std::string_view("FLANEMB1").starts_with(bytes) && !bytes.empty())
    fail(ErrorCode::kTruncatedFile, "file ends inside the magic bytes");
  fail(ErrorCode::kBadMagic, "not a FLANEMB1 or JSONL embedding file");
}

inline EmbeddingTable load_embedding_table(const std::string& path) {
  return parse_embedding_table(embed_detail::read_file(path));
}

// Serializes with keys in ascending order so identical tables give identical bytes.
inline std::string serialize_embedding_table(const EmbeddingTable& table) {
  std::vector<std::uint64_t> keys;
  keys.reserve(table.entries.size());
  for (const auto& [k, _] : table.entries) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  std::string out = "FLANEMB1";
  embed_detail::put_u32(out, table.dim);
  embed_detail::put_u32(out, static_cast<std::uint32_t>(keys.size()));
  for (auto k : keys) {
    embed_detail::put_u64(out, k);
    for (float x : table.entries.at(k)) embed_detail::put_u32(out, std::bit_cast<std::uint32_t>(x));
  }
  return out;
}

inline void save_embedding_table(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write '" + path + "'");
  const std::string bytes = serialize_embedding_table(table);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct HashBackend {
  int dim = 128;
  std::uint64_t seed = 0;
};

struct TableBackend {
  const EmbeddingTable* table = nullptr;
};

using EmbeddingBackend = std::variant<HashBackend, TableBackend>;

inline int backend_dim(const EmbeddingBackend& b) {
  if (auto* h = std::get_if<HashBackend>(&b)) return h->dim;
  return static_cast<int>(std::get<TableBackend>(b).table->dim);
}

struct EmbeddedGraph {
  FlanGraph graph;
  Matrix features;  // one row per node, in node_id order
};

inline EmbeddedGraph embed_graph(const FlanGraph& graph, const EmbeddingBackend& backend) {
  const int dim = backend_dim(backend);
  EmbeddedGraph out{graph, Matrix(graph.nodes.size(), static_cast<std::size_t>(dim))};
  for (const auto& node : graph.nodes) {
    auto row = out.features.row(static_cast<std::size_t>(node.node_id));
    if (auto* h = std::get_if<HashBackend>(&backend)) {
      const auto v = hash_embed(node.text, h->dim, h->seed);
      std::copy(v.begin(), v.end(), row.begin());
    } else {
      const auto key = embedding_key(node.text);
      const auto* vec = std::get<TableBackend>(backend).table->find(key);
      if (!vec)
        fail(ErrorCode::kMissingEmbedding, "no embedding for node text hash " + std::to_string(key));
      std::copy(vec->begin(), vec->end(), row.begin());
    }
  }
  if (!out.features.all_finite()) fail(ErrorCode::kNonFinite, "non-finite node features");
  return out;
}

}  // namespace flan

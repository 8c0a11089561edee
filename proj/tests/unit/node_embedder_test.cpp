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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "flan/dataset_io.hpp"
#include "flan/node_embedder.hpp"
#include "support/random_cases.hpp"

namespace {

using flan::ErrorCode;

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const flan::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no flan::Error thrown";
  return ErrorCode::kIoError;
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "flan_embedder_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

flan::EmbeddingTable small_table() {
  flan::EmbeddingTable t;
  t.dim = 3;
  t.insert(flan::embedding_key("a gear"), {0.25f, -1.5f, 3.0f});
  t.insert(flan::embedding_key("a lever"), {1.0f, 0.0f, -0.125f});
  t.insert(42, {1e-3f, 2e3f, -7.0f});
  return t;
}

TEST(Fnv1a, PublishedVectors) {
  EXPECT_EQ(flan::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(flan::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(flan::fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Splitmix64, KnownSequence) {
  // splitmix64 stream from state 0: first outputs of the reference generator.
  EXPECT_EQ(flan::splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(flan::splitmix64(0x9E3779B97F4A7C15ULL), 0x6e789e6aa1b965f4ULL);
}

TEST(HashEmbed, MatchesIndependentVectors) {
  std::ifstream in(std::string(FLAN_TEST_DATA) + "/hash_vectors.jsonl");
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    const auto j = flan::json::parse(line);
    const std::string text = j["text"];
    EXPECT_EQ(std::to_string(flan::embedding_key(text)), j["key"].get<std::string>()) << text;
    const auto v = flan::hash_embed(text, j["dim"].get<int>(), j["seed"].get<std::uint64_t>());
    const auto want = j["vec"].get<std::vector<double>>();
    ASSERT_EQ(v.size(), want.size());
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], want[i], 1e-12) << text << " " << i;
    ++cases;
  }
  EXPECT_EQ(cases, 6);
}

TEST(HashEmbed, UnitNormOrZero) {
  testing_support::Rand r(5);
  const std::vector<std::string> vocab = {"gear", "lever", "a", "the", "of", "shaft", "motor", "is"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    const int n = static_cast<int>(r.between(1, 12));
    for (int i = 0; i < n; ++i) s += vocab[r.between(0, static_cast<int>(vocab.size()) - 1)] + " ";
    const auto v = flan::hash_embed(s, 32, trial);
    double norm = 0;
    for (double x : v) norm += x * x;
    EXPECT_NEAR(std::sqrt(norm), 1.0, 1e-12) << s;
  }
  for (double x : flan::hash_embed(" ,; ", 16, 0)) EXPECT_EQ(x, 0.0);
}

TEST(HashEmbed, CaseInsensitiveAndSeedSensitive) {
  EXPECT_EQ(flan::hash_embed("The Control Component", 64, 3), flan::hash_embed("the control component", 64, 3));
  EXPECT_NE(flan::hash_embed("the control component", 64, 3), flan::hash_embed("the control component", 64, 4));
  EXPECT_EQ(code_of([] { flan::hash_embed("x", 4, 0); }), ErrorCode::kInvalidArgument);
}

TEST(HashEmbed, KeyIsCaseSensitive) {
  EXPECT_NE(flan::embedding_key("A gear"), flan::embedding_key("a gear"));
}

TEST(EmbeddingTable, BinaryRoundTripIsExact) {
  const auto t = small_table();
  const std::string bytes = flan::serialize_embedding_table(t);
  EXPECT_EQ(bytes.size(), 16u + 3u * (8u + 12u));
  EXPECT_EQ(bytes.substr(0, 8), "FLANEMB1");
  const auto back = flan::parse_embedding_table(bytes);
  EXPECT_EQ(back, t);
  EXPECT_EQ(flan::serialize_embedding_table(back), bytes);
}

TEST(EmbeddingTable, BinaryLayoutByHand) {
  std::string b = "FLANEMB1";
  const unsigned char header[] = {2, 0, 0, 0, 1, 0, 0, 0};
  b.append(reinterpret_cast<const char*>(header), 8);
  const unsigned char key[] = {7, 0, 0, 0, 0, 0, 0, 0};
  b.append(reinterpret_cast<const char*>(key), 8);
  const unsigned char one[] = {0x00, 0x00, 0x80, 0x3f};     // 1.0f
  const unsigned char minus2[] = {0x00, 0x00, 0x00, 0xc0};  // -2.0f
  b.append(reinterpret_cast<const char*>(one), 4);
  b.append(reinterpret_cast<const char*>(minus2), 4);
  const auto t = flan::parse_embedding_table(b);
  EXPECT_EQ(t.dim, 2u);
  ASSERT_NE(t.find(7), nullptr);
  EXPECT_EQ(*t.find(7), (std::vector<float>{1.0f, -2.0f}));
}

TEST(EmbeddingTable, FileRoundTrip) {
  const auto path = temp_path("table.bin");
  flan::save_embedding_table(small_table(), path);
  EXPECT_EQ(flan::load_embedding_table(path), small_table());
  EXPECT_EQ(code_of([] { flan::load_embedding_table("/nonexistent/dir/table.bin"); }), ErrorCode::kIoError);
}

TEST(EmbeddingTable, MalformedBinaryInputs) {
  const std::string good = flan::serialize_embedding_table(small_table());
  EXPECT_EQ(code_of([&] { flan::parse_embedding_table(good.substr(0, good.size() - 1)); }),
            ErrorCode::kTruncatedFile);
  EXPECT_EQ(code_of([&] { flan::parse_embedding_table(good.substr(0, 12)); }), ErrorCode::kTruncatedFile);
  EXPECT_EQ(code_of([&] { flan::parse_embedding_table("FLAN"); }), ErrorCode::kTruncatedFile);
  EXPECT_EQ(code_of([&] { flan::parse_embedding_table(good + "x"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([&] { flan::parse_embedding_table("GARBAGE!" + good.substr(8)); }), ErrorCode::kBadMagic);
  std::string zero_dim = good;
  zero_dim[8] = zero_dim[9] = zero_dim[10] = zero_dim[11] = 0;
  EXPECT_EQ(code_of([&] { flan::parse_embedding_table(zero_dim); }), ErrorCode::kDimMismatch);
  // Same key twice.
  std::string dup = "FLANEMB1";
  flan::embed_detail::put_u32(dup, 1);
  flan::embed_detail::put_u32(dup, 2);
  for (int i = 0; i < 2; ++i) {
    flan::embed_detail::put_u64(dup, 9);
    flan::embed_detail::put_u32(dup, 0);
  }
  EXPECT_EQ(code_of([&] { flan::parse_embedding_table(dup); }), ErrorCode::kDuplicateKey);
  std::string nan = "FLANEMB1";
  flan::embed_detail::put_u32(nan, 1);
  flan::embed_detail::put_u32(nan, 1);
  flan::embed_detail::put_u64(nan, 9);
  flan::embed_detail::put_u32(nan, 0x7fc00000u);
  EXPECT_EQ(code_of([&] { flan::parse_embedding_table(nan); }), ErrorCode::kNonFinite);
}

TEST(EmbeddingTable, JsonlFallback) {
  const std::string jsonl =
      "{\"dim\": 2}\n"
      "{\"key\": \"18446744073709551615\", \"vec\": [0.5, -1]}\n"
      "\n"
      "{\"key\": 3, \"vec\": [2, 4]}\n";
  const auto t = flan::parse_embedding_table(jsonl);
  EXPECT_EQ(t.dim, 2u);
  EXPECT_EQ(*t.find(18446744073709551615ULL), (std::vector<float>{0.5f, -1.0f}));
  EXPECT_EQ(*t.find(3), (std::vector<float>{2.0f, 4.0f}));
  EXPECT_EQ(code_of([] { flan::parse_embedding_table("{\"dim\": 2}\n{\"key\": 1, \"vec\": [1]}\n"); }),
            ErrorCode::kDimMismatch);
  EXPECT_EQ(code_of([] { flan::parse_embedding_table("{\"key\": 1, \"vec\": [1]}\n"); }), ErrorCode::kBadMagic);
  EXPECT_EQ(code_of([] { flan::parse_embedding_table("{\"dim\": 1}\n{oops\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { flan::parse_embedding_table(""); }), ErrorCode::kBadMagic);
}

TEST(EmbedGraph, RowsFollowNodeIds) {
  auto r = testing_support::Rand(9);
  const auto g = testing_support::random_tree(r, 6);
  const auto eg = flan::embed_graph(g, flan::HashBackend{16, 2});
  ASSERT_EQ(eg.features.rows(), 6u);
  ASSERT_EQ(eg.features.cols(), 16u);
  for (const auto& n : g.nodes) {
    const auto want = flan::hash_embed(n.text, 16, 2);
    for (std::size_t c = 0; c < 16; ++c) EXPECT_EQ(eg.features(n.node_id, c), want[c]);
  }
  EXPECT_EQ(eg.graph, g);
}

TEST(EmbedGraph, TableBackendAndMissingKey) {
  flan::FlanGraph g;
  g.claim_number = 1;
  g.nodes.push_back({0, "a gear", std::nullopt, 0, 1, true, true});
  g.nodes.push_back({1, "a lever", std::nullopt, 1, 1, true, false});
  g.edges.push_back({1, 0});
  const auto table = small_table();
  const auto eg = flan::embed_graph(g, flan::TableBackend{&table});
  EXPECT_EQ(eg.features(0, 1), -1.5);
  EXPECT_EQ(eg.features(1, 2), -0.125);
  g.nodes[1].text = "a cam";
  EXPECT_EQ(code_of([&] { flan::embed_graph(g, flan::TableBackend{&table}); }), ErrorCode::kMissingEmbedding);
  EXPECT_EQ(flan::backend_dim(flan::TableBackend{&table}), 3);
  EXPECT_EQ(flan::backend_dim(flan::HashBackend{64, 0}), 64);
}

}  // namespace

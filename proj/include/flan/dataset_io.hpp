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

// Corpus ingestion: application JSONL (optionally gzip-compressed), the
// time-ordered split, external feature vectors and corpus statistics.

#pragma once

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flan/core.hpp"
#include "flan/error.hpp"

namespace flan {

// Reads a whole file; gzip input is detected from its magic bytes and
// inflated transparently.
inline std::string read_text_file(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) fail(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::string out;
  char buf[1 << 16];
  for (;;) {
    const int n = gzread(f, buf, sizeof buf);
    if (n < 0) {
      int errnum = 0;
      const std::string msg = gzerror(f, &errnum);
      gzclose(f);
      fail(ErrorCode::kIoError, "read error in '" + path + "': " + msg);
    }
    if (n == 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  gzclose(f);
  return out;
}

// Calls fn(line_number, line) for every non-blank line (1-based numbers).
template <class F>
void for_each_line(std::string_view content, F&& fn) {
  std::size_t line_no = 0, pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line_no, line);
    pos = nl + 1;
  }
}

struct LineError {
  std::size_t line = 0;
  ErrorCode code = ErrorCode::kParseError;
  std::string message;
};

struct LoadReport {
  std::vector<Application> applications;
  std::vector<LineError> errors;
};

inline std::string describe(const LineError& e) {
  return "line " + std::to_string(e.line) + ": " + std::string(error_code_name(e.code)) + ": " +
         e.message;
}

// Parses application JSONL. Malformed lines are collected with their line
// numbers; in strict mode the first one is thrown.
inline LoadReport parse_applications(std::string_view content, bool strict = false) {
  LoadReport report;
  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    LineError err{line_no, ErrorCode::kParseError, {}};
    try {
      json j = json::parse(line);
      report.applications.push_back(application_from_json(j));
      return;
    } catch (const json::exception& e) {
      err.message = e.what();
    } catch (const Error& e) {
      err.code = e.code() == ErrorCode::kParseError ? ErrorCode::kParseError
                                                     : ErrorCode::kInvariantViolation;
      err.message = e.what();
    }
    if (strict) fail(err.code, "line " + std::to_string(line_no) + ": " + err.message);
    report.errors.push_back(std::move(err));
  });
  return report;
}

inline LoadReport load_applications(const std::string& path, bool strict = false) {
  return parse_applications(read_text_file(path), strict);
}

// Keeps applications filed on or after `min_date`.
inline std::vector<Application> filter_min_date(std::vector<Application> apps,
                                                std::string_view min_date) {
  const std::string cutoff = normalize_iso_date(min_date);
  std::erase_if(apps, [&](const Application& a) { return a.filing_date() < cutoff; });
  return apps;
}

struct SplitIndices {
  std::vector<std::size_t> train, valid, test;
};

// Orders keys (filing_date, application_id) ascending, then cuts
// floor(train_frac·n) training and floor(valid_frac·n) validation entries;
// the rest is test.
inline SplitIndices split_indices_by_date(
    std::span<const std::pair<std::string, std::string>> keys, double train_frac,
    double valid_frac) {
  if (!(train_frac > 0.0) || !(valid_frac > 0.0) || !(train_frac + valid_frac < 1.0))
    fail(ErrorCode::kInvalidArgument,
         "split fractions need 0 < train, 0 < valid and train + valid < 1");
  if (keys.empty()) fail(ErrorCode::kEmptyInput, "nothing to split");
  std::vector<std::size_t> order(keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  const auto n = static_cast<double>(order.size());
  const auto n_train = static_cast<std::ptrdiff_t>(std::floor(train_frac * n));
  const auto n_valid = static_cast<std::ptrdiff_t>(std::floor(valid_frac * n));
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.valid.assign(order.begin() + n_train, order.begin() + n_train + n_valid);
  s.test.assign(order.begin() + n_train + n_valid, order.end());
  return s;
}

inline DatasetSplit split_by_date(std::span<const Application> apps, double train_frac,
                                  double valid_frac) {
  std::vector<std::pair<std::string, std::string>> keys;
  keys.reserve(apps.size());
  for (const auto& a : apps) keys.emplace_back(a.filing_date(), a.application_id());
  const SplitIndices idx = split_indices_by_date(keys, train_frac, valid_frac);
  DatasetSplit s;
  for (auto i : idx.train) s.train.push_back(&apps[i]);
  for (auto i : idx.valid) s.valid.push_back(&apps[i]);
  for (auto i : idx.test) s.test.push_back(&apps[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Feature vectors

struct FeatureStore {
  std::size_t dim = 0;
  std::map<std::pair<std::string, int>, std::vector<double>> vectors;

  std::size_t size() const { return vectors.size(); }

  const std::vector<double>* find(const std::string& application_id, int claim_number) const {
    auto it = vectors.find({application_id, claim_number});
    return it == vectors.end() ? nullptr : &it->second;
  }
};

inline FeatureStore parse_features(std::string_view content) {
  FeatureStore store;
  bool first = true;
  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorCode::kParseError, where + e.what());
    }
    if (!j.is_object() || !j.contains("application_id") || !j["application_id"].is_string() ||
        !j.contains("claim_number") || !j["claim_number"].is_number_integer() ||
        !j.contains("vec") || !j["vec"].is_array())
      fail(ErrorCode::kParseError, where + "expected {application_id, claim_number, vec}");
    std::vector<double> vec;
    for (const auto& x : j["vec"]) {
      if (!x.is_number()) fail(ErrorCode::kParseError, where + "vec holds a non-number");
      vec.push_back(x.get<double>());
      if (!std::isfinite(vec.back())) fail(ErrorCode::kNonFinite, where + "non-finite value");
    }
    if (first) {
      store.dim = vec.size();
      first = false;
    } else if (vec.size() != store.dim) {
      fail(ErrorCode::kDimMismatch, where + "vector length " + std::to_string(vec.size()) +
                                        " != " + std::to_string(store.dim));
    }
    auto key = std::make_pair(j["application_id"].get<std::string>(), j["claim_number"].get<int>());
    if (!store.vectors.emplace(key, std::move(vec)).second)
      fail(ErrorCode::kDuplicateKey,
           where + "duplicate key (" + key.first + ", " + std::to_string(key.second) + ")");
  });
  return store;
}

inline FeatureStore load_features(const std::string& path) {
  return parse_features(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Statistics

struct CorpusStats {
  long long applications = 0;
  long long claims = 0;
  long long labeled_claims = 0;
  long long approved = 0;
  double approval_pct = 0.0;  // over labeled claims
  double mean_claims = 0.0;   // per application
};

inline CorpusStats corpus_stats(std::span<const Application> apps) {
  CorpusStats s;
  s.applications = static_cast<long long>(apps.size());
  for (const auto& a : apps) {
    for (const auto& c : a.claims()) {
      ++s.claims;
      if (c.label()) {
        ++s.labeled_claims;
        s.approved += *c.label();
      }
    }
  }
  if (s.labeled_claims)
    s.approval_pct = 100.0 * static_cast<double>(s.approved) / static_cast<double>(s.labeled_claims);
  if (s.applications)
    s.mean_claims = static_cast<double>(s.claims) / static_cast<double>(s.applications);
  return s;
}

inline void to_json(json& j, const CorpusStats& s) {
  j = json{{"applications", s.applications},   {"claims", s.claims},
           {"labeled_claims", s.labeled_claims}, {"approved", s.approved},
           {"approval_pct", s.approval_pct},     {"mean_claims", s.mean_claims}};
}

}  // namespace flan

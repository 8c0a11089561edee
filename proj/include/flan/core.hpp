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

// Domain types shared by every stage of the pipeline: applications, claims,
// parsed claim segments and their identities.

#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "flan/error.hpp"
#include "flan/text.hpp"
#include "json.hpp"

namespace flan {

using json = nlohmann::json;

// Validates an ISO-8601 calendar date and returns its canonical YYYY-MM-DD
// form. Accepts the basic form YYYYMMDD and a trailing time part.
inline std::string normalize_iso_date(std::string_view raw) {
  std::string s = text::trim(raw);
  if (s.size() > 10 && s[4] == '-' && (s[10] == 'T' || s[10] == ' '))
    s.resize(10);
  if (s.size() == 8 && text::is_number(s))
    s = s.substr(0, 4) + "-" + s.substr(4, 2) + "-" + s.substr(6, 2);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
      !text::is_number(s.substr(0, 4)) || !text::is_number(s.substr(5, 2)) ||
      !text::is_number(s.substr(8, 2)))
    fail(ErrorCode::kInvariantViolation, "not an ISO-8601 date: '" + std::string(raw) + "'");
  const std::chrono::year_month_day ymd{
      std::chrono::year{std::stoi(s.substr(0, 4))},
      std::chrono::month{static_cast<unsigned>(std::stoi(s.substr(5, 2)))},
      std::chrono::day{static_cast<unsigned>(std::stoi(s.substr(8, 2)))}};
  if (!ymd.ok())
    fail(ErrorCode::kInvariantViolation, "invalid calendar date: '" + s + "'");
  return s;
}

class Claim {
 public:
  Claim(int number, std::string text, std::optional<int> label = std::nullopt)
      : number_(number), text_(std::move(text)), label_(label) {
    if (number_ <= 0)
      fail(ErrorCode::kInvariantViolation,
           "claim number must be positive, got " + std::to_string(number_));
    if (text::trim(text_).empty())
      fail(ErrorCode::kInvariantViolation,
           "claim " + std::to_string(number_) + " has empty text");
    if (label_ && *label_ != 0 && *label_ != 1)
      fail(ErrorCode::kInvariantViolation,
           "claim " + std::to_string(number_) + " label must be 0 or 1");
  }

  int number() const noexcept { return number_; }
  const std::string& text() const noexcept { return text_; }
  const std::optional<int>& label() const noexcept { return label_; }

  friend bool operator==(const Claim&, const Claim&) = default;

 private:
  int number_;
  std::string text_;
  std::optional<int> label_;
};

class Application {
 public:
  Application(std::string application_id, std::string_view filing_date,
              std::vector<Claim> claims)
      : id_(std::move(application_id)),
        filing_date_(normalize_iso_date(filing_date)),
        claims_(std::move(claims)) {
    if (id_.empty())
      fail(ErrorCode::kInvariantViolation, "application_id is empty");
    std::stable_sort(claims_.begin(), claims_.end(),
                     [](const Claim& a, const Claim& b) { return a.number() < b.number(); });
    for (std::size_t i = 1; i < claims_.size(); ++i) {
      if (claims_[i].number() == claims_[i - 1].number())
        fail(ErrorCode::kInvariantViolation,
             "application " + id_ + " has duplicate claim number " +
                 std::to_string(claims_[i].number()));
    }
  }

  const std::string& application_id() const noexcept { return id_; }
  const std::string& filing_date() const noexcept { return filing_date_; }
  const std::vector<Claim>& claims() const noexcept { return claims_; }

  const Claim* find_claim(int number) const {
    auto it = std::lower_bound(claims_.begin(), claims_.end(), number,
                               [](const Claim& c, int n) { return c.number() < n; });
    return (it != claims_.end() && it->number() == number) ? &*it : nullptr;
  }

  friend bool operator==(const Application&, const Application&) = default;

 private:
  std::string id_;
  std::string filing_date_;
  std::vector<Claim> claims_;
};

struct Identity {
  std::string surface;     // verbatim span from the segment text
  std::string normalized;  // lowercased, determiners and possessives removed
  int level = 0;

  friend bool operator==(const Identity&, const Identity&) = default;
};

enum class SegmentKind { kPreamble, kComponent };

struct ClaimSegment {
  std::string text;
  int level = 0;
  std::optional<Identity> identity;
  SegmentKind kind = SegmentKind::kComponent;
  // Leading "and"/"or" removed from `text`, kept so segment texts can be
  // reassembled into the original token stream.
  std::string connective;
  // Index of the parent segment within ParsedClaim::components, -1 for
  // segments attached directly under the preamble.
  int parent = -1;

  friend bool operator==(const ClaimSegment&, const ClaimSegment&) = default;
};

// Partition of a corpus into time-ordered train/valid/test sets. Holds
// non-owning pointers into the vector the split was computed from.
struct DatasetSplit {
  std::vector<const Application*> train;
  std::vector<const Application*> valid;
  std::vector<const Application*> test;
};

// ---------------------------------------------------------------------------
// JSON mapping

inline void to_json(json& j, const Claim& c) {
  j = json{{"number", c.number()}, {"text", c.text()}};
  j["label"] = c.label() ? json(*c.label()) : json(nullptr);
}

inline Claim claim_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kParseError, "claim is not an object");
  if (!j.contains("number") || !j["number"].is_number_integer())
    fail(ErrorCode::kParseError, "claim.number missing or not an integer");
  if (!j.contains("text") || !j["text"].is_string())
    fail(ErrorCode::kParseError, "claim.text missing or not a string");
  std::optional<int> label;
  if (j.contains("label") && !j["label"].is_null()) {
    if (j["label"].is_boolean()) {
      label = j["label"].get<bool>() ? 1 : 0;
    } else if (j["label"].is_number_integer()) {
      label = j["label"].get<int>();
    } else {
      fail(ErrorCode::kParseError, "claim.label must be 0, 1 or null");
    }
  }
  return Claim(j["number"].get<int>(), j["text"].get<std::string>(), label);
}

inline void to_json(json& j, const Application& a) {
  j = json{{"application_id", a.application_id()},
           {"filing_date", a.filing_date()},
           {"claims", a.claims()}};
}

inline Application application_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kParseError, "application is not an object");
  for (const char* key : {"application_id", "filing_date", "claims"})
    if (!j.contains(key)) fail(ErrorCode::kParseError, std::string("missing field '") + key + "'");
  if (!j["application_id"].is_string() || !j["filing_date"].is_string() ||
      !j["claims"].is_array())
    fail(ErrorCode::kParseError, "application fields have wrong types");
  std::vector<Claim> claims;
  for (const auto& c : j["claims"]) claims.push_back(claim_from_json(c));
  return Application(j["application_id"].get<std::string>(),
                     j["filing_date"].get<std::string>(), std::move(claims));
}

inline void to_json(json& j, const Identity& id) {
  j = json{{"surface", id.surface}, {"normalized", id.normalized}, {"level", id.level}};
}

inline void from_json(const json& j, Identity& id) {
  id.surface = j.at("surface").get<std::string>();
  id.normalized = j.at("normalized").get<std::string>();
  id.level = j.at("level").get<int>();
}

inline void to_json(json& j, const ClaimSegment& s) {
  j = json{{"text", s.text},
           {"level", s.level},
           {"kind", s.kind == SegmentKind::kPreamble ? "preamble" : "component"},
           {"connective", s.connective},
           {"parent", s.parent}};
  j["identity"] = s.identity ? json(*s.identity) : json(nullptr);
}

}  // namespace flan

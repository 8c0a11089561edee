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

// Byte-offset tokenizer and small string helpers shared by the parser,
// the graph builder and the hashing embedder.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace flan::text {

struct Token {
  std::string lower;  // ASCII-lowercased token text
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last byte
  bool is_word = false;
};

// Length in bytes of the whitespace sequence starting at text[i], 0 if none.
// Covers ASCII whitespace and the Unicode space separators encoded in UTF-8.
inline std::size_t whitespace_length(std::string_view text, std::size_t i) {
  const auto c = static_cast<unsigned char>(text[i]);
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f')
    return 1;
  auto byte = [&](std::size_t k) -> unsigned char {
    return i + k < text.size() ? static_cast<unsigned char>(text[i + k]) : 0;
  };
  if (c == 0xC2 && byte(1) == 0xA0) return 2;  // U+00A0
  if (c == 0xE1 && byte(1) == 0x9A && byte(2) == 0x80) return 3;  // U+1680
  if (c == 0xE2 && byte(1) == 0x80) {
    const unsigned char b = byte(2);
    if ((b >= 0x80 && b <= 0x8A) || b == 0xA8 || b == 0xA9 || b == 0xAF)
      return 3;  // U+2000..U+200A, U+2028, U+2029, U+202F
  }
  if (c == 0xE2 && byte(1) == 0x81 && byte(2) == 0x9F) return 3;  // U+205F
  if (c == 0xE3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;  // U+3000
  return 0;
}

inline bool is_hard_punct(char c) {
  switch (c) {
    case ',': case ';': case ':': case '(': case ')': case '[': case ']':
    case '{': case '}': case '"': case '!': case '?':
      return true;
    default:
      return false;
  }
}

// Characters peeled from the edges of a word but kept when internal
// ("user's", "visual-tracking", "1.5").
inline bool is_soft_punct(char c) {
  return c == '.' || c == '\'' || c == '-' || c == '/' || c == '`';
}

inline bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

inline bool is_number(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  auto push = [&](std::size_t b, std::size_t e, bool word) {
    if (b >= e) return;
    tokens.push_back({to_lower(text.substr(b, e - b)), b, e, word});
  };
  // Splits a whitespace-free chunk into peeled punctuation and one word.
  auto emit_chunk = [&](std::size_t b, std::size_t e) {
    while (b < e) {
      std::size_t k = b;
      while (k < e && !is_hard_punct(text[k])) ++k;
      // [b, k) is free of hard punctuation.
      std::size_t wb = b, we = k;
      while (wb < we && is_soft_punct(text[wb])) ++wb;
      while (we > wb && is_soft_punct(text[we - 1])) --we;
      for (std::size_t p = b; p < wb; ++p) push(p, p + 1, false);
      bool has_content = false;
      for (std::size_t p = wb; p < we; ++p) {
        if (!is_soft_punct(text[p])) {
          has_content = true;
          break;
        }
      }
      if (has_content) push(wb, we, true);
      for (std::size_t p = we; p < k; ++p) push(p, p + 1, false);
      if (k < e) push(k, k + 1, false);
      b = k + 1;
    }
  };
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t ws = whitespace_length(text, i);
    if (ws) {
      i += ws;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && whitespace_length(text, j) == 0) ++j;
    emit_chunk(i, j);
    i = j;
  }
  return tokens;
}

inline std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text))
    if (t.is_word) out.push_back(std::move(t.lower));
  return out;
}

inline bool is_trim_char(std::string_view text, std::size_t i, bool punct) {
  if (whitespace_length(text, i)) return true;
  if (!punct) return false;
  const char c = text[i];
  return c == ',' || c == ';' || c == ':' || c == '.';
}

// Strips whitespace (and, when `punct`, separator punctuation) from both ends.
inline std::string trim(std::string_view text, bool punct = false) {
  std::size_t b = 0;
  while (b < text.size()) {
    const std::size_t ws = whitespace_length(text, b);
    if (ws) {
      b += ws;
    } else if (is_trim_char(text, b, punct)) {
      ++b;
    } else {
      break;
    }
  }
  std::size_t e = text.size();
  while (e > b) {
    // Multi-byte whitespace always ends in a continuation byte; scan back to
    // a plausible start and re-test.
    std::size_t s = e - 1;
    while (s > b && (static_cast<unsigned char>(text[s]) & 0xC0) == 0x80) --s;
    const std::size_t ws = whitespace_length(text, s);
    if (ws && s + ws == e) {
      e = s;
    } else if (e - s == 1 && is_trim_char(text, s, punct)) {
      e = s;
    } else {
      break;
    }
  }
  return std::string(text.substr(b, e - b));
}

// Collapses whitespace runs to single spaces and drops spaces before
// separator punctuation.
inline std::string normalize_spacing(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t ws = whitespace_length(text, i);
    if (ws) {
      pending_space = true;
      i += ws;
      continue;
    }
    const char c = text[i];
    const bool sep = c == ',' || c == ';' || c == ':' || c == '.';
    if (pending_space && !out.empty() && !sep) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
    ++i;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace flan::text

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

// Rule-based claim parser.
//
// A claim is split into a preamble and a tree of component segments using
// punctuation (colons open a level, semicolons separate siblings) and the
// hierarchy conjunctions of claim drafting ("comprising", "consisting of",
// "configured to", "wherein", ...). References to earlier claims are found
// in the opening clause ("The system of claim 2, ..."). Every segment gets
// an identity: the head noun phrase, or verb plus object for functional
// segments, found by a chunker over closed word lists.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "flan/core.hpp"
#include "flan/error.hpp"
#include "flan/text.hpp"

namespace flan {

struct ParsedClaim {
  int claim_number = 0;
  std::optional<int> reference;
  ClaimSegment preamble;
  // Pre-order traversal of the component tree; ClaimSegment::parent indexes
  // into this vector.
  std::vector<ClaimSegment> components;
  std::string raw_text;
  std::vector<std::string> warnings;
};

namespace parser_detail {

using WordSet = std::unordered_set<std::string_view>;

inline const WordSet& determiners() {
  static const WordSet s = {"a", "an", "the", "said", "its", "their", "each",
                            "every", "another", "any", "some", "such", "this",
                            "these", "those", "his", "her", "our", "all", "no"};
  return s;
}

inline const WordSet& function_words() {
  static const WordSet s = {
      // prepositions
      "of", "in", "on", "at", "to", "from", "by", "for", "with", "within",
      "into", "onto", "through", "as", "over", "under", "between", "among",
      "via", "about", "against", "across", "along", "around", "after",
      "before", "during", "upon", "without", "toward", "towards", "per",
      "than", "behind", "beyond", "near", "throughout", "below", "above",
      // conjunctions and relatives
      "and", "or", "but", "nor", "if", "when", "while", "whereby", "wherein",
      "where", "which", "that", "who", "whom", "whose", "because", "although",
      "whether", "then", "thereby", "so", "whereas", "until", "unless",
      // auxiliaries
      "is", "are", "was", "were", "be", "been", "being", "am", "has", "have",
      "had", "having", "do", "does", "did", "can", "could", "may", "might",
      "must", "shall", "should", "will", "would",
      // pronouns
      "it", "they", "them", "he", "she", "we", "i", "you", "itself",
      "themselves", "him", "us", "one's",
      // adverbs and particles
      "also", "further", "not", "only", "away", "thereof", "therein",
      "respectively", "either", "both", "more", "less", "least", "most",
      "otherwise", "thereto", "therefrom", "again", "very", "out", "up",
      "down", "off",
      // hierarchy conjunction words
      "comprising", "comprises", "comprise", "consisting", "consists",
      "consist", "including", "includes", "whereby"};
  return s;
}

// Verbs that open functional segments ("receive authentication information
// from ..."). Closed list tuned to the claim register.
inline const WordSet& segment_verbs() {
  static const WordSet s = {
      "receive", "deliver", "use", "compare", "include", "transmit", "send",
      "determine", "generate", "store", "provide", "detect", "identify",
      "authenticate", "track", "assess", "recognize", "display", "process",
      "compute", "calculate", "select", "monitor", "measure", "obtain",
      "output", "retrieve", "authorize", "engage", "execute", "perform",
      "apply", "convert", "encode", "decode", "capture", "record", "analyze",
      "update", "create", "establish", "broadcast", "notify", "allow",
      "enable", "prevent", "move", "rotate", "couple", "connect", "attach",
      "insert", "heat", "cool", "mix", "form", "cut", "filter", "emit",
      "sense", "communicate", "verify", "estimate", "predict", "classify",
      "map", "assign", "render", "read", "write", "load", "issue", "request",
      "grant", "deny", "forward", "route", "schedule", "adjust", "modify",
      "remove", "add", "maintain", "indicate", "access", "scan", "validate",
      "encrypt", "decrypt", "train", "query", "return", "extract", "test"};
  return s;
}

// Words ending in "ed" or "ing" that are nouns, not participles.
inline const WordSet& participle_exceptions() {
  static const WordSet s = {
      "bed", "seed", "speed", "need", "feed", "shed", "reed", "weed", "bleed",
      "embed", "shred", "red", "sled", "steed", "creed", "breed", "deed",
      "hundred", "thing", "string", "ring", "spring", "housing", "bearing",
      "building", "opening", "ceiling", "coating", "fitting", "setting",
      "wing", "king", "casing", "packaging", "wiring", "clothing", "padding",
      "ping", "sibling", "shielding", "lighting", "tubing", "plumbing",
      "flooring", "siding", "bushing", "coupling", "mounting", "heading",
      "marking", "drawing", "painting", "reading", "training", "routing",
      "offering", "meeting", "listing", "pricing", "spacing", "timing",
      "ranking", "rating", "warning", "logging", "parking", "booking",
      "banking", "clustering", "hashing", "padding", "filling", "lining"};
  return s;
}

struct Conjunction {
  std::array<std::string_view, 2> words;
  std::size_t size;
};

inline const std::vector<Conjunction>& hierarchy_conjunctions() {
  static const std::vector<Conjunction> list = {
      {{"consisting", "of"}, 2}, {{"consists", "of"}, 2},
      {{"configured", "to"}, 2}, {{"comprising", ""}, 1},
      {{"comprises", ""}, 1},    {{"including", ""}, 1},
      {{"includes", ""}, 1},     {{"having", ""}, 1},
      {{"has", ""}, 1},          {{"whereby", ""}, 1},
      {{"wherein", ""}, 1},      {{"where", ""}, 1}};
  return list;
}

inline bool is_where_word(std::string_view w) {
  return w == "where" || w == "wherein" || w == "whereby";
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

inline bool is_participle(std::string_view w, std::string_view suffix) {
  return w.size() > suffix.size() + 2 && ends_with(w, suffix) &&
         !participle_exceptions().contains(w);
}

// Length (in tokens) of the hierarchy conjunction starting at tokens[k], or 0.
inline std::size_t conjunction_at(const std::vector<text::Token>& tokens,
                                  std::size_t k) {
  if (!tokens[k].is_word) return 0;
  for (const auto& c : hierarchy_conjunctions()) {
    if (tokens[k].lower != c.words[0]) continue;
    if (c.size == 1) return 1;
    if (k + 1 < tokens.size() && tokens[k + 1].is_word &&
        tokens[k + 1].lower == c.words[1])
      return 2;
  }
  return 0;
}

// Multi-token quantifiers skipped like determiners; returns tokens consumed.
inline std::size_t quantifier_at(const std::vector<text::Token>& t,
                                 std::size_t k, std::size_t end) {
  auto is = [&](std::size_t i, std::string_view w) {
    return i < end && t[i].is_word && t[i].lower == w;
  };
  if (is(k, "one") && is(k + 1, "or") && is(k + 2, "more"))
    return is(k + 3, "of") ? 4 : 3;
  if (is(k, "at") && is(k + 1, "least") && is(k + 2, "one"))
    return is(k + 3, "of") ? 4 : 3;
  if (is(k, "plurality") && is(k + 1, "of")) return 2;
  if (is(k, "a") && is(k + 1, "plurality") && is(k + 2, "of")) return 3;
  if (is(k, "one") && is(k + 1, "of")) return 2;
  return 0;
}

inline bool can_continue_np(const text::Token& t) {
  if (!t.is_word) return false;
  const std::string_view w = t.lower;
  if (function_words().contains(w) || determiners().contains(w)) return false;
  if (is_participle(w, "ed") || is_participle(w, "ing")) return false;
  return true;
}

inline bool can_start_np(const std::vector<text::Token>& t, std::size_t k,
                         std::size_t end) {
  if (!t[k].is_word) return false;
  const std::string_view w = t[k].lower;
  if (text::is_number(w)) return false;
  if (function_words().contains(w) || determiners().contains(w)) return false;
  if (is_participle(w, "ed")) return false;
  // "use the location information": a verb followed by a function word is
  // not a noun.
  if (segment_verbs().contains(w) &&
      (k + 1 >= end || !can_continue_np(t[k + 1])))
    return false;
  // "tracking component": a gerund modifier must be followed by a noun.
  if (is_participle(w, "ing"))
    return k + 1 < end && can_continue_np(t[k + 1]) &&
           !text::is_number(t[k + 1].lower);
  return true;
}

struct Span {
  std::size_t begin;  // token index
  std::size_t end;
  bool led_by_where = false;
};

// Maximal noun-phrase runs within tokens [from, to), skipping tokens
// flagged in `masked`.
inline std::vector<Span> noun_phrases(const std::vector<text::Token>& t,
                                      std::size_t from, std::size_t to,
                                      const std::vector<bool>& masked) {
  std::vector<Span> out;
  bool after_where = false;
  std::size_t k = from;
  while (k < to) {
    if (masked[k]) {
      ++k;
      continue;
    }
    if (t[k].is_word && is_where_word(t[k].lower)) after_where = true;
    if (std::size_t q = quantifier_at(t, k, to)) {
      k += q;
      continue;
    }
    if (!can_start_np(t, k, to)) {
      ++k;
      continue;
    }
    std::size_t e = k + 1;
    while (e < to && !masked[e] && can_continue_np(t[e])) ++e;
    out.push_back({k, e, after_where});
    after_where = false;
    k = e;
  }
  return out;
}

inline std::string strip_possessive(std::string_view w) {
  if (ends_with(w, "'s")) return std::string(w.substr(0, w.size() - 2));
  if (w.size() > 1 && w.back() == '\'') return std::string(w.substr(0, w.size() - 1));
  return std::string(w);
}

// Lowercased words of [b, e) without determiners and possessive markers.
inline std::string normalize_span(const std::vector<text::Token>& t,
                                  std::size_t b, std::size_t e,
                                  const std::vector<bool>& masked) {
  std::vector<std::string> words;
  for (std::size_t k = b; k < e; ++k) {
    if (masked[k] || !t[k].is_word) continue;
    if (determiners().contains(t[k].lower)) continue;
    std::string w = strip_possessive(t[k].lower);
    if (!w.empty()) words.push_back(std::move(w));
  }
  // Leading determiners and possessive pronouns never survive.
  while (!words.empty() && determiners().contains(words.front()))
    words.erase(words.begin());
  return text::join(words, " ");
}

inline bool is_claim_word(const text::Token& t) {
  return t.is_word && (t.lower == "claim" || t.lower == "claims");
}

// First number of a token such as "3" or "1-3"; nullopt when not numeric.
inline std::optional<long long> leading_number(std::string_view w) {
  std::size_t n = 0;
  while (n < w.size() && w[n] >= '0' && w[n] <= '9') ++n;
  if (n == 0 || n > 9) return std::nullopt;
  if (n < w.size()) {
    if (w[n] != '-') return std::nullopt;
    if (!text::is_number(w.substr(n + 1))) return std::nullopt;
  }
  return std::stoll(std::string(w.substr(0, n)));
}

constexpr std::array<std::string_view, 7> kReferenceConnectors = {
    "of", "to", "in", "with", "per", "under", "by"};

}  // namespace parser_detail

// Location and value of a claim reference inside a text.
struct ReferenceMatch {
  int number = 0;           // smallest referenced claim
  std::vector<int> numbers; // every referenced claim, in order of mention
  std::size_t begin = 0;    // byte span covering "of claim 2" / "according to claim 3 or claim 5"
  std::size_t end = 0;
};

// Scans the opening clause for a reference. Returns nullopt when there is
// none; throws MalformedReference when the pattern is present but the claim
// number is not a positive integer.
inline std::optional<ReferenceMatch> find_reference(std::string_view text_in) {
  using namespace parser_detail;
  const auto t = text::tokenize(text_in);
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!t[k].is_word) {
      if (t[k].lower == ",") return std::nullopt;  // end of first clause
      continue;
    }
    if (conjunction_at(t, k)) return std::nullopt;
    if (!is_claim_word(t[k]) || k == 0 || !t[k - 1].is_word) continue;
    const std::string_view prev = t[k - 1].lower;
    if (std::find(kReferenceConnectors.begin(), kReferenceConnectors.end(),
                  prev) == kReferenceConnectors.end())
      continue;
    ReferenceMatch m;
    m.begin = t[k - 1].begin;
    if (prev == "to" && k >= 2 && t[k - 2].is_word &&
        (t[k - 2].lower == "according" || t[k - 2].lower == "pursuant"))
      m.begin = t[k - 2].begin;
    std::size_t j = k + 1;
    if (j >= t.size() || !t[j].is_word)
      fail(ErrorCode::kMalformedReference,
           "reference to claim without a number in: '" + std::string(text_in.substr(0, 80)) + "'");
    m.end = t[k].end;
    // Number list: "claim 3 or claim 5", "claims 1, 2 or 4", "claims 1-3".
    bool expect_number = true;
    while (j < t.size()) {
      const auto& tok = t[j];
      if (expect_number && tok.is_word) {
        auto n = leading_number(tok.lower);
        if (!n || *n <= 0 || *n > 1'000'000) {
          if (m.numbers.empty())
            fail(ErrorCode::kMalformedReference,
                 "claim reference '" + tok.lower + "' is not a positive integer");
          break;
        }
        m.numbers.push_back(static_cast<int>(*n));
        m.end = tok.end;
        expect_number = false;
        ++j;
        continue;
      }
      if (expect_number) break;
      // Between numbers: "or", "and", "to", ",", "claim".
      const std::string_view w = tok.lower;
      std::size_t step = 0;
      if (w == "or" || w == "and" || w == "to" || w == "through" || w == "," ||
          w == "-") {
        step = 1;
        if (j + 1 < t.size() && is_claim_word(t[j + 1])) step = 2;
      } else if (is_claim_word(tok)) {
        step = 1;
      }
      if (step == 0 || j + step >= t.size()) break;
      const auto& next = t[j + step];
      if (!next.is_word || !leading_number(next.lower)) break;
      j += step;
      expect_number = true;
    }
    m.number = *std::min_element(m.numbers.begin(), m.numbers.end());
    return m;
  }
  return std::nullopt;
}

// Number of the claim referenced in the opening clause, if any. For
// multi-reference claims ("claim 1 or 2") the smallest number is returned.
inline std::optional<int> detect_reference(std::string_view text_in) {
  if (text::trim(text_in).empty())
    fail(ErrorCode::kInvalidArgument, "detect_reference on empty text");
  auto m = find_reference(text_in);
  if (!m) return std::nullopt;
  return m->number;
}

namespace parser_detail {

inline std::vector<bool> reference_mask(const std::vector<text::Token>& t,
                                        std::string_view text_in) {
  std::vector<bool> masked(t.size(), false);
  std::optional<ReferenceMatch> ref;
  try {
    ref = find_reference(text_in);
  } catch (const Error&) {
    return masked;
  }
  if (!ref) return masked;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k].begin >= ref->begin && t[k].end <= ref->end) masked[k] = true;
  return masked;
}

}  // namespace parser_detail

// Identity of a segment: its first noun phrase, or verb plus first object
// noun phrase when the segment opens with a known verb.
inline Identity extract_identity(std::string_view segment_text, int level) {
  using namespace parser_detail;
  if (text::trim(segment_text).empty())
    fail(ErrorCode::kInvalidArgument, "extract_identity on empty segment");
  const auto t = text::tokenize(segment_text);
  const auto masked = reference_mask(t, segment_text);

  std::size_t first = 0;
  while (first < t.size() &&
         (masked[first] || !t[first].is_word || t[first].lower == "and" ||
          t[first].lower == "or"))
    ++first;

  auto make = [&](std::size_t b, std::size_t e) {
    Identity id;
    id.surface = std::string(segment_text.substr(t[b].begin, t[e - 1].end - t[b].begin));
    id.normalized = normalize_span(t, b, e, masked);
    id.level = level;
    return id;
  };

  if (first < t.size() && segment_verbs().contains(t[first].lower)) {
    // Object: skip up to two prepositions or quantifiers, then a noun phrase.
    std::size_t k = first + 1;
    int skipped = 0;
    while (k < t.size() && t[k].is_word && skipped < 3) {
      if (std::size_t q = quantifier_at(t, k, t.size())) {
        k += q;
        ++skipped;
        continue;
      }
      if (determiners().contains(t[k].lower)) {
        ++k;
        continue;
      }
      if (can_start_np(t, k, t.size())) break;
      if (!function_words().contains(t[k].lower)) break;
      ++k;
      ++skipped;
    }
    if (k < t.size() && !masked[k] && can_start_np(t, k, t.size())) {
      std::size_t e = k + 1;
      while (e < t.size() && !masked[e] && can_continue_np(t[e])) ++e;
      return make(first, e);
    }
  }

  const auto nps = noun_phrases(t, first, t.size(), masked);
  for (const auto& np : nps) {
    Identity id = make(np.begin, np.end);
    if (!id.normalized.empty()) return id;
  }
  fail(ErrorCode::kNoIdentity,
       "no noun phrase in segment '" + std::string(segment_text.substr(0, 60)) + "'");
}

// A noun phrase mention found in a preamble, normalized for matching.
struct Mention {
  std::string normalized;
  bool led_by_where = false;
};

// Every noun phrase of `text_in` outside the claim-reference phrase.
inline std::vector<Mention> preamble_mentions(std::string_view text_in) {
  using namespace parser_detail;
  const auto t = text::tokenize(text_in);
  const auto masked = reference_mask(t, text_in);
  std::vector<Mention> out;
  for (const auto& np : noun_phrases(t, 0, t.size(), masked)) {
    std::string norm = normalize_span(t, np.begin, np.end, masked);
    if (!norm.empty()) out.push_back({std::move(norm), np.led_by_where});
  }
  return out;
}

// Result of splitting a claim; identities are not yet filled.
struct Segmentation {
  ClaimSegment preamble;
  std::vector<ClaimSegment> components;
};

namespace parser_detail {

inline bool is_item_marker(const std::vector<text::Token>& t, std::size_t k) {
  // "(a)", "(1)", "(ii)"
  if (k + 2 < t.size() && t[k].lower == "(" && t[k + 1].is_word &&
      t[k + 1].lower.size() <= 4 && t[k + 2].lower == ")")
    return true;
  // "a)", "1)"
  if (k + 1 < t.size() && t[k].is_word && t[k].lower.size() <= 2 &&
      t[k + 1].lower == ")")
    return true;
  return false;
}

inline void strip_connective(ClaimSegment& seg) {
  const auto t = text::tokenize(seg.text);
  if (t.size() >= 2 && t[0].is_word && (t[0].lower == "and" || t[0].lower == "or")) {
    seg.connective = seg.text.substr(t[0].begin, t[0].end - t[0].begin);
    seg.text = text::trim(std::string_view(seg.text).substr(t[0].end), true);
  }
}

}  // namespace parser_detail

// Splits claim text into a preamble and a pre-order component tree.
// Throws EmptySegment when punctuation produces a zero-length component.
inline Segmentation segment_claim(std::string_view text_in) {
  using namespace parser_detail;
  const std::string full = text::trim(text_in);
  if (full.empty()) fail(ErrorCode::kInvalidArgument, "segment_claim on empty text");
  const std::string_view s = full;
  const auto t = text::tokenize(s);

  Segmentation out;
  out.preamble.kind = SegmentKind::kPreamble;
  out.preamble.level = 0;

  // Locate the end of the preamble: the first conjunction followed by a
  // colon or an itemized list, scanned up to the first colon or semicolon.
  std::optional<std::size_t> body_begin;  // byte offset
  std::size_t preamble_end = 0;
  int depth = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const std::string_view w = t[k].lower;
    if (!t[k].is_word) {
      if (w == "(") ++depth;
      if (w == ")") depth = std::max(0, depth - 1);
      if (depth == 0 && (w == ":" || w == ";")) {
        if (w == ":") {
          preamble_end = t[k].begin;
          body_begin = t[k].end;
        }
        break;
      }
      continue;
    }
    if (depth) continue;
    const std::size_t len = conjunction_at(t, k);
    if (!len) continue;
    const std::size_t after = k + len;
    bool fires = false;
    if (after < t.size() && t[after].lower == ":") {
      fires = true;
    } else if (after < t.size() && is_item_marker(t, after)) {
      fires = true;
    } else {
      // Semicolon-separated list with no colon before the first semicolon.
      for (std::size_t j = after; j < t.size(); ++j) {
        if (t[j].lower == ":") break;
        if (t[j].lower == ";") {
          fires = true;
          break;
        }
      }
    }
    if (fires) {
      preamble_end = t[after - 1].end;
      body_begin = (after < t.size() && t[after].lower == ":") ? t[after].end
                                                               : t[after - 1].end;
      break;
    }
  }

  auto inner_free = [&] {
    Segmentation flat;
    flat.preamble.kind = SegmentKind::kPreamble;
    flat.preamble.level = 0;
    flat.preamble.text = full;
    return flat;
  };
  if (!body_begin) return inner_free();

  out.preamble.text = text::trim(s.substr(0, preamble_end), true);
  if (out.preamble.text.empty())
    fail(ErrorCode::kEmptySegment, "empty preamble");

  // Walk the body: ':' opens a child level, ';' separates siblings, and a
  // sibling led by "and"/"or" closes its level at the following ';'.
  std::vector<int> stack;  // open parent component indices
  std::size_t item_begin = *body_begin;
  depth = 0;
  auto emit = [&](std::size_t b, std::size_t e) -> int {
    ClaimSegment seg;
    seg.kind = SegmentKind::kComponent;
    seg.text = text::trim(s.substr(b, e - b), true);
    strip_connective(seg);
    if (seg.text.empty())
      fail(ErrorCode::kEmptySegment, "zero-length component at byte " + std::to_string(b));
    seg.level = static_cast<int>(stack.size()) + 1;
    seg.parent = stack.empty() ? -1 : stack.back();
    out.components.push_back(std::move(seg));
    return static_cast<int>(out.components.size()) - 1;
  };
  for (std::size_t i = *body_begin; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '(') ++depth;
    if (c == ')') depth = std::max(0, depth - 1);
    if (depth) continue;
    if (c == ':') {
      stack.push_back(emit(item_begin, i));
      item_begin = i + 1;
    } else if (c == ';') {
      const int idx = emit(item_begin, i);
      item_begin = i + 1;
      if (!out.components[idx].connective.empty() && !stack.empty()) stack.pop_back();
    }
  }
  emit(item_begin, s.size());

  // A single component is a single entity: no inner dependency.
  if (out.components.size() == 1) return inner_free();
  return out;
}

// detect_reference + segment_claim + extract_identity for one claim.
inline ParsedClaim parse(const Claim& claim) {
  ParsedClaim pc;
  pc.claim_number = claim.number();
  pc.raw_text = claim.text();

  if (auto ref = find_reference(claim.text())) {
    if (ref->number >= claim.number())
      fail(ErrorCode::kMalformedReference,
           "claim " + std::to_string(claim.number()) + " refers to claim " +
               std::to_string(ref->number) + ", which is not earlier");
    pc.reference = ref->number;
    if (ref->numbers.size() > 1)
      pc.warnings.push_back("multiple references; using smallest claim " +
                            std::to_string(ref->number));
  }

  Segmentation seg;
  try {
    seg = segment_claim(claim.text());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptySegment) throw;
    pc.warnings.push_back(std::string("segmentation fallback: ") + e.what());
    seg = Segmentation{};
    seg.preamble.kind = SegmentKind::kPreamble;
    seg.preamble.text = text::trim(claim.text());
  }
  pc.preamble = std::move(seg.preamble);
  pc.components = std::move(seg.components);

  auto fill = [&](ClaimSegment& s) {
    try {
      s.identity = extract_identity(s.text, s.level);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoIdentity) throw;
      pc.warnings.push_back(e.what());
    }
  };
  fill(pc.preamble);
  for (auto& c : pc.components) fill(c);
  return pc;
}

inline void to_json(json& j, const ParsedClaim& p) {
  j = json{{"claim_number", p.claim_number},
           {"preamble", p.preamble},
           {"components", p.components},
           {"raw_text", p.raw_text},
           {"warnings", p.warnings}};
  j["reference"] = p.reference ? json(*p.reference) : json(nullptr);
}

}  // namespace flan

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

// Per-claim dependency graphs.
//
// A FLAN graph holds the segments of one claim plus every node inherited
// from the claims it depends on. Edges point from leaf to root. Two
// ablation structures are provided: the coarse graph (one node per claim on
// the reference chain) and the solitary node (the claim text alone).

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "flan/claim_parser.hpp"
#include "flan/core.hpp"
#include "flan/error.hpp"
#include "flan/text.hpp"

namespace flan {

struct FlanNode {
  int node_id = 0;
  std::string text;
  std::optional<Identity> identity;
  int level = 0;
  int origin_claim = 0;
  bool is_target = false;
  bool is_root = false;

  friend bool operator==(const FlanNode&, const FlanNode&) = default;
};

struct Edge {
  int from = 0;  // deeper node
  int to = 0;    // node receiving the message

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// node_id equals the node's index in `nodes`.
struct FlanGraph {
  int claim_number = 0;
  std::vector<FlanNode> nodes;
  std::vector<Edge> edges;

  int root_id() const {
    for (const auto& n : nodes)
      if (n.is_root) return n.node_id;
    return -1;
  }

  std::vector<int> target_ids() const {
    std::vector<int> out;
    for (const auto& n : nodes)
      if (n.is_target) out.push_back(n.node_id);
    return out;
  }

  friend bool operator==(const FlanGraph&, const FlanGraph&) = default;
};

using GraphMap = std::map<int, FlanGraph>;

enum class GraphMode { kFlan, kCoarse, kSolitary };

inline std::string_view graph_mode_name(GraphMode m) {
  switch (m) {
    case GraphMode::kFlan: return "flan";
    case GraphMode::kCoarse: return "coarse";
    case GraphMode::kSolitary: return "solitary";
  }
  return "flan";
}

inline GraphMode parse_graph_mode(std::string_view s) {
  if (s == "flan") return GraphMode::kFlan;
  if (s == "coarse") return GraphMode::kCoarse;
  if (s == "solitary") return GraphMode::kSolitary;
  fail(ErrorCode::kInvalidArgument, "unknown graph mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Validation

// Structural checks shared by every builder. Returns one message per
// violation; an empty result means the graph is a valid in-tree.
inline std::vector<std::string> validate_graph(const FlanGraph& g) {
  std::vector<std::string> errs;
  const int n = static_cast<int>(g.nodes.size());
  if (n == 0) {
    errs.push_back("graph has no nodes");
    return errs;
  }
  int roots = 0, targets = 0;
  for (int i = 0; i < n; ++i) {
    const auto& node = g.nodes[i];
    if (node.node_id != i) errs.push_back("node_id " + std::to_string(node.node_id) +
                                          " stored at index " + std::to_string(i));
    roots += node.is_root;
    targets += node.is_target;
    if (node.is_target != (node.origin_claim == g.claim_number))
      errs.push_back("target flag of node " + std::to_string(i) +
                     " disagrees with origin claim");
  }
  if (roots != 1) errs.push_back("expected one root, found " + std::to_string(roots));
  if (targets < 1) errs.push_back("graph has no target node");

  std::vector<int> out_deg(n, 0), parent(n, -1);
  for (const auto& e : g.edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      errs.push_back("edge endpoint out of range");
      return errs;
    }
    if (e.from == e.to) errs.push_back("self edge on node " + std::to_string(e.from));
    ++out_deg[e.from];
    parent[e.from] = e.to;
  }
  const int root = g.root_id();
  for (int i = 0; i < n; ++i) {
    if (i == root && out_deg[i] != 0) errs.push_back("root has outgoing edges");
    if (i != root && out_deg[i] != 1)
      errs.push_back("node " + std::to_string(i) + " has " + std::to_string(out_deg[i]) +
                     " outgoing edges");
  }
  if (!errs.empty()) return errs;
  // With one outgoing edge per non-root node, reaching the root from every
  // node within n steps proves acyclicity and connectivity.
  for (int i = 0; i < n; ++i) {
    int v = i, steps = 0;
    while (v != root && steps <= n) {
      v = parent[v];
      ++steps;
    }
    if (v != root) errs.push_back("node " + std::to_string(i) + " does not reach the root");
  }
  if (g.nodes[root].level != 0) errs.push_back("root level is not 0");
  for (const auto& e : g.edges)
    if (g.nodes[e.from].level != g.nodes[e.to].level + 1)
      errs.push_back("edge " + std::to_string(e.from) + " -> " + std::to_string(e.to) +
                     " does not descend one level");
  return errs;
}

// ---------------------------------------------------------------------------
// Preamble matching

namespace graph_detail {

inline std::vector<std::string> match_tokens(std::string_view normalized) {
  std::vector<std::string> out;
  for (auto& w : text::words(normalized)) {
    // Plural folding: trailing "s" only, never "ss".
    if (w.size() > 3 && w.back() == 's' && w[w.size() - 2] != 's') w.pop_back();
    out.push_back(std::move(w));
  }
  return out;
}

inline double jaccard(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  if (a.empty() && b.empty()) return 0.0;
  std::vector<std::string> inter;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  const double uni = static_cast<double>(a.size() + b.size() - inter.size());
  return static_cast<double>(inter.size()) / uni;
}

}  // namespace graph_detail

struct AnchorMatch {
  int node_id = 0;
  int score = 0;  // 2 exact, 1 token overlap, 0 fallback
  bool fallback = false;
};

// Picks the node a dependent claim attaches to. Candidates are scored
// against every noun phrase of the preamble: 2 for an exact normalized
// match, 1 for token Jaccard >= 0.5. Ties go to the deepest candidate, then
// to one matched by a mention following "where"/"wherein", then to the
// smallest node id. No match at all falls back to the root.
inline AnchorMatch match_preamble(const ClaimSegment& preamble,
                                  std::span<const FlanNode> candidates) {
  using namespace graph_detail;
  if (candidates.empty())
    fail(ErrorCode::kInvalidArgument, "match_preamble without candidates");
  std::vector<std::pair<std::vector<std::string>, bool>> mentions;
  for (auto& m : preamble_mentions(preamble.text))
    mentions.emplace_back(match_tokens(m.normalized), m.led_by_where);

  struct Key {
    int score = 0;
    int level = 0;
    bool where = false;
    int node_id = 0;
  };
  auto better = [](const Key& a, const Key& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.level != b.level) return a.level > b.level;
    if (a.where != b.where) return a.where;
    return a.node_id < b.node_id;
  };
  std::optional<Key> best;
  for (const auto& node : candidates) {
    if (!node.identity) continue;
    const auto idt = match_tokens(node.identity->normalized);
    Key key{0, node.level, false, node.node_id};
    for (const auto& [mt, where] : mentions) {
      int s = 0;
      if (mt == idt) {
        s = 2;
      } else if (jaccard(mt, idt) >= 0.5) {
        s = 1;
      }
      if (s > key.score) {
        key.score = s;
        key.where = where;
      } else if (s == key.score && s > 0) {
        key.where = key.where || where;
      }
    }
    if (key.score == 0) continue;
    if (!best || better(key, *best)) best = key;
  }
  if (best) return {best->node_id, best->score, false};
  for (const auto& node : candidates)
    if (node.is_root) return {node.node_id, 0, true};
  return {candidates.front().node_id, 0, true};
}

// ---------------------------------------------------------------------------
// Builders

struct BuildReport {
  std::optional<AnchorMatch> anchor;
  std::vector<std::string> warnings;
};

namespace graph_detail {

inline int add_node(FlanGraph& g, std::string text, std::optional<Identity> identity,
                    int level, int origin, bool is_root) {
  FlanNode n;
  n.node_id = static_cast<int>(g.nodes.size());
  n.text = std::move(text);
  n.identity = std::move(identity);
  if (n.identity) n.identity->level = level;
  n.level = level;
  n.origin_claim = origin;
  n.is_target = origin == g.claim_number;
  n.is_root = is_root;
  g.nodes.push_back(std::move(n));
  return g.nodes.back().node_id;
}

// Claim text with the bare reference phrase ("of claim 1") removed.
inline std::string strip_reference(std::string_view raw) {
  auto ref = find_reference(raw);
  std::string s(raw);
  if (ref) s = s.substr(0, ref->begin) + s.substr(ref->end);
  return text::normalize_spacing(text::trim(s));
}

struct BodySplit {
  std::string qualifier;  // restates the anchor: "The system, where the X is configured to"
  std::string feature;    // the new feature; empty when the body is not split
};

// Splits a dependent claim without inner structure at the first hierarchy
// conjunction after its "where"/"wherein" clause opener.
inline BodySplit split_dependent_body(const std::string& stripped) {
  using namespace parser_detail;
  const auto t = text::tokenize(stripped);
  std::size_t from = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k].is_word && is_where_word(t[k].lower)) {
      from = k + 1;
      break;
    }
  }
  for (std::size_t k = from; k < t.size(); ++k) {
    const std::size_t len = conjunction_at(t, k);
    if (!len || is_where_word(t[k].lower)) continue;
    const std::size_t cut = t[k + len - 1].end;
    std::string head = text::trim(std::string_view(stripped).substr(0, cut), true);
    std::string tail = text::trim(std::string_view(stripped).substr(cut), true);
    if (head.empty() || text::words(tail).empty()) break;
    return {std::move(head), std::move(tail)};
  }
  return {text::trim(stripped, true), {}};
}

inline std::optional<Identity> try_identity(std::string_view s, int level,
                                            std::vector<std::string>& warnings) {
  try {
    return extract_identity(s, level);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoIdentity) throw;
    warnings.push_back(e.what());
    return std::nullopt;
  }
}

}  // namespace graph_detail

// FLAN graph of one claim. `ancestors` must already hold the graph of the
// referenced claim; it is deep-copied, never modified.
inline FlanGraph build_flan_graph(const ParsedClaim& parsed, const GraphMap& ancestors,
                                  BuildReport* report = nullptr) {
  using namespace graph_detail;
  BuildReport local;
  BuildReport& rep = report ? *report : local;
  FlanGraph g;
  g.claim_number = parsed.claim_number;
  const int self = parsed.claim_number;

  auto attach_components = [&](int anchor_id) {
    const int base = g.nodes[anchor_id].level;
    std::vector<int> ids(parsed.components.size(), -1);
    for (std::size_t i = 0; i < parsed.components.size(); ++i) {
      const auto& seg = parsed.components[i];
      const int parent = seg.parent < 0 ? anchor_id : ids[seg.parent];
      ids[i] = add_node(g, seg.text, seg.identity, base + seg.level, self, false);
      g.edges.push_back({ids[i], parent});
    }
  };

  if (!parsed.reference) {
    const int root = add_node(g, parsed.preamble.text, parsed.preamble.identity, 0, self, true);
    attach_components(root);
    return g;
  }

  auto it = ancestors.find(*parsed.reference);
  if (it == ancestors.end())
    fail(ErrorCode::kMissingAncestor, "claim " + std::to_string(self) +
                                          " refers to claim " + std::to_string(*parsed.reference) +
                                          ", whose graph is not available");
  const FlanGraph& parent = it->second;
  g.nodes = parent.nodes;
  g.edges = parent.edges;
  for (auto& n : g.nodes) n.is_target = false;

  const AnchorMatch anchor = match_preamble(parsed.preamble, parent.nodes);
  rep.anchor = anchor;
  if (anchor.fallback)
    rep.warnings.push_back("claim " + std::to_string(self) +
                           ": no identity matched, attached to root");

  if (!parsed.components.empty()) {
    attach_components(anchor.node_id);
    return g;
  }

  const int base = g.nodes[anchor.node_id].level;
  const BodySplit body = split_dependent_body(strip_reference(parsed.raw_text));
  if (body.feature.empty()) {
    auto id = try_identity(body.qualifier, base + 1, rep.warnings);
    const int n = add_node(g, body.qualifier, std::move(id), base + 1, self, false);
    g.edges.push_back({n, anchor.node_id});
    return g;
  }
  const int q = add_node(g, body.qualifier, std::nullopt, base + 1, self, false);
  g.edges.push_back({q, anchor.node_id});
  auto id = try_identity(body.feature, base + 2, rep.warnings);
  const int f = add_node(g, body.feature, std::move(id), base + 2, self, false);
  g.edges.push_back({f, q});
  return g;
}

// Coarse ablation: one node per claim on the chain from `claim_number` up to
// its independent ancestor. The ancestor is the root (node 0).
inline FlanGraph build_coarse_graph(std::span<const ParsedClaim> parsed_claims,
                                    int claim_number) {
  std::map<int, const ParsedClaim*> by_number;
  for (const auto& p : parsed_claims) by_number[p.claim_number] = &p;
  std::vector<const ParsedClaim*> chain;
  int current = claim_number;
  while (true) {
    auto it = by_number.find(current);
    if (it == by_number.end())
      fail(ErrorCode::kMissingAncestor, "claim " + std::to_string(current) +
                                            " is not in the application");
    chain.push_back(it->second);
    if (!it->second->reference) break;
    if (chain.size() > by_number.size())
      fail(ErrorCode::kInvariantViolation, "reference cycle at claim " + std::to_string(current));
    current = *it->second->reference;
  }
  std::reverse(chain.begin(), chain.end());
  FlanGraph g;
  g.claim_number = claim_number;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    graph_detail::add_node(g, chain[i]->raw_text, chain[i]->preamble.identity,
                           static_cast<int>(i), chain[i]->claim_number, i == 0);
    if (i > 0) g.edges.push_back({static_cast<int>(i), static_cast<int>(i) - 1});
  }
  return g;
}

// Solitary ablation: the claim text as a single root-and-target node.
inline FlanGraph build_solitary(const ParsedClaim& parsed) {
  FlanGraph g;
  g.claim_number = parsed.claim_number;
  graph_detail::add_node(g, parsed.raw_text, parsed.preamble.identity, 0,
                         parsed.claim_number, true);
  return g;
}

struct ClaimGraph {
  int claim_number = 0;
  FlanGraph graph;
  BuildReport report;
};

struct ApplicationGraphs {
  std::vector<ClaimGraph> graphs;  // claim-number order; failed claims omitted
  std::vector<std::pair<int, std::string>> errors;
};

// Parses and builds every claim of an application in claim-number order.
// Per-claim failures (parse errors, missing ancestors) are collected unless
// `strict`, in which case the first one is rethrown.
inline ApplicationGraphs build_application_graphs(const Application& app, GraphMode mode,
                                                  bool strict = false) {
  ApplicationGraphs out;
  std::vector<ParsedClaim> parsed;
  parsed.reserve(app.claims().size());
  std::vector<bool> ok;
  for (const auto& c : app.claims()) {
    try {
      parsed.push_back(parse(c));
      ok.push_back(true);
    } catch (const Error& e) {
      if (strict) throw;
      out.errors.emplace_back(c.number(), e.what());
      ParsedClaim dummy;
      dummy.claim_number = c.number();
      parsed.push_back(std::move(dummy));
      ok.push_back(false);
    }
  }
  std::vector<ParsedClaim> good;
  for (std::size_t i = 0; i < parsed.size(); ++i)
    if (ok[i]) good.push_back(parsed[i]);

  GraphMap built;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (!ok[i]) continue;
    const auto& p = parsed[i];
    try {
      ClaimGraph cg;
      cg.claim_number = p.claim_number;
      switch (mode) {
        case GraphMode::kFlan:
          cg.graph = build_flan_graph(p, built, &cg.report);
          built.emplace(p.claim_number, cg.graph);
          break;
        case GraphMode::kCoarse:
          cg.graph = build_coarse_graph(good, p.claim_number);
          break;
        case GraphMode::kSolitary:
          cg.graph = build_solitary(p);
          break;
      }
      cg.report.warnings.insert(cg.report.warnings.begin(), p.warnings.begin(),
                                p.warnings.end());
      out.graphs.push_back(std::move(cg));
    } catch (const Error& e) {
      if (strict) throw;
      out.errors.emplace_back(p.claim_number, e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export

enum class ExportFormat { kDot, kJson };

inline void to_json(json& j, const FlanNode& n) {
  j = json{{"id", n.node_id},          {"text", n.text},
           {"level", n.level},         {"origin_claim", n.origin_claim},
           {"is_target", n.is_target}, {"is_root", n.is_root}};
  j["identity"] = n.identity ? json(*n.identity) : json(nullptr);
}

inline void to_json(json& j, const FlanGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges) edges.push_back(json::array({e.from, e.to}));
  j = json{{"claim_number", g.claim_number}, {"nodes", g.nodes}, {"edges", std::move(edges)}};
}

inline FlanGraph graph_from_json(const json& j) {
  FlanGraph g;
  g.claim_number = j.at("claim_number").get<int>();
  for (const auto& jn : j.at("nodes")) {
    FlanNode n;
    n.node_id = jn.at("id").get<int>();
    n.text = jn.at("text").get<std::string>();
    n.level = jn.at("level").get<int>();
    n.origin_claim = jn.at("origin_claim").get<int>();
    n.is_target = jn.at("is_target").get<bool>();
    n.is_root = jn.at("is_root").get<bool>();
    if (jn.contains("identity") && !jn["identity"].is_null())
      n.identity = jn["identity"].get<Identity>();
    g.nodes.push_back(std::move(n));
  }
  for (const auto& je : j.at("edges")) g.edges.push_back({je.at(0).get<int>(), je.at(1).get<int>()});
  auto errs = validate_graph(g);
  if (!errs.empty()) fail(ErrorCode::kInvariantViolation, "invalid graph: " + errs.front());
  return g;
}

namespace graph_detail {

inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

// First `n` bytes of `s` without splitting a UTF-8 sequence.
inline std::string utf8_prefix(std::string_view s, std::size_t n) {
  if (s.size() <= n) return std::string(s);
  while (n > 0 && (static_cast<unsigned char>(s[n]) & 0xC0) == 0x80) --n;
  return std::string(s.substr(0, n));
}

}  // namespace graph_detail

inline std::string export_graph(const FlanGraph& g, ExportFormat format) {
  if (format == ExportFormat::kJson) return json(g).dump();
  std::ostringstream os;
  os << "digraph claim_" << g.claim_number << " {\n";
  os << "  rankdir=BT;\n";
  os << "  node [shape=box, style=rounded];\n";
  for (const auto& n : g.nodes) {
    const std::string label = n.identity ? n.identity->surface : graph_detail::utf8_prefix(n.text, 40);
    os << "  n" << n.node_id << " [label=\"" << graph_detail::dot_escape(label) << "\"";
    if (n.is_target) os << ", style=\"rounded,filled\", fillcolor=\"#f4b6b6\"";
    if (n.is_root) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& e : g.edges) os << "  n" << e.from << " -> n" << e.to << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace flan

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

// Acceptance suite. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "flan/commands.hpp"
#include "flan/synthetic.hpp"
#include "oracles/dense_gnn.hpp"
#include "oracles/graph_oracle.hpp"
#include "oracles/metric_oracles.hpp"
#include "support/grad_cases.hpp"
#include "support/random_cases.hpp"

namespace {

namespace fs = std::filesystem;
using testing_support::Rand;

// Pinned thresholds.
constexpr double kGoldenSeconds = 1.0;
constexpr int kStructuralApps = 1000;
constexpr double kStructuralSeconds = 30.0;
constexpr int kGradGraphsPerArch = 20;
constexpr double kGradRelTol = 1e-4;
constexpr double kGradSeconds = 60.0;
constexpr int kLayerTreesPerArch = 50;
constexpr double kLayerTol = 1e-10;
constexpr int kMetricInstances = 100;
constexpr int kMetricMaxN = 200;
constexpr double kAucTol = 1e-12;
constexpr double kMonotoneTol = 1e-12;
constexpr int kE2eApps = 300;
constexpr std::uint64_t kE2eCorpusSeed = 2025;
constexpr int kE2eHashDim = 128;
constexpr double kE2eMinAuc = 0.90;
constexpr double kE2eMinGap = 0.05;
constexpr double kE2eSeconds = 300.0;
constexpr long long kFullClaims = 1485693;
constexpr long long kFullApps = 87883;
constexpr const char* kFullApprovalPct = "81.36";

const std::string kData = FLAN_TEST_DATA;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const std::string& path) { return flan::embed_detail::read_file(path); }

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / "flan_acceptance" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string write_synthetic(const fs::path& dir, int apps, std::uint64_t seed) {
  flan::SyntheticOptions opt;
  opt.applications = apps;
  opt.seed = seed;
  std::string content;
  for (const auto& a : flan::synthetic_corpus(opt)) content += flan::json(a).dump() + "\n";
  const auto p = (dir / "corpus.jsonl").string();
  flan::cmd_detail::write_file(p, content);
  return p;
}

// ---------------------------------------------------------------------------

Outcome golden_fixtures() {
  Outcome o;
  auto miss = [&](const std::string& what) {
    o.pass = false;
    if (o.detail.size() < 200) o.detail += what + "; ";
  };
  const auto t0 = std::chrono::steady_clock::now();
  std::ifstream in(kData + "/fixture_golden.json");
  const auto golden = flan::json::parse(in);
  const auto app = flan::load_applications(kData + "/fixture_application.jsonl", true).applications.at(0);

  const std::map<int, int> refs = {{2, 1}, {3, 2}, {4, 2},  {5, 1},  {6, 5},
                                   {7, 1}, {8, 7}, {9, 1}, {10, 9}, {11, 1}, {12, 1}};
  for (const auto& c : app.claims()) {
    const auto p = flan::parse(c);
    auto it = refs.find(c.number());
    const std::optional<int> want = it == refs.end() ? std::nullopt : std::optional<int>(it->second);
    if (p.reference != want) miss("reference of claim " + std::to_string(c.number()));
    const auto& g = golden["references"][std::to_string(c.number())];
    if ((g.is_null() ? std::nullopt : std::optional<int>(g.get<int>())) != p.reference)
      miss("golden reference of claim " + std::to_string(c.number()));
  }

  const auto ag = flan::build_application_graphs(app, flan::GraphMode::kFlan, true);
  if (ag.graphs.size() != 12) miss("graph count");
  for (const auto& cg : ag.graphs) {
    const auto& want = golden["graphs"][std::to_string(cg.claim_number)];
    const std::string tag = "claim " + std::to_string(cg.claim_number);
    if (static_cast<int>(cg.graph.nodes.size()) != want["nodes"].get<int>()) miss(tag + " nodes");
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : cg.graph.edges) edges.emplace_back(e.from, e.to);
    if (edges != want["edges"].get<std::vector<std::pair<int, int>>>()) miss(tag + " edges");
    if (cg.graph.target_ids() != want["targets"].get<std::vector<int>>()) miss(tag + " targets");
    if (want["anchor"].is_null() != !cg.report.anchor.has_value()) {
      miss(tag + " anchor presence");
    } else if (cg.report.anchor) {
      if (cg.report.anchor->node_id != want["anchor"].get<int>()) miss(tag + " anchor");
      const auto& node = cg.graph.nodes[cg.report.anchor->node_id];
      if (want.contains("anchor_identity") &&
          (!node.identity || node.identity->normalized != want["anchor_identity"].get<std::string>()))
        miss(tag + " anchor identity");
    }
  }
  // Claim 2 anchors on the control component, not the system root.
  const auto& c2 = ag.graphs.at(1);
  if (!c2.report.anchor || c2.graph.nodes[c2.report.anchor->node_id].is_root) miss("claim 2 anchored on root");

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= kGoldenSeconds) miss("runtime");
  o.detail += "12 claims, " + fmt("%.3fs", secs);
  return o;
}

Outcome structural_invariants() {
  const auto t0 = std::chrono::steady_clock::now();
  flan::SyntheticOptions opt;
  opt.applications = kStructuralApps;
  opt.seed = 77;
  opt.min_dependents = 1;
  opt.max_dependents = 14;
  std::size_t graphs = 0, violations = 0;
  std::string first;
  for (const auto& app : flan::synthetic_corpus(opt)) {
    const auto ag = flan::build_application_graphs(app, flan::GraphMode::kFlan, false);
    violations += ag.errors.size();
    std::map<int, const flan::FlanGraph*> by;
    for (const auto& cg : ag.graphs) by[cg.claim_number] = &cg.graph;
    for (const auto& cg : ag.graphs) {
      ++graphs;
      auto v = oracle::structural_violations(cg.graph);
      for (const auto& s : flan::validate_graph(cg.graph)) v.push_back(s);
      if (auto ref = flan::detect_reference(app.find_claim(cg.claim_number)->text())) {
        auto it = by.find(*ref);
        if (it == by.end()) {
          v.push_back("ancestor graph missing");
        } else {
          for (const auto& s : oracle::inheritance_violations(cg.graph, *it->second)) v.push_back(s);
        }
      }
      if (!v.empty() && first.empty())
        first = app.application_id() + " claim " + std::to_string(cg.claim_number) + ": " + v[0];
      violations += v.size();
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = violations == 0 && secs < kStructuralSeconds;
  o.detail = std::to_string(kStructuralApps) + " apps, " + std::to_string(graphs) + " graphs, " +
             std::to_string(violations) + " violations, " + fmt("%.2fs", secs);
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome gradient_checks() {
  const auto t0 = std::chrono::steady_clock::now();
  Rand r(9001);
  int failed = 0, checked = 0;
  double worst = 0.0, worst_abs = 0.0;
  for (auto arch : {flan::Arch::kGcn, flan::Arch::kGraphSage, flan::Arch::kGat}) {
    for (int i = 0; i < kGradGraphsPerArch; ++i) {
      const auto c = testing_support::run_grad_case(arch, r, 1e-3, kGradRelTol);
      checked += static_cast<int>(c.check.checked);
      worst = std::max(worst, c.check.worst_relative);
      worst_abs = std::max(worst_abs, c.check.worst_absolute);
      if (!c.check.mismatches.empty()) ++failed;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = failed == 0 && secs < kGradSeconds;
  o.detail = "3x" + std::to_string(kGradGraphsPerArch) + " graphs, " + std::to_string(checked) +
             " parameters, " + std::to_string(failed) + " failing graphs, worst rel " + fmt("%.2e", worst) +
             ", worst abs " + fmt("%.2e", worst_abs) + ", " + fmt("%.2fs", secs);
  return o;
}

double max_diff(const flan::Matrix& a, const oracle::Dense& b) {
  if (a.rows() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b[i][j]));
  return worst;
}

Outcome layer_oracles() {
  using namespace testing_support;
  Rand r(31337);
  double worst[3] = {0, 0, 0};
  for (int t = 0; t < kLayerTreesPerArch; ++t) {
    const int n = r.between(1, 8);
    const auto g = random_tree(r, n);
    const auto h = random_matrix(r, n, 6);
    const auto e = edge_pairs(g);
    {
      const auto w = random_matrix(r, 6, 5), b = random_matrix(r, 1, 5);
      for (bool self : {true, false})
        for (bool rev : {false, true}) {
          if (!self && !rev && n == 1) continue;
          const auto want = oracle::gcn(to_dense(h), e, to_dense(w), row0(b), self, rev);
          worst[0] = std::max(worst[0], max_diff(flan::gcn_layer(h, g.edges, w, b, self, rev), want));
        }
    }
    {
      const auto ws = random_matrix(r, 6, 5), wn = random_matrix(r, 6, 5), b = random_matrix(r, 1, 5);
      const auto want = oracle::sage(to_dense(h), e, to_dense(ws), to_dense(wn), row0(b));
      worst[1] = std::max(worst[1], max_diff(flan::sage_layer(h, g.edges, ws, wn, b), want));
    }
    {
      const auto w = random_matrix(r, 6, 5), a = random_matrix(r, 1, 10), b = random_matrix(r, 1, 5);
      std::vector<double> src(a.row(0).begin(), a.row(0).begin() + 5), dst(a.row(0).begin() + 5, a.row(0).end());
      const auto want = oracle::gat(to_dense(h), e, to_dense(w), src, dst, row0(b));
      worst[2] = std::max(worst[2], max_diff(flan::gat_layer(h, g.edges, w, a, b), want));
    }
  }
  Outcome o;
  o.pass = worst[0] <= kLayerTol && worst[1] <= kLayerTol && worst[2] <= kLayerTol;
  o.detail = std::to_string(kLayerTreesPerArch) + " trees/arch, max |diff| gcn " + fmt("%.1e", worst[0]) +
             " sage " + fmt("%.1e", worst[1]) + " gat " + fmt("%.1e", worst[2]);
  return o;
}

Outcome metric_oracles() {
  Rand r(4242);
  double auc_err = 0.0, mono_err = 0.0;
  int f1_mismatch = 0;
  for (int t = 0; t < kMetricInstances; ++t) {
    const int n = r.between(2, kMetricMaxN);
    const int grid = r.between(2, 25);
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      s.push_back(static_cast<double>(r.between(0, grid)) / grid);
      y.push_back(r.coin(r.uniform(0.1, 0.9)) ? 1 : 0);
    }
    y[0] = 1;
    y[1] = 0;
    const double auc = flan::roc_auc(s, y);
    auc_err = std::max(auc_err, std::abs(auc - oracle::pair_auc(s, y)));
    std::vector<double> m;
    for (double v : s) m.push_back(std::atan(5.0 * v - 2.0) * 3.0 + 11.0);
    mono_err = std::max(mono_err, std::abs(auc - flan::roc_auc(m, y)));
    const double thr = r.uniform(0.05, 0.95);
    if (flan::macro_f1(s, y, thr) != oracle::counting_macro_f1(s, y, thr)) ++f1_mismatch;
  }
  Outcome o;
  o.pass = auc_err <= kAucTol && mono_err <= kMonotoneTol && f1_mismatch == 0;
  o.detail = std::to_string(kMetricInstances) + " instances, auc err " + fmt("%.1e", auc_err) +
             ", monotone err " + fmt("%.1e", mono_err) + ", f1 mismatches " + std::to_string(f1_mismatch);
  return o;
}

Outcome end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = scratch("e2e");
  const auto corpus = write_synthetic(dir, kE2eApps, kE2eCorpusSeed);
  std::map<std::string, double> mean_auc;
  std::string per_seed;
  for (auto mode : {flan::GraphMode::kFlan, flan::GraphMode::kSolitary}) {
    const std::string name(flan::graph_mode_name(mode));
    flan::GraphOptions g;
    g.input = corpus;
    g.output = (dir / (name + ".jsonl")).string();
    g.mode = mode;
    flan::cmd_graph(g);
    flan::TrainOptions t;
    t.input = g.output;
    t.output_dir = (dir / name).string();
    t.embed = "hash:" + std::to_string(kE2eHashDim) + ":0";
    t.seeds = {0, 1, 2};
    const auto s = flan::cmd_train(t);
    if (!s.aggregate) return {false, name + ": validation split holds one class"};
    mean_auc[name] = s.aggregate->auc.mean;
    per_seed += " " + name + "[";
    for (const auto& run : s.runs) per_seed += fmt("%.3f ", run.report.validation->auc);
    per_seed.back() = ']';
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double flan_auc = mean_auc["flan"], solo = mean_auc["solitary"];
  Outcome o;
  o.pass = flan_auc >= kE2eMinAuc && flan_auc - solo >= kE2eMinGap && secs < kE2eSeconds;
  o.detail = "flan auc " + fmt("%.4f", flan_auc) + ", solitary " + fmt("%.4f", solo) + ", gap " +
             fmt("%.4f", flan_auc - solo) + ";" + per_seed + "; " + fmt("%.1fs", secs);
  return o;
}

// Runs every command twice with identical inputs and compares all outputs
// byte for byte; training also reruns with a different thread count.
Outcome determinism() {
  const auto a = scratch("det_a"), b = scratch("det_b"), src = scratch("det_src");
  const auto corpus = write_synthetic(src, 60, 5);
  auto run_all = [&](const fs::path& d, int threads) {
    flan::ParseOptions p;
    p.input = corpus;
    p.output = (d / "parsed.jsonl").string();
    p.threads = threads;
    flan::cmd_parse(p);
    flan::GraphOptions g;
    g.input = corpus;
    g.output = (d / "graphs.jsonl").string();
    g.dot_dir = (d / "dot").string();
    g.node_texts = (d / "texts.jsonl").string();
    g.threads = threads;
    flan::cmd_graph(g);
    for (auto arch : {flan::Arch::kGcn, flan::Arch::kGraphSage, flan::Arch::kGat}) {
      flan::TrainOptions t;
      t.input = g.output;
      t.output_dir = (d / std::string(flan::arch_name(arch))).string();
      t.embed = "hash:32:1";
      t.config.arch = arch;
      t.config.hidden_dim = 16;
      t.config.epochs = 4;
      t.config.batch_size = 32;
      t.config.threads = threads;
      t.seeds = {0, 1};
      flan::cmd_train(t);
      flan::EvalOptions e;
      e.models = {t.output_dir + "/model_seed0.ckpt", t.output_dir + "/model_seed1.ckpt"};
      e.input = g.output;
      e.embed = t.embed;
      e.partition = flan::Partition::kAll;
      e.report = t.output_dir + "/eval.json";
      e.scores = t.output_dir + "/scores.csv";
      e.threads = threads;
      flan::cmd_eval(e);
    }
    flan::StatsOptions st;
    st.input = corpus;
    st.output = (d / "stats.json").string();
    flan::cmd_stats(st);
  };
  run_all(a, 1);
  run_all(b, 3);
  std::size_t compared = 0;
  std::vector<std::string> differ;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file() || entry.path().filename() == "timing.json") continue;
    const auto rel = fs::relative(entry.path(), a);
    std::string left = slurp(entry.path().string()), right;
    if (fs::exists(b / rel)) right = slurp((b / rel).string());
    // Paths embedded in reports name the run directory.
    for (auto* s : {&left, &right}) {
      for (const auto& [from, to] : {std::pair{a.string(), std::string("<run>")}, std::pair{b.string(), std::string("<run>")}}) {
        for (std::size_t pos; (pos = s->find(from)) != std::string::npos;) s->replace(pos, from.size(), to);
      }
    }
    ++compared;
    if (left != right) differ.push_back(rel.string());
  }
  Outcome o;
  o.pass = differ.empty() && compared > 20;
  o.detail = std::to_string(compared) + " files compared across reruns (threads 1 vs 3), " +
             std::to_string(differ.size()) + " differ";
  if (!differ.empty()) o.detail += "; first: " + differ[0];
  return o;
}

Outcome corpus_stats() {
  std::ifstream in(kData + "/sample50_stats.json");
  const auto want = flan::json::parse(in);
  flan::StatsOptions opt;
  opt.input = kData + "/sample50.jsonl";
  const auto s = flan::cmd_stats(opt);
  Outcome o;
  o.pass = s.applications == want["applications"].get<long long>() && s.claims == want["claims"].get<long long>() &&
           s.labeled_claims == want["labeled_claims"].get<long long>() &&
           s.approved == want["approved"].get<long long>() &&
           fmt("%.2f", s.approval_pct) == want["approval_pct_2dp"].get<std::string>();
  o.detail = "sample50: " + std::to_string(s.claims) + " claims, " + fmt("%.2f%%", s.approval_pct);
  if (const char* full = std::getenv("FLAN_FULL_CORPUS"); full && *full) {
    opt.input = full;
    const auto f = flan::cmd_stats(opt);
    const bool ok = f.claims == kFullClaims && f.applications == kFullApps && fmt("%.2f", f.approval_pct) == kFullApprovalPct;
    o.pass = o.pass && ok;
    o.detail += "; full corpus: " + std::to_string(f.claims) + " claims, " + std::to_string(f.applications) +
                " apps, " + fmt("%.2f%%", f.approval_pct);
  } else {
    o.detail += "; full corpus leg skipped (FLAN_FULL_CORPUS unset)";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"golden fixtures", golden_fixtures},
      {"structural invariants", structural_invariants},
      {"gradient checks", gradient_checks},
      {"layer oracles", layer_oracles},
      {"metric oracles", metric_oracles},
      {"end-to-end synthetic", end_to_end},
      {"determinism", determinism},
      {"corpus stats", corpus_stats},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %-22s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

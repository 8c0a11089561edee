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

// Pipeline commands behind the `flan` executable. Each command reads and
// writes files only, so stages can run and be tested independently:
//
//   parse  applications.jsonl -> parsed claims JSONL + report
//   graph  applications.jsonl -> graph records JSONL (+ DOT, node texts)
//   train  graph records      -> checkpoints, train report, manifest
//   eval   graph records      -> eval report, score CSV
//   stats  applications.jsonl -> corpus statistics

#pragma once

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "flan/checkpoint.hpp"
#include "flan/claim_parser.hpp"
#include "flan/dataset_io.hpp"
#include "flan/gnn.hpp"
#include "flan/graph_builder.hpp"
#include "flan/metrics.hpp"
#include "flan/node_embedder.hpp"

namespace flan {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitRuntime = 3 };

// Numeric and runtime failures exit with 3, everything else with 2.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFinite:
    case ErrorCode::kNonFiniteLoss:
    case ErrorCode::kSingleClass:
      return kExitRuntime;
    default:
      return kExitValidation;
  }
}

namespace cmd_detail {

namespace fs = std::filesystem;

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

inline void write_file(const std::string& path, std::string_view content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::kIoError, "write failed for '" + path + "'");
}

inline std::string file_digest(const std::string& path) {
  return hex64(fnv1a64(embed_detail::read_file(path)));
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; fn must write only
// to slot i of its outputs. The first exception, by index, is rethrown.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), n);
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::vector<Application> load_corpus(const std::string& path, bool strict,
                                            const std::string& min_date,
                                            std::vector<LineError>* errors) {
  LoadReport r = load_applications(path, strict);
  if (errors) *errors = r.errors;
  if (r.applications.empty() && r.errors.empty())
    fail(ErrorCode::kEmptyInput, "'" + path + "' holds no applications");
  if (!min_date.empty()) r.applications = filter_min_date(std::move(r.applications), min_date);
  std::sort(r.applications.begin(), r.applications.end(),
            [](const Application& a, const Application& b) {
              return a.application_id() < b.application_id();
            });
  return std::move(r.applications);
}

inline json line_errors_json(const std::vector<LineError>& errors) {
  json arr = json::array();
  for (const auto& e : errors)
    arr.push_back({{"line", e.line}, {"code", error_code_name(e.code)}, {"message", e.message}});
  return arr;
}

}  // namespace cmd_detail

// ---------------------------------------------------------------------------
// parse

struct ParseOptions {
  std::string input;
  std::string output;  // parsed claims JSONL; report goes to <output>.report.json
  bool strict = false;
  std::string min_date;
  int threads = 1;
};

struct ParseSummary {
  std::size_t applications = 0;
  std::size_t claims = 0;
  std::size_t references = 0;
  std::size_t warnings = 0;
  std::size_t errors = 0;
};

inline ParseSummary cmd_parse(const ParseOptions& opt) {
  std::vector<LineError> line_errors;
  const auto apps = cmd_detail::load_corpus(opt.input, opt.strict, opt.min_date, &line_errors);
  struct Result {
    std::string lines;
    json warnings = json::array();
    json errors = json::array();
    std::size_t claims = 0, references = 0;
  };
  std::vector<Result> results(apps.size());
  cmd_detail::parallel_for(apps.size(), opt.threads, [&](std::size_t i) {
    const auto& app = apps[i];
    auto& r = results[i];
    for (const auto& c : app.claims()) {
      try {
        const ParsedClaim p = parse(c);
        json rec = {{"application_id", app.application_id()}, {"parsed", p}};
        r.lines += rec.dump() + "\n";
        ++r.claims;
        if (p.reference) ++r.references;
        for (const auto& w : p.warnings)
          r.warnings.push_back(
              {{"application_id", app.application_id()}, {"claim_number", c.number()}, {"message", w}});
      } catch (const Error& e) {
        if (opt.strict)
          fail(e.code(), app.application_id() + " claim " + std::to_string(c.number()) + ": " + e.what());
        r.errors.push_back(
            {{"application_id", app.application_id()}, {"claim_number", c.number()}, {"message", e.what()}});
      }
    }
  });
  std::string out;
  json warnings = json::array(), errors = json::array();
  ParseSummary s;
  s.applications = apps.size();
  for (auto& r : results) {
    out += r.lines;
    for (auto& w : r.warnings) warnings.push_back(std::move(w));
    for (auto& e : r.errors) errors.push_back(std::move(e));
    s.claims += r.claims;
    s.references += r.references;
  }
  s.warnings = warnings.size();
  s.errors = errors.size() + line_errors.size();
  json report = {{"input", opt.input},
                 {"applications", s.applications},
                 {"claims", s.claims},
                 {"references", s.references},
                 {"line_errors", cmd_detail::line_errors_json(line_errors)},
                 {"claim_errors", errors},
                 {"warnings", warnings}};
  cmd_detail::write_file(opt.output, out);
  cmd_detail::write_file(opt.output + ".report.json", report.dump(2) + "\n");
  return s;
}

// ---------------------------------------------------------------------------
// graph

struct GraphRecord {
  std::string application_id;
  std::string filing_date;
  int claim_number = 0;
  std::optional<int> label;
  FlanGraph graph;
};

inline void to_json(json& j, const GraphRecord& r) {
  j = json{{"application_id", r.application_id},
           {"filing_date", r.filing_date},
           {"claim_number", r.claim_number},
           {"label", r.label ? json(*r.label) : json(nullptr)},
           {"graph", r.graph}};
}

inline GraphRecord graph_record_from_json(const json& j) {
  GraphRecord r;
  r.application_id = j.at("application_id").get<std::string>();
  r.filing_date = normalize_iso_date(j.at("filing_date").get<std::string>());
  r.claim_number = j.at("claim_number").get<int>();
  if (j.contains("label") && !j["label"].is_null()) {
    const int y = j["label"].is_boolean() ? (j["label"].get<bool>() ? 1 : 0) : j["label"].get<int>();
    if (y != 0 && y != 1) fail(ErrorCode::kInvariantViolation, "label must be 0 or 1");
    r.label = y;
  }
  r.graph = graph_from_json(j.at("graph"));
  return r;
}

inline std::vector<GraphRecord> load_graph_records(const std::string& path) {
  std::vector<GraphRecord> out;
  for_each_line(read_text_file(path), [&](std::size_t line_no, std::string_view line) {
    try {
      out.push_back(graph_record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      fail(ErrorCode::kParseError, path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      fail(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  if (out.empty()) fail(ErrorCode::kEmptyInput, "'" + path + "' holds no graph records");
  return out;
}

struct GraphOptions {
  std::string input;
  std::string output;       // graph records JSONL; report goes to <output>.report.json
  GraphMode mode = GraphMode::kFlan;
  std::string dot_dir;      // optional: one DOT file per claim
  std::string node_texts;   // optional: unique node texts JSONL {"key","text"}
  bool strict = false;
  std::string min_date;
  int threads = 1;
};

struct GraphSummary {
  std::size_t applications = 0;
  std::size_t graphs = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t skipped = 0;
};

inline GraphSummary cmd_graph(const GraphOptions& opt) {
  std::vector<LineError> line_errors;
  const auto apps = cmd_detail::load_corpus(opt.input, opt.strict, opt.min_date, &line_errors);
  std::vector<ApplicationGraphs> built(apps.size());
  cmd_detail::parallel_for(apps.size(), opt.threads, [&](std::size_t i) {
    built[i] = build_application_graphs(apps[i], opt.mode, opt.strict);
  });

  GraphSummary s;
  s.applications = apps.size();
  std::string out;
  json skipped = json::array(), warnings = json::array();
  std::map<std::uint64_t, std::string> texts;
  for (std::size_t i = 0; i < apps.size(); ++i) {
    const auto& app = apps[i];
    for (const auto& [claim, msg] : built[i].errors) {
      skipped.push_back({{"application_id", app.application_id()}, {"claim_number", claim}, {"message", msg}});
      ++s.skipped;
    }
    for (const auto& cg : built[i].graphs) {
      GraphRecord r{app.application_id(), app.filing_date(), cg.claim_number,
                    app.find_claim(cg.claim_number)->label(), cg.graph};
      out += json(r).dump() + "\n";
      ++s.graphs;
      s.nodes += cg.graph.nodes.size();
      s.edges += cg.graph.edges.size();
      for (const auto& w : cg.report.warnings)
        warnings.push_back({{"application_id", app.application_id()}, {"claim_number", cg.claim_number}, {"message", w}});
      for (const auto& n : cg.graph.nodes) texts.emplace(embedding_key(n.text), n.text);
      if (!opt.dot_dir.empty()) {
        std::string name = app.application_id() + "_claim_" + std::to_string(cg.claim_number) + ".dot";
        for (char& ch : name)
          if (ch == '/' || ch == '\\' || ch == ' ') ch = '_';
        cmd_detail::write_file((cmd_detail::fs::path(opt.dot_dir) / name).string(),
                               export_graph(cg.graph, ExportFormat::kDot));
      }
    }
  }
  cmd_detail::write_file(opt.output, out);
  if (!opt.node_texts.empty()) {
    std::string t;
    for (const auto& [key, text] : texts) t += json{{"key", std::to_string(key)}, {"text", text}}.dump() + "\n";
    cmd_detail::write_file(opt.node_texts, t);
  }
  json report = {{"input", opt.input},
                 {"mode", graph_mode_name(opt.mode)},
                 {"applications", s.applications},
                 {"graphs", s.graphs},
                 {"nodes", s.nodes},
                 {"edges", s.edges},
                 {"unique_node_texts", texts.size()},
                 {"line_errors", cmd_detail::line_errors_json(line_errors)},
                 {"skipped", skipped},
                 {"warnings", warnings}};
  cmd_detail::write_file(opt.output + ".report.json", report.dump(2) + "\n");
  return s;
}

// ---------------------------------------------------------------------------
// Embedding backend and dataset assembly

// Owns a table when the backend reads one.
struct LoadedBackend {
  std::unique_ptr<EmbeddingTable> table;
  EmbeddingBackend backend;
  std::string spec;
  std::string table_path;
};

// "hash:DIM:SEED" or "table:PATH".
inline LoadedBackend load_backend(const std::string& spec) {
  LoadedBackend b;
  b.spec = spec;
  if (spec.starts_with("hash:")) {
    const std::string rest = spec.substr(5);
    const auto colon = rest.find(':');
    try {
      const int dim = std::stoi(rest.substr(0, colon));
      const std::uint64_t seed = colon == std::string::npos ? 0 : std::stoull(rest.substr(colon + 1));
      if (dim < 8) fail(ErrorCode::kInvalidArgument, "hash embedding dim must be >= 8");
      b.backend = HashBackend{dim, seed};
    } catch (const std::logic_error&) {
      fail(ErrorCode::kInvalidArgument, "bad --embed spec '" + spec + "'");
    }
    return b;
  }
  if (spec.starts_with("table:")) {
    b.table_path = spec.substr(6);
    b.table = std::make_unique<EmbeddingTable>(load_embedding_table(b.table_path));
    b.backend = TableBackend{b.table.get()};
    return b;
  }
  fail(ErrorCode::kInvalidArgument, "--embed must be hash:DIM:SEED or table:PATH, got '" + spec + "'");
}

enum class Partition { kTrain, kValid, kTest, kAll };

inline Partition parse_partition(std::string_view s) {
  if (s == "train") return Partition::kTrain;
  if (s == "valid") return Partition::kValid;
  if (s == "test") return Partition::kTest;
  if (s == "all") return Partition::kAll;
  fail(ErrorCode::kInvalidArgument, "partition must be train, valid, test or all");
}

struct SplitRecords {
  std::vector<const GraphRecord*> train, valid, test;
};

// Splits graph records by application with the time-ordered rule.
// Unlabeled records count toward the split but are left out of every part.
inline SplitRecords split_records(const std::vector<GraphRecord>& records, double train_frac,
                                  double valid_frac, const std::string& min_date) {
  const std::string cutoff = min_date.empty() ? std::string() : normalize_iso_date(min_date);
  std::map<std::string, std::string> app_dates;
  for (const auto& r : records) {
    if (!cutoff.empty() && r.filing_date < cutoff) continue;
    auto [it, fresh] = app_dates.emplace(r.application_id, r.filing_date);
    if (!fresh && it->second != r.filing_date)
      fail(ErrorCode::kInvariantViolation, "application " + r.application_id + " has two filing dates");
  }
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& [id, date] : app_dates) keys.emplace_back(date, id);
  const auto idx = split_indices_by_date(keys, train_frac, valid_frac);
  std::map<std::string, int> part;
  for (auto i : idx.train) part[keys[i].second] = 0;
  for (auto i : idx.valid) part[keys[i].second] = 1;
  for (auto i : idx.test) part[keys[i].second] = 2;
  SplitRecords s;
  for (const auto& r : records) {
    auto it = part.find(r.application_id);
    if (it == part.end() || !r.label) continue;
    (it->second == 0 ? s.train : it->second == 1 ? s.valid : s.test).push_back(&r);
  }
  return s;
}

inline std::vector<Example> make_examples(std::span<const GraphRecord* const> records,
                                          const EmbeddingBackend& backend,
                                          const FeatureStore* features, int threads) {
  std::vector<Example> out(records.size());
  cmd_detail::parallel_for(records.size(), threads, [&](std::size_t i) {
    const auto& r = *records[i];
    out[i].graph = embed_graph(r.graph, backend);
    out[i].label = r.label;
    if (features && features->dim > 0) {
      const auto* v = features->find(r.application_id, r.claim_number);
      if (!v)
        fail(ErrorCode::kInvalidArgument,
             "no feature vector for " + r.application_id + " claim " + std::to_string(r.claim_number));
      out[i].features = *v;
    }
  });
  return out;
}

inline std::vector<int> labels_of(std::span<const Example> examples) {
  std::vector<int> y;
  for (const auto& e : examples) {
    if (!e.label) fail(ErrorCode::kInvalidArgument, "example without a label");
    y.push_back(*e.label);
  }
  return y;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string input;       // graph records JSONL
  std::string output_dir;
  std::string embed = "hash:128:0";
  std::string features;    // optional feature JSONL
  ModelConfig config;      // input_dim and feature_dim are filled from the data
  std::vector<std::uint64_t> seeds{0, 1, 2};
  double train_frac = 0.76;
  double valid_frac = 0.14;
  std::string min_date;
};

struct SeedRun {
  std::uint64_t seed = 0;
  TrainReport report;
  std::string checkpoint;
};

struct TrainSummary {
  std::vector<SeedRun> runs;
  std::optional<SeedAggregate> aggregate;
  std::size_t train_examples = 0;
  std::size_t valid_examples = 0;
};

inline json manifest_json(std::string_view command, const ModelConfig& config,
                          const std::vector<std::uint64_t>& seeds,
                          const std::vector<std::string>& inputs,
                          const std::vector<std::string>& outputs, const json& extra) {
  json in = json::array();
  for (const auto& p : inputs) in.push_back({{"path", p}, {"fnv1a64", cmd_detail::file_digest(p)}});
  json m = {{"tool_version", kToolVersion}, {"command", command},  {"config", config},
            {"seeds", seeds},               {"inputs", in},        {"outputs", outputs},
            {"options", extra}};
  return m;
}

inline TrainSummary cmd_train(const TrainOptions& opt) {
  namespace fs = cmd_detail::fs;
  const auto records = load_graph_records(opt.input);
  LoadedBackend backend = load_backend(opt.embed);
  FeatureStore features;
  if (!opt.features.empty()) features = load_features(opt.features);
  if (opt.seeds.empty()) fail(ErrorCode::kInvalidArgument, "no seeds given");

  ModelConfig base = opt.config;
  base.input_dim = backend_dim(backend.backend);
  base.feature_dim = static_cast<int>(features.dim);
  validate_config(base);

  const SplitRecords split = split_records(records, opt.train_frac, opt.valid_frac, opt.min_date);
  const auto train_set = make_examples(split.train, backend.backend, &features, base.threads);
  const auto valid_set = make_examples(split.valid, backend.backend, &features, base.threads);

  std::vector<std::string> inputs{opt.input};
  if (!backend.table_path.empty()) inputs.push_back(backend.table_path);
  if (!opt.features.empty()) inputs.push_back(opt.features);
  std::vector<std::string> outputs;
  for (auto seed : opt.seeds)
    outputs.push_back((fs::path(opt.output_dir) / ("model_seed" + std::to_string(seed) + ".ckpt")).string());
  const std::string report_path = (fs::path(opt.output_dir) / "train_report.json").string();
  outputs.push_back(report_path);
  const json extra = {{"embed", opt.embed},
                      {"features", opt.features},
                      {"train_frac", opt.train_frac},
                      {"valid_frac", opt.valid_frac},
                      {"min_date", opt.min_date}};
  fs::create_directories(opt.output_dir);
  cmd_detail::write_file((fs::path(opt.output_dir) / "manifest.json").string(),
                         manifest_json("train", base, opt.seeds, inputs, outputs, extra).dump(2) + "\n");

  TrainSummary summary;
  summary.train_examples = train_set.size();
  summary.valid_examples = valid_set.size();
  json seeds_json = json::array();
  json timing = json::array();
  std::vector<EvalReport> evals;
  for (std::size_t k = 0; k < opt.seeds.size(); ++k) {
    ModelConfig cfg = base;
    cfg.seed = opt.seeds[k];
    auto [params, report] = train(train_set, cfg, valid_set);
    save_checkpoint(outputs[k], params, cfg);
    json sj = {{"seed", cfg.seed}, {"epoch_loss", report.epoch_loss}, {"checkpoint", outputs[k]}};
    sj["validation"] = report.validation ? json(*report.validation) : json(nullptr);
    if (report.validation) evals.push_back(*report.validation);
    seeds_json.push_back(std::move(sj));
    timing.push_back({{"seed", cfg.seed}, {"wall_seconds", report.wall_seconds}});
    summary.runs.push_back({cfg.seed, std::move(report), outputs[k]});
  }
  json report = {{"config", base},
                 {"train_examples", train_set.size()},
                 {"valid_examples", valid_set.size()},
                 {"seeds", seeds_json}};
  if (!evals.empty()) {
    summary.aggregate = aggregate_seeds(evals);
    json agg = *summary.aggregate;
    agg["auc"]["formatted"] = format_mean_std(summary.aggregate->auc);
    agg["macro_f1"]["formatted"] = format_mean_std(summary.aggregate->macro_f1);
    report["validation_aggregate"] = agg;
  }
  cmd_detail::write_file(report_path, report.dump(2) + "\n");
  // Wall-clock times vary between runs and live outside the report.
  cmd_detail::write_file((fs::path(opt.output_dir) / "timing.json").string(), timing.dump(2) + "\n");
  return summary;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::vector<std::string> models;  // checkpoint paths
  std::string input;                // graph records JSONL
  std::string embed = "hash:128:0";
  std::string features;
  std::string report;               // EvalReport JSON path
  std::string scores;               // optional score CSV path
  Partition partition = Partition::kTest;
  double train_frac = 0.76;
  double valid_frac = 0.14;
  std::string min_date;
  double threshold = 0.5;
  int threads = 1;
};

struct EvalSummary {
  std::vector<EvalReport> reports;
  std::optional<SeedAggregate> aggregate;
  std::string table;
};

inline EvalSummary cmd_eval(const EvalOptions& opt) {
  if (opt.models.empty()) fail(ErrorCode::kInvalidArgument, "no model checkpoints given");
  const auto records = load_graph_records(opt.input);
  LoadedBackend backend = load_backend(opt.embed);
  FeatureStore features;
  if (!opt.features.empty()) features = load_features(opt.features);

  std::vector<const GraphRecord*> chosen;
  if (opt.partition == Partition::kAll) {
    const std::string cutoff = opt.min_date.empty() ? "" : normalize_iso_date(opt.min_date);
    for (const auto& r : records)
      if (r.label && (cutoff.empty() || r.filing_date >= cutoff)) chosen.push_back(&r);
  } else {
    const SplitRecords split = split_records(records, opt.train_frac, opt.valid_frac, opt.min_date);
    chosen = opt.partition == Partition::kTrain ? split.train
             : opt.partition == Partition::kValid ? split.valid
                                                  : split.test;
  }
  if (chosen.empty()) fail(ErrorCode::kEmptyInput, "evaluation partition is empty");
  const auto examples = make_examples(chosen, backend.backend, &features, opt.threads);
  const auto labels = labels_of(examples);

  EvalSummary summary;
  std::vector<std::vector<double>> all_scores;
  json models = json::array();
  for (const auto& path : opt.models) {
    auto [params, cfg] = load_checkpoint(path);
    if (cfg.input_dim != backend_dim(backend.backend))
      fail(ErrorCode::kDimMismatch, "checkpoint input_dim " + std::to_string(cfg.input_dim) +
                                        " != embedding dim " + std::to_string(backend_dim(backend.backend)));
    if (cfg.feature_dim != static_cast<int>(features.dim))
      fail(ErrorCode::kDimMismatch, "checkpoint feature_dim " + std::to_string(cfg.feature_dim) +
                                        " != feature store dim " + std::to_string(features.dim));
    std::vector<double> scores(examples.size());
    cmd_detail::parallel_for(examples.size(), opt.threads, [&](std::size_t i) {
      scores[i] = sigmoid(forward(examples[i].graph, examples[i].features, params, cfg));
    });
    const EvalReport r = evaluate(scores, labels, opt.threshold);
    summary.reports.push_back(r);
    json mj = r;
    mj["model"] = path;
    models.push_back(std::move(mj));
    all_scores.push_back(std::move(scores));
  }
  summary.aggregate = aggregate_seeds(summary.reports);

  std::ostringstream table;
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %8s %8s %10s\n", "model", "n", "AUC", "Macro-F1");
  table << line;
  for (std::size_t k = 0; k < opt.models.size(); ++k) {
    const std::string name = cmd_detail::fs::path(opt.models[k]).filename().string();
    std::snprintf(line, sizeof line, "%-40s %8lld %8.4f %10.4f\n", name.c_str(),
                  summary.reports[k].n, summary.reports[k].auc, summary.reports[k].macro_f1);
    table << line;
  }
  std::snprintf(line, sizeof line, "%-40s %8s %s  %s\n", "mean±std (%)", "",
                format_mean_std(summary.aggregate->auc).c_str(),
                format_mean_std(summary.aggregate->macro_f1).c_str());
  table << line;
  summary.table = table.str();

  json agg = *summary.aggregate;
  agg["auc"]["formatted"] = format_mean_std(summary.aggregate->auc);
  agg["macro_f1"]["formatted"] = format_mean_std(summary.aggregate->macro_f1);
  json report = {{"input", opt.input},
                 {"partition", opt.partition == Partition::kTrain   ? "train"
                               : opt.partition == Partition::kValid ? "valid"
                               : opt.partition == Partition::kTest  ? "test"
                                                                    : "all"},
                 {"threshold", opt.threshold},
                 {"models", models},
                 {"aggregate", agg}};
  if (!opt.report.empty()) cmd_detail::write_file(opt.report, report.dump(2) + "\n");
  if (!opt.scores.empty()) {
    std::string csv = "application_id,claim_number,label";
    for (std::size_t k = 0; k < opt.models.size(); ++k) csv += ",score_" + std::to_string(k);
    csv += "\n";
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      csv += chosen[i]->application_id + "," + std::to_string(chosen[i]->claim_number) + "," +
             std::to_string(labels[i]);
      for (const auto& s : all_scores) {
        char buf[32];
        std::snprintf(buf, sizeof buf, ",%.9g", s[i]);
        csv += buf;
      }
      csv += "\n";
    }
    cmd_detail::write_file(opt.scores, csv);
  }
  return summary;
}

// ---------------------------------------------------------------------------
// stats

struct StatsOptions {
  std::string input;
  std::string output;  // optional JSON
  std::string min_date;
};

inline std::string format_stats(const CorpusStats& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "applications      %lld\nclaims            %lld\nlabeled claims    %lld\n"
                "approval (%%)      %.2f\nclaims per app    %.2f\n",
                s.applications, s.claims, s.labeled_claims, s.approval_pct, s.mean_claims);
  return buf;
}

inline CorpusStats cmd_stats(const StatsOptions& opt) {
  const auto apps = cmd_detail::load_corpus(opt.input, true, opt.min_date, nullptr);
  const CorpusStats s = corpus_stats(apps);
  if (!opt.output.empty()) cmd_detail::write_file(opt.output, json(s).dump(2) + "\n");
  return s;
}

}  // namespace flan

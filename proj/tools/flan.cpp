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

// flan: parse claims, build graphs, train and evaluate GNN classifiers.
//
//   flan parse --input apps.jsonl --output parsed.jsonl
//   flan graph --input apps.jsonl --mode flan --output graphs.jsonl
//   flan train --input graphs.jsonl --output runs/ --seeds 0,1,2
//   flan eval  --model runs/model_seed0.ckpt --input graphs.jsonl --output eval.json
//   flan stats --input apps.jsonl

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flan/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"FLAN graph pipeline for per-claim approval prediction"};
  app.set_version_flag("--version", std::string(flan::kToolVersion));
  app.require_subcommand(1);

  flan::ParseOptions parse_opt;
  auto* parse = app.add_subcommand("parse", "Parse claims into references and segments");
  parse->add_option("--input", parse_opt.input, "Applications JSONL (.gz accepted)")->required();
  parse->add_option("--output", parse_opt.output, "Parsed claims JSONL")->required();
  parse->add_flag("--strict", parse_opt.strict, "Abort on the first malformed line or claim");
  parse->add_option("--min-date", parse_opt.min_date, "Drop applications filed before this date");
  parse->add_option("--threads", parse_opt.threads, "Worker threads")->check(CLI::PositiveNumber);

  flan::GraphOptions graph_opt;
  std::string graph_mode = "flan";
  auto* graph = app.add_subcommand("graph", "Build per-claim graphs");
  graph->add_option("--input", graph_opt.input, "Applications JSONL (.gz accepted)")->required();
  graph->add_option("--output", graph_opt.output, "Graph records JSONL")->required();
  graph->add_option("--mode", graph_mode, "flan | coarse | solitary")
      ->check(CLI::IsMember({"flan", "coarse", "solitary"}));
  graph->add_option("--dot-dir", graph_opt.dot_dir, "Write one DOT file per claim here");
  graph->add_option("--node-texts", graph_opt.node_texts, "Write unique node texts JSONL here");
  graph->add_flag("--strict", graph_opt.strict, "Abort on the first failing claim");
  graph->add_option("--min-date", graph_opt.min_date, "Drop applications filed before this date");
  graph->add_option("--threads", graph_opt.threads, "Worker threads")->check(CLI::PositiveNumber);

  flan::TrainOptions train_opt;
  std::string arch = "sage";
  bool no_self_loops = false;
  auto* train = app.add_subcommand("train", "Train one model per seed");
  train->add_option("--input", train_opt.input, "Graph records JSONL")->required();
  train->add_option("--output", train_opt.output_dir, "Output directory")->required();
  train->add_option("--arch", arch, "gcn | sage | gat")->check(CLI::IsMember({"gcn", "sage", "gat"}));
  train->add_option("--layers", train_opt.config.num_layers, "GNN layers")->check(CLI::Range(1, 8));
  train->add_option("--hidden", train_opt.config.hidden_dim, "Hidden dimension")->check(CLI::PositiveNumber);
  train->add_option("--lr", train_opt.config.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  train->add_option("--batch", train_opt.config.batch_size, "Batch size")->check(CLI::PositiveNumber);
  train->add_option("--epochs", train_opt.config.epochs, "Epochs")->check(CLI::NonNegativeNumber);
  train->add_option("--seeds", train_opt.seeds, "Comma-separated seeds")->delimiter(',');
  train->add_option("--embed", train_opt.embed, "hash:DIM:SEED or table:PATH");
  train->add_option("--features", train_opt.features, "Feature vectors JSONL");
  train->add_option("--train-frac", train_opt.train_frac, "Training fraction");
  train->add_option("--valid-frac", train_opt.valid_frac, "Validation fraction");
  train->add_option("--min-date", train_opt.min_date, "Drop applications filed before this date");
  train->add_option("--threads", train_opt.config.threads, "Worker threads")->check(CLI::PositiveNumber);
  train->add_option("--pos-weight", train_opt.config.positive_class_weight, "Positive class weight")
      ->check(CLI::PositiveNumber);
  train->add_flag("--targets-only", train_opt.config.targets_only, "Read out target nodes only");
  train->add_flag("--no-self-loops", no_self_loops, "GCN without self loops");
  train->add_flag("--reverse-edges", train_opt.config.add_reverse_edges,
                  "GCN with symmetric normalization over both edge directions");

  flan::EvalOptions eval_opt;
  std::string partition = "test";
  auto* eval = app.add_subcommand("eval", "Evaluate checkpoints");
  eval->add_option("--model", eval_opt.models, "Checkpoint path (repeatable or comma-separated)")
      ->required()
      ->delimiter(',');
  eval->add_option("--input", eval_opt.input, "Graph records JSONL")->required();
  eval->add_option("--output", eval_opt.report, "Eval report JSON");
  eval->add_option("--scores", eval_opt.scores, "Score CSV for external plotting");
  eval->add_option("--embed", eval_opt.embed, "hash:DIM:SEED or table:PATH");
  eval->add_option("--features", eval_opt.features, "Feature vectors JSONL");
  eval->add_option("--partition", partition, "train | valid | test | all")
      ->check(CLI::IsMember({"train", "valid", "test", "all"}));
  eval->add_option("--train-frac", eval_opt.train_frac, "Training fraction");
  eval->add_option("--valid-frac", eval_opt.valid_frac, "Validation fraction");
  eval->add_option("--min-date", eval_opt.min_date, "Drop applications filed before this date");
  eval->add_option("--threshold", eval_opt.threshold, "Decision threshold for F1");
  eval->add_option("--threads", eval_opt.threads, "Worker threads")->check(CLI::PositiveNumber);

  flan::StatsOptions stats_opt;
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--input", stats_opt.input, "Applications JSONL (.gz accepted)")->required();
  stats->add_option("--output", stats_opt.output, "Also write the statistics as JSON");
  stats->add_option("--min-date", stats_opt.min_date, "Drop applications filed before this date");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : flan::kExitValidation;
  }

  try {
    if (*parse) {
      const auto s = flan::cmd_parse(parse_opt);
      std::cout << "parsed " << s.claims << " claims from " << s.applications << " applications ("
                << s.references << " references, " << s.warnings << " warnings, " << s.errors
                << " errors)\n";
    } else if (*graph) {
      graph_opt.mode = flan::parse_graph_mode(graph_mode);
      const auto s = flan::cmd_graph(graph_opt);
      std::cout << "built " << s.graphs << " graphs (" << s.nodes << " nodes, " << s.edges
                << " edges, " << s.skipped << " claims skipped)\n";
    } else if (*train) {
      train_opt.config.arch = flan::parse_arch(arch);
      train_opt.config.add_self_loops = !no_self_loops;
      const auto s = flan::cmd_train(train_opt);
      for (const auto& run : s.runs) {
        std::cout << "seed " << run.seed << ": final loss "
                  << (run.report.epoch_loss.empty() ? 0.0 : run.report.epoch_loss.back());
        if (run.report.validation)
          std::cout << ", valid AUC " << run.report.validation->auc << ", Macro-F1 "
                    << run.report.validation->macro_f1;
        std::cout << "\n";
      }
      if (s.aggregate)
        std::cout << "valid AUC " << flan::format_mean_std(s.aggregate->auc) << ", Macro-F1 "
                  << flan::format_mean_std(s.aggregate->macro_f1) << "\n";
    } else if (*eval) {
      eval_opt.partition = flan::parse_partition(partition);
      std::cout << flan::cmd_eval(eval_opt).table;
    } else if (*stats) {
      std::cout << flan::format_stats(flan::cmd_stats(stats_opt));
    }
  } catch (const flan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return flan::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return flan::kExitRuntime;
  }
  return flan::kExitOk;
}

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

// Builds FLAN graphs for a twelve-claim application and prints a summary of
// each claim plus the DOT rendering of claim 2.
//
//   claim_graph_demo [applications.jsonl] [claim]

#include <cstdlib>
#include <iostream>

#include "flan/dataset_io.hpp"
#include "flan/graph_builder.hpp"

#ifndef FLAN_SAMPLE_DATA
#define FLAN_SAMPLE_DATA "fixture_application.jsonl"
#endif

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : FLAN_SAMPLE_DATA;
  const int show = argc > 2 ? std::atoi(argv[2]) : 2;
  try {
    const auto loaded = flan::load_applications(path, true);
    for (const auto& app : loaded.applications) {
      std::cout << app.application_id() << " (" << app.filing_date() << ")\n";
      const auto built = flan::build_application_graphs(app, flan::GraphMode::kFlan);
      for (const auto& cg : built.graphs) {
        std::cout << "  claim " << cg.claim_number << ": " << cg.graph.nodes.size() << " nodes, "
                  << cg.graph.edges.size() << " edges, targets";
        for (int t : cg.graph.target_ids()) std::cout << ' ' << t;
        if (cg.report.anchor)
          std::cout << ", anchor " << cg.report.anchor->node_id << " (score "
                    << cg.report.anchor->score << ")";
        std::cout << "\n";
      }
      for (const auto& [claim, msg] : built.errors)
        std::cout << "  claim " << claim << " skipped: " << msg << "\n";
      for (const auto& cg : built.graphs)
        if (cg.claim_number == show)
          std::cout << "\n" << flan::export_graph(cg.graph, flan::ExportFormat::kDot);
    }
  } catch (const flan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

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

// Random trees, matrices and parameters for property tests.

#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "flan/gnn.hpp"
#include "oracles/dense_gnn.hpp"

namespace testing_support {

class Rand {
 public:
  explicit Rand(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(gen_() >> 11) * 0x1.0p-53);
  }
  int between(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (hi - lo + 1) - 1e-12);
  }
  bool coin(double p = 0.5) { return uniform() < p; }

 private:
  std::mt19937_64 gen_;
};

// In-tree over n nodes: node 0 is the root, node i points at a random
// earlier node. At least one target; the root may be a target too.
inline flan::FlanGraph random_tree(Rand& r, int n, int claim_number = 2) {
  flan::FlanGraph g;
  g.claim_number = claim_number;
  for (int i = 0; i < n; ++i) {
    flan::FlanNode node;
    node.node_id = i;
    node.text = "node " + std::to_string(i);
    node.is_root = i == 0;
    node.level = 0;
    g.nodes.push_back(node);
  }
  for (int i = 1; i < n; ++i) {
    const int p = r.between(0, i - 1);
    g.edges.push_back({i, p});
    g.nodes[i].level = g.nodes[p].level + 1;
  }
  bool any = false;
  for (auto& node : g.nodes) {
    node.is_target = r.coin(0.4);
    any |= node.is_target;
  }
  if (!any) g.nodes[n - 1].is_target = true;
  for (auto& node : g.nodes) node.origin_claim = node.is_target ? claim_number : 1;
  return g;
}

inline flan::Matrix random_matrix(Rand& r, std::size_t rows, std::size_t cols, double lo = -1.0,
                                  double hi = 1.0) {
  flan::Matrix m(rows, cols);
  for (double& x : m.flat()) x = r.uniform(lo, hi);
  return m;
}

inline oracle::Dense to_dense(const flan::Matrix& m) {
  oracle::Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

inline std::vector<double> row0(const flan::Matrix& m) {
  return std::vector<double>(m.row(0).begin(), m.row(0).end());
}

inline std::vector<std::pair<int, int>> edge_pairs(const flan::FlanGraph& g) {
  std::vector<std::pair<int, int>> e;
  for (const auto& x : g.edges) e.emplace_back(x.from, x.to);
  return e;
}

// Every parameter drawn uniformly from [-scale, scale], biases included.
inline flan::ModelParams random_params(const flan::ModelConfig& c, Rand& r, double scale = 0.8) {
  flan::ModelParams p = flan::zero_params(c);
  flan::for_each_tensor(p, [&](const std::string&, flan::Matrix& m) {
    for (double& x : m.flat()) x = r.uniform(-scale, scale);
  });
  return p;
}

// Smallest distance of any activation input to its kink (ReLU, LeakyReLU).
inline double kink_margin(const flan::ForwardCache& c) {
  double m = INFINITY;
  for (const auto& layer : c.layers) {
    for (double x : layer.pre.flat()) m = std::min(m, std::abs(x));
    for (const auto& row : layer.scores)
      for (double x : row) m = std::min(m, std::abs(x));
  }
  for (double x : c.hidden_pre) m = std::min(m, std::abs(x));
  return m;
}

}  // namespace testing_support

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

// Graph neural network over FLAN graphs with manual backpropagation.
//
// Messages follow edge direction (leaf -> root): node v aggregates its
// in-neighbors. Node features are row vectors, so a layer computes
// H' = ReLU(A H W + b) for an aggregation operator A chosen by the
// architecture. The readout averages the root row and the target rows; the
// MLP head maps [readout ‖ features] to a single logit.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "flan/error.hpp"
#include "flan/graph_builder.hpp"
#include "flan/metrics.hpp"
#include "flan/node_embedder.hpp"
#include "flan/tensor.hpp"

namespace flan {

enum class Arch { kGcn, kGraphSage, kGat };

inline std::string_view arch_name(Arch a) {
  switch (a) {
    case Arch::kGcn: return "gcn";
    case Arch::kGraphSage: return "sage";
    case Arch::kGat: return "gat";
  }
  return "sage";
}

inline Arch parse_arch(std::string_view s) {
  if (s == "gcn" || s == "GCN") return Arch::kGcn;
  if (s == "sage" || s == "graphsage" || s == "GraphSage") return Arch::kGraphSage;
  if (s == "gat" || s == "GAT") return Arch::kGat;
  fail(ErrorCode::kInvalidArgument, "unknown architecture '" + std::string(s) + "'");
}

struct ModelConfig {
  Arch arch = Arch::kGraphSage;
  int num_layers = 2;
  int hidden_dim = 128;
  int input_dim = 128;
  int feature_dim = 0;
  double learning_rate = 5e-3;
  int batch_size = 256;
  int epochs = 20;
  std::uint64_t seed = 0;
  bool add_self_loops = true;
  bool add_reverse_edges = false;
  double positive_class_weight = 1.0;
  bool targets_only = false;  // readout over targets only, root excluded
  int threads = 1;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

inline void validate_config(const ModelConfig& c) {
  auto need = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::kInvalidArgument, what);
  };
  need(c.num_layers >= 1 && c.num_layers <= 8, "num_layers must be in 1..8");
  need(c.hidden_dim > 0, "hidden_dim must be positive");
  need(c.input_dim > 0, "input_dim must be positive");
  need(c.feature_dim >= 0, "feature_dim must be non-negative");
  need(c.learning_rate > 0, "learning_rate must be positive");
  need(c.batch_size > 0, "batch_size must be positive");
  need(c.epochs >= 0, "epochs must be non-negative");
  need(c.positive_class_weight > 0, "positive_class_weight must be positive");
  need(c.threads >= 1, "threads must be positive");
}

inline void to_json(json& j, const ModelConfig& c) {
  j = json{{"arch", arch_name(c.arch)},
           {"num_layers", c.num_layers},
           {"hidden_dim", c.hidden_dim},
           {"input_dim", c.input_dim},
           {"feature_dim", c.feature_dim},
           {"learning_rate", c.learning_rate},
           {"batch_size", c.batch_size},
           {"epochs", c.epochs},
           {"seed", c.seed},
           {"add_self_loops", c.add_self_loops},
           {"add_reverse_edges", c.add_reverse_edges},
           {"positive_class_weight", c.positive_class_weight},
           {"targets_only", c.targets_only}};
}

inline ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.arch = parse_arch(j.at("arch").get<std::string>());
  c.num_layers = j.at("num_layers").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.input_dim = j.at("input_dim").get<int>();
  c.feature_dim = j.at("feature_dim").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.add_self_loops = j.at("add_self_loops").get<bool>();
  c.add_reverse_edges = j.at("add_reverse_edges").get<bool>();
  c.positive_class_weight = j.at("positive_class_weight").get<double>();
  c.targets_only = j.value("targets_only", false);
  validate_config(c);
  return c;
}

// ---------------------------------------------------------------------------
// Parameters

struct LayerParams {
  Matrix weight;        // in x out
  Matrix weight_neigh;  // in x out, GraphSage only
  Matrix bias;          // 1 x out
  Matrix att_src;       // 1 x out, GAT only: scores the sending node
  Matrix att_dst;       // 1 x out, GAT only: scores the receiving node

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

struct ModelParams {
  std::vector<LayerParams> layers;
  Matrix head_w1;  // (hidden + feature_dim) x hidden
  Matrix head_b1;  // 1 x hidden
  Matrix head_w2;  // hidden x 1
  Matrix head_b2;  // 1 x 1

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Visits every tensor in a fixed order (checkpoint and optimizer layout).
// Tensors that are empty for the architecture are skipped.
template <class Params, class F>
void for_each_tensor(Params& p, F&& f) {
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto& layer = p.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    f(prefix + "weight", layer.weight);
    if (layer.weight_neigh.size()) f(prefix + "weight_neigh", layer.weight_neigh);
    f(prefix + "bias", layer.bias);
    if (layer.att_src.size()) f(prefix + "att_src", layer.att_src);
    if (layer.att_dst.size()) f(prefix + "att_dst", layer.att_dst);
  }
  f(std::string("head.w1"), p.head_w1);
  f(std::string("head.b1"), p.head_b1);
  f(std::string("head.w2"), p.head_w2);
  f(std::string("head.b2"), p.head_b2);
}

inline ModelParams zero_params(const ModelConfig& c) {
  ModelParams p;
  for (int l = 0; l < c.num_layers; ++l) {
    const std::size_t in = static_cast<std::size_t>(l == 0 ? c.input_dim : c.hidden_dim);
    const std::size_t out = static_cast<std::size_t>(c.hidden_dim);
    LayerParams lp;
    lp.weight = Matrix(in, out);
    if (c.arch == Arch::kGraphSage) lp.weight_neigh = Matrix(in, out);
    lp.bias = Matrix(1, out);
    if (c.arch == Arch::kGat) {
      lp.att_src = Matrix(1, out);
      lp.att_dst = Matrix(1, out);
    }
    p.layers.push_back(std::move(lp));
  }
  const std::size_t h = static_cast<std::size_t>(c.hidden_dim);
  p.head_w1 = Matrix(h + static_cast<std::size_t>(c.feature_dim), h);
  p.head_b1 = Matrix(1, h);
  p.head_w2 = Matrix(h, 1);
  p.head_b2 = Matrix(1, 1);
  return p;
}

inline ModelParams zeros_like(const ModelParams& p) {
  ModelParams z = p;
  for_each_tensor(z, [](const std::string&, Matrix& m) { m.fill(0.0); });
  return z;
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard
// libraries, unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Glorot-uniform weights, zero biases.
inline ModelParams init_params(const ModelConfig& c) {
  validate_config(c);
  ModelParams p = zero_params(c);
  std::mt19937_64 gen(c.seed);
  for_each_tensor(p, [&](const std::string& name, Matrix& m) {
    const bool is_bias = name.ends_with("bias") || name == "head.b1" || name == "head.b2";
    if (is_bias) return;
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (double& v : m.flat()) v = (2.0 * unit_uniform(gen) - 1.0) * limit;
  });
  return p;
}

// ---------------------------------------------------------------------------
// Aggregation operators

// rows[v] lists (u, w): node v receives w * h_u.
struct Aggregator {
  std::vector<std::vector<std::pair<int, double>>> rows;
};

inline Matrix apply(const Aggregator& a, const Matrix& h) {
  Matrix out(a.rows.size(), h.cols());
  for (std::size_t v = 0; v < a.rows.size(); ++v) {
    double* o = out.row(v).data();
    for (const auto& [u, w] : a.rows[v]) {
      const double* src = h.row(static_cast<std::size_t>(u)).data();
      for (std::size_t j = 0; j < h.cols(); ++j) o[j] += w * src[j];
    }
  }
  return out;
}

// Adjoint of apply(): d_in[u] += w * d_out[v].
inline void apply_transpose_add(const Aggregator& a, const Matrix& d_out, Matrix& d_in) {
  for (std::size_t v = 0; v < a.rows.size(); ++v) {
    const double* g = d_out.row(v).data();
    for (const auto& [u, w] : a.rows[v]) {
      double* dst = d_in.row(static_cast<std::size_t>(u)).data();
      for (std::size_t j = 0; j < d_out.cols(); ++j) dst[j] += w * g[j];
    }
  }
}

inline void check_edges(std::span<const Edge> edges, std::size_t n) {
  for (const auto& e : edges)
    require_shape(e.from >= 0 && e.to >= 0 && static_cast<std::size_t>(e.from) < n &&
                      static_cast<std::size_t>(e.to) < n,
                  "edge endpoint outside the feature matrix");
}

// GCN propagation. Directed (default): row-normalized in-adjacency,
// A[v][u] = 1/deg_in(v) over u -> v (plus v itself with self loops).
// With reverse edges: symmetric normalization of the undirected adjacency.
inline Aggregator gcn_aggregator(std::span<const Edge> edges, std::size_t n, bool self_loops,
                                 bool reverse_edges) {
  check_edges(edges, n);
  std::vector<std::vector<int>> nbr(n);
  for (const auto& e : edges) {
    nbr[static_cast<std::size_t>(e.to)].push_back(e.from);
    if (reverse_edges) nbr[static_cast<std::size_t>(e.from)].push_back(e.to);
  }
  if (self_loops)
    for (std::size_t v = 0; v < n; ++v) nbr[v].insert(nbr[v].begin(), static_cast<int>(v));
  Aggregator a;
  a.rows.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (int u : nbr[v]) {
      double w;
      if (reverse_edges) {
        w = 1.0 / std::sqrt(static_cast<double>(nbr[v].size()) *
                            static_cast<double>(nbr[static_cast<std::size_t>(u)].size()));
      } else {
        w = 1.0 / static_cast<double>(nbr[v].size());
      }
      a.rows[v].emplace_back(u, w);
    }
  }
  return a;
}

// Mean over in-neighbors; nodes without in-neighbors get an empty row.
inline Aggregator mean_in_aggregator(std::span<const Edge> edges, std::size_t n) {
  check_edges(edges, n);
  Aggregator a;
  a.rows.resize(n);
  std::vector<int> deg(n, 0);
  for (const auto& e : edges) ++deg[static_cast<std::size_t>(e.to)];
  for (const auto& e : edges) {
    const auto v = static_cast<std::size_t>(e.to);
    a.rows[v].emplace_back(e.from, 1.0 / deg[v]);
  }
  return a;
}

// Attention neighborhood: v itself first, then its in-neighbors.
inline std::vector<std::vector<int>> gat_neighborhoods(std::span<const Edge> edges,
                                                       std::size_t n) {
  check_edges(edges, n);
  std::vector<std::vector<int>> nb(n);
  for (std::size_t v = 0; v < n; ++v) nb[v].push_back(static_cast<int>(v));
  for (const auto& e : edges) nb[static_cast<std::size_t>(e.to)].push_back(e.from);
  return nb;
}

constexpr double kLeakySlope = 0.2;

// ---------------------------------------------------------------------------
// Layers

struct Topology {
  std::size_t nodes = 0;
  Aggregator gcn;
  Aggregator mean_in;
  std::vector<std::vector<int>> gat;
  std::vector<int> readout_rows;
};

inline std::vector<int> readout_rows(const FlanGraph& g, bool targets_only) {
  std::vector<int> rows;
  const int root = g.root_id();
  if (!targets_only && root >= 0) rows.push_back(root);
  for (const auto& n : g.nodes)
    if (n.is_target && (targets_only || n.node_id != root)) rows.push_back(n.node_id);
  if (rows.empty() && root >= 0) rows.push_back(root);
  return rows;
}

inline Topology make_topology(const FlanGraph& g, const ModelConfig& c) {
  Topology t;
  t.nodes = g.nodes.size();
  switch (c.arch) {
    case Arch::kGcn:
      t.gcn = gcn_aggregator(g.edges, t.nodes, c.add_self_loops, c.add_reverse_edges);
      break;
    case Arch::kGraphSage:
      t.mean_in = mean_in_aggregator(g.edges, t.nodes);
      break;
    case Arch::kGat:
      t.gat = gat_neighborhoods(g.edges, t.nodes);
      break;
  }
  t.readout_rows = readout_rows(g, c.targets_only);
  return t;
}

struct LayerCache {
  Matrix input;
  Matrix aggregated;  // A·H for GCN, neighbor mean for GraphSage
  Matrix projected;   // H·W for GAT
  Matrix pre;         // pre-activation
  std::vector<std::vector<double>> scores;  // GAT raw scores e_uv, per neighborhood
  std::vector<std::vector<double>> alpha;   // GAT attention weights
};

namespace gnn_detail {

inline void add_bias_relu(Matrix& pre, const Matrix& bias, Matrix& out) {
  out = Matrix(pre.rows(), pre.cols());
  for (std::size_t i = 0; i < pre.rows(); ++i) {
    for (std::size_t j = 0; j < pre.cols(); ++j) {
      pre(i, j) += bias(0, j);
      out(i, j) = pre(i, j) > 0.0 ? pre(i, j) : 0.0;
    }
  }
}

inline Matrix relu_grad(const Matrix& d_out, const Matrix& pre) {
  Matrix d(pre.rows(), pre.cols());
  for (std::size_t i = 0; i < d.size(); ++i)
    d.flat()[i] = pre.flat()[i] > 0.0 ? d_out.flat()[i] : 0.0;
  return d;
}

inline void add_column_sums(Matrix& acc, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) acc(0, j) += m(i, j);
}

inline double dot_row(const Matrix& m, std::size_t r, const Matrix& vec) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) s += m(r, j) * vec(0, j);
  return s;
}

}  // namespace gnn_detail

inline Matrix layer_forward(Arch arch, const LayerParams& p, const Topology& t, const Matrix& h,
                            LayerCache* cache) {
  using namespace gnn_detail;
  require_shape(h.rows() == t.nodes, "feature rows != node count");
  require_shape(h.cols() == p.weight.rows(), "feature width != layer input dim");
  LayerCache local;
  LayerCache& c = cache ? *cache : local;
  c.input = h;
  Matrix out;
  switch (arch) {
    case Arch::kGcn: {
      c.aggregated = apply(t.gcn, h);
      c.pre = matmul(c.aggregated, p.weight);
      break;
    }
    case Arch::kGraphSage: {
      c.aggregated = apply(t.mean_in, h);
      c.pre = matmul(h, p.weight);
      add_in_place(c.pre, matmul(c.aggregated, p.weight_neigh));
      break;
    }
    case Arch::kGat: {
      c.projected = matmul(h, p.weight);
      const std::size_t n = t.nodes, d = c.projected.cols();
      std::vector<double> src(n), dst(n);
      for (std::size_t v = 0; v < n; ++v) {
        src[v] = dot_row(c.projected, v, p.att_src);
        dst[v] = dot_row(c.projected, v, p.att_dst);
      }
      c.scores.assign(n, {});
      c.alpha.assign(n, {});
      c.pre = Matrix(n, d);
      for (std::size_t v = 0; v < n; ++v) {
        const auto& nb = t.gat[v];
        auto& e = c.scores[v];
        auto& a = c.alpha[v];
        e.resize(nb.size());
        a.resize(nb.size());
        double mx = -INFINITY;
        for (std::size_t k = 0; k < nb.size(); ++k) {
          e[k] = src[static_cast<std::size_t>(nb[k])] + dst[v];
          const double l = e[k] > 0.0 ? e[k] : kLeakySlope * e[k];
          a[k] = l;
          mx = std::max(mx, l);
        }
        double z = 0.0;
        for (double& x : a) {
          x = std::exp(x - mx);
          z += x;
        }
        for (double& x : a) x /= z;
        double* o = c.pre.row(v).data();
        for (std::size_t k = 0; k < nb.size(); ++k) {
          const double* zu = c.projected.row(static_cast<std::size_t>(nb[k])).data();
          for (std::size_t j = 0; j < d; ++j) o[j] += a[k] * zu[j];
        }
      }
      break;
    }
  }
  add_bias_relu(c.pre, p.bias, out);
  return out;
}

// Accumulates parameter gradients into `g` and returns d(loss)/d(input)
// (empty matrix when `need_input_grad` is false).
inline Matrix layer_backward(Arch arch, const LayerParams& p, const Topology& t,
                             const LayerCache& c, const Matrix& d_out, LayerParams& g,
                             bool need_input_grad) {
  using namespace gnn_detail;
  const Matrix d_pre = relu_grad(d_out, c.pre);
  add_column_sums(g.bias, d_pre);
  Matrix d_in;
  switch (arch) {
    case Arch::kGcn: {
      add_matmul_at_b(g.weight, c.aggregated, d_pre);
      if (need_input_grad) {
        const Matrix d_agg = matmul_a_bt(d_pre, p.weight);
        d_in = Matrix(c.input.rows(), c.input.cols());
        apply_transpose_add(t.gcn, d_agg, d_in);
      }
      break;
    }
    case Arch::kGraphSage: {
      add_matmul_at_b(g.weight, c.input, d_pre);
      add_matmul_at_b(g.weight_neigh, c.aggregated, d_pre);
      if (need_input_grad) {
        d_in = matmul_a_bt(d_pre, p.weight);
        apply_transpose_add(t.mean_in, matmul_a_bt(d_pre, p.weight_neigh), d_in);
      }
      break;
    }
    case Arch::kGat: {
      const std::size_t n = t.nodes, d = c.projected.cols();
      Matrix d_proj(n, d);
      std::vector<double> d_src(n, 0.0), d_dst(n, 0.0);
      for (std::size_t v = 0; v < n; ++v) {
        const auto& nb = t.gat[v];
        const auto& a = c.alpha[v];
        const double* gv = d_pre.row(v).data();
        std::vector<double> d_alpha(nb.size());
        double weighted = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) {
          const auto u = static_cast<std::size_t>(nb[k]);
          const double* zu = c.projected.row(u).data();
          double* dzu = d_proj.row(u).data();
          double s = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            s += gv[j] * zu[j];
            dzu[j] += a[k] * gv[j];
          }
          d_alpha[k] = s;
          weighted += a[k] * s;
        }
        for (std::size_t k = 0; k < nb.size(); ++k) {
          const double d_leaky = a[k] * (d_alpha[k] - weighted);
          const double d_e = d_leaky * (c.scores[v][k] > 0.0 ? 1.0 : kLeakySlope);
          d_src[static_cast<std::size_t>(nb[k])] += d_e;
          d_dst[v] += d_e;
        }
      }
      for (std::size_t v = 0; v < n; ++v) {
        double* dz = d_proj.row(v).data();
        for (std::size_t j = 0; j < d; ++j) {
          g.att_src(0, j) += d_src[v] * c.projected(v, j);
          g.att_dst(0, j) += d_dst[v] * c.projected(v, j);
          dz[j] += d_src[v] * p.att_src(0, j) + d_dst[v] * p.att_dst(0, j);
        }
      }
      add_matmul_at_b(g.weight, c.input, d_proj);
      if (need_input_grad) d_in = matmul_a_bt(d_proj, p.weight);
      break;
    }
  }
  return d_in;
}

// Public single-layer operations on raw edge lists.

inline Matrix gcn_layer(const Matrix& features, std::span<const Edge> edges, const Matrix& weight,
                        const Matrix& bias, bool self_loops, bool reverse_edges = false) {
  Topology t;
  t.nodes = features.rows();
  t.gcn = gcn_aggregator(edges, t.nodes, self_loops, reverse_edges);
  require_shape(bias.rows() == 1 && bias.cols() == weight.cols(), "bias shape");
  return layer_forward(Arch::kGcn, LayerParams{weight, {}, bias, {}, {}}, t, features, nullptr);
}

inline Matrix sage_layer(const Matrix& features, std::span<const Edge> edges,
                         const Matrix& weight_self, const Matrix& weight_neigh,
                         const Matrix& bias) {
  Topology t;
  t.nodes = features.rows();
  t.mean_in = mean_in_aggregator(edges, t.nodes);
  require_shape(weight_neigh.rows() == weight_self.rows() && weight_neigh.cols() == weight_self.cols(),
                "GraphSage weight shapes");
  require_shape(bias.rows() == 1 && bias.cols() == weight_self.cols(), "bias shape");
  return layer_forward(Arch::kGraphSage, LayerParams{weight_self, weight_neigh, bias, {}, {}}, t,
                       features, nullptr);
}

// `attention` holds [a_src ‖ a_dst] as a 1 x 2·out row.
inline Matrix gat_layer(const Matrix& features, std::span<const Edge> edges, const Matrix& weight,
                        const Matrix& attention, const Matrix& bias,
                        std::vector<std::vector<double>>* alpha_out = nullptr) {
  const std::size_t d = weight.cols();
  require_shape(attention.rows() == 1 && attention.cols() == 2 * d, "attention vector shape");
  require_shape(bias.rows() == 1 && bias.cols() == d, "bias shape");
  LayerParams p{weight, {}, bias, Matrix(1, d), Matrix(1, d)};
  for (std::size_t j = 0; j < d; ++j) {
    p.att_src(0, j) = attention(0, j);
    p.att_dst(0, j) = attention(0, d + j);
  }
  Topology t;
  t.nodes = features.rows();
  t.gat = gat_neighborhoods(edges, t.nodes);
  LayerCache cache;
  Matrix out = layer_forward(Arch::kGat, p, t, features, &cache);
  if (alpha_out) *alpha_out = cache.alpha;
  return out;
}

// Mean of the root row and the target rows (each counted once).
inline std::vector<double> readout(const Matrix& node_states, const FlanGraph& graph,
                                   bool targets_only = false) {
  require_shape(node_states.rows() == graph.nodes.size(), "readout rows != node count");
  const auto rows = readout_rows(graph, targets_only);
  std::vector<double> r(node_states.cols(), 0.0);
  for (int v : rows) {
    auto row = node_states.row(static_cast<std::size_t>(v));
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += row[j];
  }
  for (double& x : r) x /= static_cast<double>(rows.size());
  return r;
}

// ---------------------------------------------------------------------------
// Full model

struct ForwardCache {
  Topology topology;
  std::vector<LayerCache> layers;
  Matrix last;                  // output of the final GNN layer
  std::vector<double> head_in;  // [readout ‖ features]
  std::vector<double> hidden_pre;
  std::vector<double> hidden;
  double logit = 0.0;
};

inline double forward_cached(const EmbeddedGraph& graph, std::span<const double> feature_vec,
                             const ModelParams& params, const ModelConfig& config,
                             ForwardCache& cache) {
  require_shape(feature_vec.size() == static_cast<std::size_t>(config.feature_dim),
                "feature vector length != feature_dim");
  require_shape(graph.features.cols() == static_cast<std::size_t>(config.input_dim),
                "node feature width != input_dim");
  require_shape(params.layers.size() == static_cast<std::size_t>(config.num_layers),
                "parameter layer count != num_layers");
  cache.topology = make_topology(graph.graph, config);
  cache.layers.assign(params.layers.size(), {});
  Matrix h = graph.features;
  for (std::size_t l = 0; l < params.layers.size(); ++l)
    h = layer_forward(config.arch, params.layers[l], cache.topology, h, &cache.layers[l]);
  cache.last = std::move(h);

  const std::size_t hd = static_cast<std::size_t>(config.hidden_dim);
  cache.head_in.assign(hd + feature_vec.size(), 0.0);
  const auto& rows = cache.topology.readout_rows;
  for (int v : rows) {
    auto row = cache.last.row(static_cast<std::size_t>(v));
    for (std::size_t j = 0; j < hd; ++j) cache.head_in[j] += row[j];
  }
  for (std::size_t j = 0; j < hd; ++j) cache.head_in[j] /= static_cast<double>(rows.size());
  std::copy(feature_vec.begin(), feature_vec.end(), cache.head_in.begin() + static_cast<std::ptrdiff_t>(hd));

  const Matrix& w1 = params.head_w1;
  require_shape(w1.rows() == cache.head_in.size() && w1.cols() == hd, "head weight shape");
  cache.hidden_pre.assign(hd, 0.0);
  for (std::size_t j = 0; j < hd; ++j) cache.hidden_pre[j] = params.head_b1(0, j);
  for (std::size_t i = 0; i < cache.head_in.size(); ++i) {
    const double x = cache.head_in[i];
    if (x == 0.0) continue;
    const double* wr = w1.row(i).data();
    for (std::size_t j = 0; j < hd; ++j) cache.hidden_pre[j] += x * wr[j];
  }
  cache.hidden.resize(hd);
  double logit = params.head_b2(0, 0);
  for (std::size_t j = 0; j < hd; ++j) {
    cache.hidden[j] = cache.hidden_pre[j] > 0.0 ? cache.hidden_pre[j] : 0.0;
    logit += cache.hidden[j] * params.head_w2(j, 0);
  }
  cache.logit = logit;
  return logit;
}

inline double forward(const EmbeddedGraph& graph, std::span<const double> feature_vec,
                      const ModelParams& params, const ModelConfig& config) {
  ForwardCache cache;
  return forward_cached(graph, feature_vec, params, config, cache);
}

// Gradient of the loss w.r.t. every parameter, given d(loss)/d(logit).
inline void backward(const ModelParams& params, const ModelConfig& config, const ForwardCache& cache,
                     double d_logit, ModelParams& grads) {
  const std::size_t hd = static_cast<std::size_t>(config.hidden_dim);
  grads.head_b2(0, 0) += d_logit;
  std::vector<double> d_hpre(hd);
  for (std::size_t j = 0; j < hd; ++j) {
    grads.head_w2(j, 0) += d_logit * cache.hidden[j];
    d_hpre[j] = cache.hidden_pre[j] > 0.0 ? d_logit * params.head_w2(j, 0) : 0.0;
    grads.head_b1(0, j) += d_hpre[j];
  }
  std::vector<double> d_readout(hd, 0.0);
  for (std::size_t i = 0; i < cache.head_in.size(); ++i) {
    const double x = cache.head_in[i];
    double* gw = grads.head_w1.row(i).data();
    const double* w = params.head_w1.row(i).data();
    double s = 0.0;
    for (std::size_t j = 0; j < hd; ++j) {
      gw[j] += x * d_hpre[j];
      s += w[j] * d_hpre[j];
    }
    if (i < hd) d_readout[i] = s;
  }
  const auto& rows = cache.topology.readout_rows;
  Matrix d_h(cache.last.rows(), cache.last.cols());
  const double share = 1.0 / static_cast<double>(rows.size());
  for (int v : rows)
    for (std::size_t j = 0; j < hd; ++j) d_h(static_cast<std::size_t>(v), j) += share * d_readout[j];
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    d_h = layer_backward(config.arch, params.layers[l], cache.topology, cache.layers[l], d_h,
                         grads.layers[l], l > 0);
  }
}

struct LossGrad {
  double loss = 0.0;
  double d_logit = 0.0;
};

inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Weighted binary cross-entropy on a logit:
// loss = w·y·softplus(-z) + (1-y)·softplus(z).
inline LossGrad bce_loss(double logit, int label, double pos_weight = 1.0) {
  if (label != 0 && label != 1) fail(ErrorCode::kInvalidArgument, "label must be 0 or 1");
  if (!(pos_weight > 0)) fail(ErrorCode::kInvalidArgument, "pos_weight must be positive");
  const double p = sigmoid(logit);
  if (label == 1) return {pos_weight * softplus(-logit), pos_weight * (p - 1.0)};
  return {softplus(logit), p};
}

// ---------------------------------------------------------------------------
// Training

struct Example {
  EmbeddedGraph graph;
  std::vector<double> features;  // empty in plain mode
  std::optional<int> label;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean training loss per epoch
  std::optional<EvalReport> validation;  // unset when the validation set holds one class
  double wall_seconds = 0.0;
};

// Adam state and update with the usual bias correction.
class Adam {
 public:
  Adam(const ModelParams& shape, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8)
      : m_(zeros_like(shape)), v_(zeros_like(shape)), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

  void step(ModelParams& params, const ModelParams& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    std::vector<Matrix*> ps, ms, vs;
    std::vector<const Matrix*> gs;
    for_each_tensor(params, [&](const std::string&, Matrix& m) { ps.push_back(&m); });
    for_each_tensor(grads, [&](const std::string&, const Matrix& m) { gs.push_back(&m); });
    for_each_tensor(m_, [&](const std::string&, Matrix& m) { ms.push_back(&m); });
    for_each_tensor(v_, [&](const std::string&, Matrix& m) { vs.push_back(&m); });
    for (std::size_t k = 0; k < ps.size(); ++k) {
      auto p = ps[k]->flat();
      auto g = gs[k]->flat();
      auto m = ms[k]->flat();
      auto v = vs[k]->flat();
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = b1_ * m[i] + (1.0 - b1_) * g[i];
        v[i] = b2_ * v[i] + (1.0 - b2_) * g[i] * g[i];
        p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
      }
    }
  }

 private:
  ModelParams m_, v_;
  double lr_, b1_, b2_, eps_;
  long long t_ = 0;
};

namespace gnn_detail {

inline void add_params(ModelParams& acc, ModelParams& other) {
  std::vector<Matrix*> a, b;
  for_each_tensor(acc, [&](const std::string&, Matrix& m) { a.push_back(&m); });
  for_each_tensor(other, [&](const std::string&, Matrix& m) { b.push_back(&m); });
  for (std::size_t k = 0; k < a.size(); ++k) add_in_place(*a[k], *b[k]);
}

inline void scale_params(ModelParams& p, double s) {
  for_each_tensor(p, [&](const std::string&, Matrix& m) {
    for (double& x : m.flat()) x *= s;
  });
}

// Fisher-Yates with a portable bounded draw.
inline void shuffle(std::vector<std::size_t>& order, std::mt19937_64& gen) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(unit_uniform(gen) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
}

}  // namespace gnn_detail

inline double example_loss_grad(const Example& ex, const ModelParams& params,
                                const ModelConfig& config, ModelParams& grads) {
  if (!ex.label) fail(ErrorCode::kInvalidArgument, "training example without a label");
  ForwardCache cache;
  const double logit = forward_cached(ex.graph, ex.features, params, config, cache);
  const LossGrad lg = bce_loss(logit, *ex.label, config.positive_class_weight);
  backward(params, config, cache, lg.d_logit, grads);
  return lg.loss;
}

inline std::vector<double> predict(const ModelParams& params, const ModelConfig& config,
                                   std::span<const Example> examples) {
  std::vector<double> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(sigmoid(forward(ex.graph, ex.features, params, config)));
  return out;
}

// Mini-batch Adam on mean BCE. Batches follow a seeded shuffle each epoch.
// A batch is cut into fixed chunks of kGradChunk examples; chunks may run on
// several threads and their gradients are reduced in chunk order, so results
// do not depend on the thread count.
inline constexpr std::size_t kGradChunk = 16;

inline std::pair<ModelParams, TrainReport> train(std::span<const Example> dataset,
                                                 const ModelConfig& config,
                                                 std::span<const Example> validation = {}) {
  validate_config(config);
  if (dataset.empty()) fail(ErrorCode::kEmptyInput, "training set is empty");
  for (const auto& ex : dataset)
    if (!ex.label) fail(ErrorCode::kInvalidArgument, "training example without a label");
  const auto start = std::chrono::steady_clock::now();

  ModelParams params = init_params(config);
  Adam adam(params, config.learning_rate);
  std::mt19937_64 order_gen(splitmix64(config.seed ^ 0x5DEECE66DULL));
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainReport report;
  const std::size_t threads = static_cast<std::size_t>(config.threads);
  const ModelParams zero = zeros_like(params);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    gnn_detail::shuffle(order, order_gen);
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(config.batch_size));
      const std::size_t count = e - b;
      const std::size_t chunks = (count + kGradChunk - 1) / kGradChunk;
      const std::size_t workers = std::min(threads, chunks);
      std::vector<ModelParams> partial(chunks, zero);
      std::vector<double> partial_loss(chunks, 0.0);
      std::vector<std::exception_ptr> errors(chunks);
      std::vector<std::string> failure(chunks);
      auto work = [&](std::size_t w) {
        for (std::size_t c = w; c < chunks; c += workers) {
          try {
            const std::size_t lo = b + c * kGradChunk, hi = std::min(e, lo + kGradChunk);
            for (std::size_t i = lo; i < hi; ++i) {
              const double loss = example_loss_grad(dataset[order[i]], params, config, partial[c]);
              if (!std::isfinite(loss)) {
                failure[c] = "epoch " + std::to_string(epoch) + ", example " +
                             std::to_string(order[i]) + ": loss " + std::to_string(loss);
                break;
              }
              partial_loss[c] += loss;
            }
          } catch (...) {
            errors[c] = std::current_exception();
          }
        }
      };
      if (workers == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
      }
      for (std::size_t c = 0; c < chunks; ++c) {
        if (errors[c]) std::rethrow_exception(errors[c]);
        if (!failure[c].empty()) fail(ErrorCode::kNonFiniteLoss, failure[c]);
      }
      for (std::size_t c = 1; c < chunks; ++c) gnn_detail::add_params(partial[0], partial[c]);
      double batch_loss = 0.0;
      for (double l : partial_loss) batch_loss += l;
      gnn_detail::scale_params(partial[0], 1.0 / static_cast<double>(count));
      adam.step(params, partial[0]);
      epoch_loss += batch_loss;
    }
    const double mean = epoch_loss / static_cast<double>(dataset.size());
    if (!std::isfinite(mean))
      fail(ErrorCode::kNonFiniteLoss, "epoch " + std::to_string(epoch) + " mean loss is not finite");
    report.epoch_loss.push_back(mean);
  }

  if (!validation.empty()) {
    const auto scores = predict(params, config, validation);
    std::vector<int> labels;
    for (const auto& ex : validation) {
      if (!ex.label) fail(ErrorCode::kInvalidArgument, "validation example without a label");
      labels.push_back(*ex.label);
    }
    const auto pos = std::count(labels.begin(), labels.end(), 1);
    if (pos > 0 && pos < static_cast<std::ptrdiff_t>(labels.size()))
      report.validation = evaluate(scores, labels);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(params), std::move(report)};
}

}  // namespace flan

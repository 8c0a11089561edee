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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "flan/core.hpp"
#include "flan/error.hpp"

namespace flan {

struct Confusion {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct EvalReport {
  double auc = 0.0;
  double macro_f1 = 0.0;
  Confusion confusion;
  long long n = 0;
};

namespace metrics_detail {

inline void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    fail(ErrorCode::kInvalidArgument, "scores and labels differ in length");
  for (double s : scores)
    if (std::isnan(s)) fail(ErrorCode::kInvalidArgument, "NaN score");
  for (int y : labels)
    if (y != 0 && y != 1) fail(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
}

}  // namespace metrics_detail

// Area under the ROC curve as the Mann-Whitney statistic. Tied
// positive/negative pairs earn half credit.
inline double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  metrics_detail::check_inputs(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double credit = 0.0;
  long long negatives_below = 0, positives = 0, negatives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    long long p = 0, q = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? p : q) += 1;
      ++j;
    }
    credit += static_cast<double>(p) * static_cast<double>(negatives_below) +
              0.5 * static_cast<double>(p) * static_cast<double>(q);
    negatives_below += q;
    positives += p;
    negatives += q;
    i = j;
  }
  if (positives == 0 || negatives == 0)
    fail(ErrorCode::kSingleClass, "AUC needs both classes");
  return credit / (static_cast<double>(positives) * static_cast<double>(negatives));
}

// Prediction is positive when score >= threshold.
inline Confusion confusion_counts(std::span<const double> scores, std::span<const int> labels,
                                  double threshold = 0.5) {
  metrics_detail::check_inputs(scores, labels);
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    if (pred && labels[i] == 1) ++c.tp;
    else if (pred) ++c.fp;
    else if (labels[i] == 0) ++c.tn;
    else ++c.fn;
  }
  return c;
}

// Per-class F1 = 2TP / (2TP + FP + FN). A class that is neither predicted
// nor present scores 1.
inline double macro_f1_from(const Confusion& c) {
  auto f1 = [](long long tp, long long fp, long long fn) {
    const long long denom = 2 * tp + fp + fn;
    return denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  };
  return 0.5 * (f1(c.tp, c.fp, c.fn) + f1(c.tn, c.fn, c.fp));
}

inline double macro_f1(std::span<const double> scores, std::span<const int> labels,
                       double threshold = 0.5) {
  if (scores.empty()) fail(ErrorCode::kInvalidArgument, "macro_f1 on empty input");
  return macro_f1_from(confusion_counts(scores, labels, threshold));
}

inline EvalReport evaluate(std::span<const double> scores, std::span<const int> labels,
                           double threshold = 0.5) {
  EvalReport r;
  r.auc = roc_auc(scores, labels);
  r.confusion = confusion_counts(scores, labels, threshold);
  r.macro_f1 = macro_f1_from(r.confusion);
  r.n = static_cast<long long>(scores.size());
  return r;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};

inline MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::kInvalidArgument, "mean_std of nothing");
  MeanStd m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return m;
}

struct SeedAggregate {
  MeanStd auc;
  MeanStd macro_f1;
  std::size_t seeds = 0;
};

inline SeedAggregate aggregate_seeds(std::span<const EvalReport> reports) {
  if (reports.empty()) fail(ErrorCode::kInvalidArgument, "aggregate_seeds needs a report");
  std::vector<double> aucs, f1s;
  for (const auto& r : reports) {
    aucs.push_back(r.auc);
    f1s.push_back(r.macro_f1);
  }
  return {mean_std(aucs), mean_std(f1s), reports.size()};
}

// "66.04±0.26": percentages with two decimals.
inline std::string format_mean_std(const MeanStd& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f±%.2f", 100.0 * m.mean, 100.0 * m.std);
  return buf;
}

inline void to_json(json& j, const EvalReport& r) {
  j = json{{"auc", r.auc},
           {"macro_f1", r.macro_f1},
           {"n", r.n},
           {"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp},
                          {"tn", r.confusion.tn}, {"fn", r.confusion.fn}}}};
}

inline void to_json(json& j, const SeedAggregate& a) {
  j = json{{"seeds", a.seeds},
           {"auc", {{"mean", a.auc.mean}, {"std", a.auc.std}}},
           {"macro_f1", {{"mean", a.macro_f1.mean}, {"std", a.macro_f1.std}}}};
}

}  // namespace flan

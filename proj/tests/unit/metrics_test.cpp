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

#include <gtest/gtest.h>

#include "flan/metrics.hpp"
#include "oracles/metric_oracles.hpp"
#include "support/random_cases.hpp"

namespace {

using flan::ErrorCode;
using testing_support::Rand;

struct Instance {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Scores on a coarse grid so ties are common; both classes present.
Instance random_instance(Rand& r) {
  Instance in;
  const int n = r.between(2, 200);
  const int grid = r.between(2, 30);
  for (int i = 0; i < n; ++i) {
    in.scores.push_back(static_cast<double>(r.between(0, grid)) / grid);
    in.labels.push_back(r.coin(r.uniform(0.1, 0.9)) ? 1 : 0);
  }
  in.labels[0] = 1;
  in.labels[1] = 0;
  return in;
}

TEST(RocAuc, PerfectRanking) {
  EXPECT_EQ(flan::roc_auc(std::vector<double>{0.9, 0.8, 0.3}, std::vector<int>{1, 1, 0}), 1.0);
  EXPECT_EQ(flan::roc_auc(std::vector<double>{0.1, 0.2, 0.3}, std::vector<int>{1, 1, 0}), 0.0);
}

TEST(RocAuc, AllTiesIsHalf) {
  EXPECT_EQ(flan::roc_auc(std::vector<double>(6, 0.4), std::vector<int>{1, 0, 1, 0, 0, 1}), 0.5);
}

TEST(RocAuc, MatchesPairCountingOracle) {
  Rand r(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_instance(r);
    EXPECT_NEAR(flan::roc_auc(in.scores, in.labels), oracle::pair_auc(in.scores, in.labels), 1e-12);
  }
}

TEST(RocAuc, MonotoneTransformInvariance) {
  Rand r(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = random_instance(r);
    std::vector<double> t;
    for (double s : in.scores) t.push_back(std::exp(3.0 * s) - 7.0);
    EXPECT_NEAR(flan::roc_auc(in.scores, in.labels), flan::roc_auc(t, in.labels), 1e-12);
  }
}

TEST(RocAuc, ComplementLabelsSumToOne) {
  Rand r(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto in = random_instance(r);
    std::vector<int> flipped;
    for (int y : in.labels) flipped.push_back(1 - y);
    EXPECT_NEAR(flan::roc_auc(in.scores, in.labels) + flan::roc_auc(in.scores, flipped), 1.0, 1e-12);
  }
}

TEST(RocAuc, Errors) {
  auto code = [](auto f) {
    try {
      f();
    } catch (const flan::Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  EXPECT_EQ(code([] { flan::roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}); }),
            ErrorCode::kSingleClass);
  EXPECT_EQ(code([] { flan::roc_auc(std::vector<double>{0.1}, std::vector<int>{1, 0}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code([] { flan::roc_auc(std::vector<double>{NAN, 0.2}, std::vector<int>{1, 0}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code([] { flan::roc_auc(std::vector<double>{0.3, 0.2}, std::vector<int>{2, 0}); }),
            ErrorCode::kInvalidArgument);
}

TEST(MacroF1, PerfectAndAllPositive) {
  EXPECT_EQ(flan::macro_f1(std::vector<double>{0.9, 0.1, 0.7, 0.2}, std::vector<int>{1, 0, 1, 0}), 1.0);
  const std::vector<double> s(4, 0.9);
  const std::vector<int> y = {1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(flan::macro_f1(s, y), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(oracle::counting_macro_f1(s, y, 0.5), 1.0 / 3.0);
}

TEST(MacroF1, ThresholdIsInclusive) {
  EXPECT_EQ(flan::macro_f1(std::vector<double>{0.5, 0.49}, std::vector<int>{1, 0}), 1.0);
  EXPECT_EQ(flan::macro_f1(std::vector<double>{0.5, 0.49}, std::vector<int>{1, 0}, 0.6), 1.0 / 3.0);
}

TEST(MacroF1, MatchesCountingOracleExactly) {
  Rand r(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_instance(r);
    const double t = r.uniform(0.05, 0.95);
    EXPECT_EQ(flan::macro_f1(in.scores, in.labels, t), oracle::counting_macro_f1(in.scores, in.labels, t));
  }
}

TEST(MacroF1, PermutationAndComplementSymmetry) {
  Rand r(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto in = random_instance(r);
    const double base = flan::macro_f1(in.scores, in.labels);
    auto p = in;
    for (int i = static_cast<int>(p.scores.size()) - 1; i > 0; --i) {
      const int j = r.between(0, i);
      std::swap(p.scores[i], p.scores[j]);
      std::swap(p.labels[i], p.labels[j]);
    }
    EXPECT_EQ(flan::macro_f1(p.scores, p.labels), base);
    // Complementing labels and predictions: predicted 1 iff s >= 0.5 maps to
    // predicted 1 iff (1 - s) > 0.5, so grid scores must avoid 0.5 exactly.
    std::vector<double> cs;
    std::vector<int> cy;
    for (std::size_t i = 0; i < in.scores.size(); ++i) {
      const double s = in.scores[i] == 0.5 ? 0.51 : in.scores[i];
      in.scores[i] = s;
      cs.push_back(1.0 - s);
      cy.push_back(1 - in.labels[i]);
    }
    EXPECT_NEAR(flan::macro_f1(in.scores, in.labels), flan::macro_f1(cs, cy), 1e-15);
  }
}

TEST(Evaluate, ConfusionCounts) {
  const std::vector<double> s = {0.9, 0.8, 0.2, 0.6, 0.1};
  const std::vector<int> y = {1, 0, 1, 0, 0};
  const auto r = flan::evaluate(s, y);
  EXPECT_EQ(r.confusion, (flan::Confusion{1, 2, 1, 1}));
  EXPECT_EQ(r.n, 5);
  EXPECT_DOUBLE_EQ(r.auc, oracle::pair_auc(s, y));
  EXPECT_DOUBLE_EQ(r.macro_f1, oracle::counting_macro_f1(s, y, 0.5));
}

TEST(AggregateSeeds, MeanAndSampleStd) {
  flan::EvalReport a, b;
  a.auc = 0.6;
  b.auc = 0.7;
  a.macro_f1 = b.macro_f1 = 0.4;
  const std::vector<flan::EvalReport> two = {a, b};
  const auto agg = flan::aggregate_seeds(two);
  EXPECT_NEAR(agg.auc.mean, 0.65, 1e-15);
  EXPECT_NEAR(agg.auc.std, std::sqrt(0.005), 1e-15);
  EXPECT_NEAR(agg.auc.std, 0.0707, 1e-4);
  EXPECT_EQ(agg.macro_f1.std, 0.0);
  EXPECT_EQ(agg.seeds, 2u);
  const std::vector<flan::EvalReport> one = {a};
  EXPECT_EQ(flan::aggregate_seeds(one).auc.std, 0.0);
  EXPECT_THROW(flan::aggregate_seeds({}), flan::Error);
}

TEST(AggregateSeeds, FormatsPercentages) {
  EXPECT_EQ(flan::format_mean_std({0.660412, 0.00264}), "66.04±0.26");
  EXPECT_EQ(flan::format_mean_std({1.0, 0.0}), "100.00±0.00");
}

}  // namespace

// Copyright 2026 The mimlal Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "mimlal/objective.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mimlal/verify.h"

namespace mimlal {
namespace {

using L = TriLabel;

Dataset RandomLabeled(int num_bags, int num_classes, int dim, uint64_t seed,
                      double known = 0.6) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Bag> bags;
  std::vector<LabelVector> labels;
  for (int b = 0; b < num_bags; ++b) {
    bags.push_back(RandomBag(size(rng), dim, rng()));
    LabelVector y(num_classes, L::kUnknown);
    for (int c = 0; c < num_classes; ++c) {
      if (u(rng) < known) y[c] = u(rng) < 0.5 ? L::kNegative : L::kPositive;
    }
    labels.push_back(y);
  }
  return Dataset(bags, labels, num_classes, dim);
}

TEST(PairLossTest, ZeroWeights) {
  Bag bag{"b", Eigen::MatrixXd::Ones(2, 3)};
  ParamMatrix w = ParamMatrix::Zero(2, 3);
  EXPECT_NEAR(PairLoss(w, bag, 0, 0), 1.38629436, 1e-8);
  EXPECT_NEAR(PairLoss(w, bag, 0, 1), 0.28768207, 1e-8);
  EXPECT_THROW(PairLoss(w, bag, 0, 2), ValidationError);
}

TEST(PairLossTest, MatchesEnumeratedMarginal) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    ParamMatrix w = RandomParams(3, 2, 1.5, seed);
    Bag bag = RandomBag(3, 2, seed + 50);
    for (int c = 0; c < 3; ++c) {
      for (int l = 0; l < 2; ++l) {
        const double loss = PairLoss(w, bag, c, l);
        EXPECT_GE(loss, 0.0);
        EXPECT_NEAR(loss, -std::log(BruteforceMarginal(w, bag, c, l)), 1e-10);
      }
    }
  }
}

TEST(MmlObjectiveTest, EmptyAndSingleLabel) {
  Dataset empty = RandomLabeled(3, 3, 2, 1, 0.0);
  ParamMatrix w = RandomParams(3, 2, 1.0, 2);
  EXPECT_EQ(MmlObjective(w, empty, 0.0), 0.0);
  EXPECT_TRUE(MmlGradient(w, empty, 0.0).isZero());

  Dataset one = RandomLabeled(3, 3, 2, 1, 0.0);
  one.Reveal(1, 2, 1);
  EXPECT_NEAR(MmlObjective(w, one, 0.0), PairLoss(w, one.bag(1), 2, 1),
              1e-15);
}

TEST(MmlObjectiveTest, ValueAtZeroIsBounded) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Dataset ds = RandomLabeled(6, 2 + seed % 4, 3, seed, 0.8);
    const double bound =
        std::max(std::log(ds.num_classes()),
                 static_cast<double>(ds.max_bag_size()) /
                     (ds.num_classes() - 1));
    EXPECT_LE(MmlObjective(ParamMatrix::Zero(ds.num_classes(), 3), ds, 2.0),
              bound);
  }
}

TEST(MmlGradientTest, FiniteDifferencesAndShiftInvariance) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Dataset ds = RandomLabeled(4, 3, 3, seed);
    ParamMatrix w = RandomParams(3, 3, 1.0, seed + 7);
    for (double lambda : {0.0, 0.05}) {
      Gradient g = MmlGradient(w, ds, lambda);
      Gradient fd = FiniteDiffGradient(
          [&](const ParamMatrix& v) { return MmlObjective(v, ds, lambda); },
          w);
      EXPECT_LE(GradientDiscrepancy(g, fd), 1e-5);
    }
    EXPECT_LE(MmlGradient(w, ds, 0.0).colwise().sum().norm(), 1e-8);
  }
}

TEST(MmlGradientTest, DecomposesIntoPairGradients) {
  Dataset ds = RandomLabeled(5, 4, 2, 3);
  ParamMatrix w = RandomParams(4, 2, 1.0, 4);
  Gradient sum = Gradient::Zero(4, 2);
  IndexSets sets = DeriveIndexSets(ds);
  for (const PairIndex& p : sets.available) {
    sum += PairGradient(w, ds.bag(p.bag), p.cls,
                        TriLabelToInt(ds.label(p.bag, p.cls)), 0.0);
  }
  sum /= static_cast<double>(sets.available.size());
  EXPECT_LE((MmlGradient(w, ds, 0.3) - (sum + 0.3 * w)).norm(), 1e-10);
}

TEST(MmlProblemTest, AgreesWithFreeFunctions) {
  Dataset ds = RandomLabeled(6, 3, 2, 8);
  ParamMatrix w = RandomParams(3, 2, 1.0, 9);
  MmlProblem problem(ds);
  Gradient g;
  EXPECT_NEAR(problem.ValueAndGradient(w, 0.1, &g), MmlObjective(w, ds, 0.1),
              1e-14);
  EXPECT_NEAR(problem.Value(w, 0.1), MmlObjective(w, ds, 0.1), 1e-14);
  EXPECT_EQ(problem.num_labels(), ds.num_available());
}

TEST(PairGradientTest, SaturatedPairHasZeroGradient) {
  // Class 0 dominates every instance, so P(Y=1) sits at the 1 - eps cap.
  ParamMatrix w(2, 1);
  w << 60, -60;
  Bag bag{"s", Eigen::MatrixXd::Ones(3, 1)};
  EXPECT_LE(PairGradient(w, bag, 0, 1, 0.0).norm(), 1e-10);
}

TEST(PairGradientTest, MatchesSingleLabelMml) {
  Dataset ds = RandomLabeled(3, 3, 2, 5, 0.0);
  ds.Reveal(2, 1, 0);
  ParamMatrix w = RandomParams(3, 2, 1.0, 6);
  // With one label, sum_b |S_b| = 1.
  EXPECT_LE((PairGradient(w, ds.bag(2), 1, 0, 0.0) - MmlGradient(w, ds, 0.0))
                .norm(),
            1e-12);
  Gradient fd = FiniteDiffGradient(
      [&](const ParamMatrix& v) { return PairLoss(v, ds.bag(2), 1, 0); }, w);
  EXPECT_LE(GradientDiscrepancy(PairGradient(w, ds.bag(2), 1, 0, 0.0), fd),
            1e-5);
  EXPECT_THROW(PairGradient(w, ds.bag(2), 3, 0, 0.0), ValidationError);
}

TEST(BagGradientTest, SumsPairGradients) {
  ParamMatrix w = RandomParams(4, 3, 1.0, 10);
  Bag bag = RandomBag(4, 3, 11);
  BagLabels one = {{2, 1}};
  EXPECT_LE((BagGradient(w, bag, one, 0.2) - PairGradient(w, bag, 2, 1, 0.2))
                .norm(),
            1e-14);
  BagLabels labels = {{0, 0}, {1, 1}, {3, 0}};
  auto f = [&](const ParamMatrix& v) {
    double s = 0.0;
    for (const auto& [c, l] : labels) s += PairLoss(v, bag, c, l);
    return s;
  };
  Gradient g = BagGradient(w, bag, labels, 0.0);
  EXPECT_LE(GradientDiscrepancy(g, FiniteDiffGradient(f, w)), 1e-5);
  EXPECT_LE(g.colwise().sum().norm(), 1e-8);
  EXPECT_THROW(BagGradient(w, bag, {}, 0.0), ValidationError);
}

TEST(LogProbGradientTest, SignAndOpposition) {
  ParamMatrix w = RandomParams(3, 2, 1.0, 12);
  Bag bag = RandomBag(3, 2, 13);
  for (int y = 0; y < 2; ++y) {
    EXPECT_EQ(LogProbGradientForLabel(w, bag, 1, y),
              -PairGradient(w, bag, 1, y, 0.0));
  }
  ParamMatrix zero = ParamMatrix::Zero(2, 2);
  Gradient g0 = LogProbGradientForLabel(zero, bag, 0, 0);
  Gradient g1 = LogProbGradientForLabel(zero, bag, 0, 1);
  EXPECT_LE((g0.array() * g1.array()).sum(), 0.0);
}

}  // namespace
}  // namespace mimlal

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


#include "mimlal/trainer.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mimlal/objective.h"
#include "mimlal/verify.h"

namespace mimlal {
namespace {

using L = TriLabel;

Dataset Synthetic(int bags, uint64_t seed, int classes = 4, int dim = 8) {
  SyntheticSpec spec;
  spec.num_bags = bags;
  spec.num_classes = classes;
  spec.feature_dim = dim;
  return GenerateSynthetic(spec, RandomTrueParams(classes, dim, 2.0, seed),
                           seed + 1)
      .dataset;
}

TEST(ModeTest, NamesRoundTrip) {
  for (UpdateMode m :
       {UpdateMode::kFullGd, UpdateMode::kPairSgd, UpdateMode::kBagSgd}) {
    EXPECT_EQ(ParseUpdateMode(UpdateModeName(m)), m);
  }
  EXPECT_THROW(ParseUpdateMode("adam"), ValidationError);
}

TEST(TauTest, HandValues) {
  EXPECT_NEAR(ComputeTau(2.0, 2, 4), 2.0, 1e-15);
  EXPECT_NEAR(ComputeTau(2.0, 3, 1), std::sqrt(std::log(3.0)), 1e-15);
  EXPECT_NEAR(ComputeTau(2.0, 3, 1), 1.04815, 1e-5);
  EXPECT_NEAR(ComputeTau(8.0, 2, 4), 1.0, 1e-15);
  EXPECT_THROW(ComputeTau(0.0, 2, 4), ValidationError);
}

TEST(ProjectTest, ScalesOnlyOutside) {
  ParamMatrix w = RandomParams(3, 2, 1.0, 1);
  const double tau = w.norm();
  ParamMatrix half = w / 2.0;
  EXPECT_EQ(Project(half, tau), half);
  ParamMatrix twice = Project(2.0 * w, tau);
  EXPECT_NEAR(twice.norm(), tau, 1e-12);
  EXPECT_LE((twice - w).norm(), 1e-12);
  EXPECT_TRUE(Project(ParamMatrix::Zero(3, 2), tau).isZero());
}

TEST(ScheduleTest, StepSizes) {
  TrainConfig cfg;
  cfg.c_prime = 1.0;
  cfg.c_dprime = 0.0;
  cfg.lambda = 0.1;
  EXPECT_NEAR(StepSize(cfg, 1), 10.0, 1e-12);
  for (long k = 1; k < 50; ++k) EXPECT_LT(StepSize(cfg, k + 1), StepSize(cfg, k));
  cfg.lambda = 0.0;
  EXPECT_THROW(cfg.Validate(), ValidationError);
  EXPECT_THROW(StepSize(cfg, 1), ValidationError);
}

TEST(SgdStepTest, ZeroGradientKeepsInteriorPoint) {
  TrainConfig cfg;
  cfg.lambda = 0.5;
  SgdState state{RandomParams(2, 2, 0.1, 2), 1,
                 ComputeTau(0.5, 2, 3)};
  const ParamMatrix before = state.w;
  state = SgdStep(state, Gradient::Zero(2, 2), cfg);
  EXPECT_EQ(state.w, before);
  EXPECT_EQ(state.k, 2);
}

TEST(SgdStepTest, HugeGradientLandsOnSphere) {
  TrainConfig cfg;
  cfg.lambda = 1.0;
  SgdState state{ParamMatrix::Zero(3, 2), 1, ComputeTau(1.0, 3, 2)};
  state = SgdStep(state, Gradient::Constant(3, 2, 1e6), cfg);
  EXPECT_NEAR(state.w.norm(), state.tau, 1e-12);
}

TEST(FullGdTest, NoLabelsConvergesToZero) {
  Dataset ds = Synthetic(5, 3);
  Dataset empty(ds.bags(), std::vector<LabelVector>(5, LabelVector(4, L::kUnknown)),
                4, 8);
  TrainConfig cfg;
  cfg.lambda = 0.5;
  GdResult r = FullGd(empty, cfg, RandomParams(4, 8, 1.0, 4));
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.w.norm(), 1e-5);
}

TEST(FullGdTest, ObjectiveNeverIncreases) {
  Dataset ds = Synthetic(30, 5);
  TrainConfig cfg;
  cfg.max_epochs = 300;
  GdResult r = FullGd(ds, cfg, ParamMatrix::Zero(4, 8));
  ASSERT_GT(r.trace.size(), 2u);
  for (size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i].objective, r.trace[i - 1].objective);
    EXPECT_EQ(r.trace[i].epoch, static_cast<int>(i));
  }
  EXPECT_LT(r.trace.back().objective, r.trace.front().objective);
  EXPECT_NEAR(r.trace.back().objective, MmlObjective(r.w, ds, cfg.lambda),
              1e-12);
}

TEST(FullGdTest, ConvergedGradientIsBelowTolerance) {
  Dataset ds = Synthetic(10, 6, 3, 3);
  TrainConfig cfg;
  cfg.lambda = 0.1;
  GdResult r = FullGd(ds, cfg, ParamMatrix::Zero(3, 3));
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.trace.back().grad_norm, cfg.grad_tol);
  EXPECT_LE(MmlGradient(r.w, ds, cfg.lambda).norm(), cfg.grad_tol);
}

TEST(OnlineUpdateTest, SingleLabelBagModesAgree) {
  Dataset ds = Synthetic(4, 7);
  Dataset one(ds.bags(), std::vector<LabelVector>(4, LabelVector(4, L::kUnknown)),
              4, 8);
  one.Reveal(2, 1, 1);
  TrainConfig pair;
  pair.mode = UpdateMode::kPairSgd;
  TrainConfig bag = pair;
  bag.mode = UpdateMode::kBagSgd;
  SgdState start = MakeSgdState(RandomParams(4, 8, 0.2, 8), pair, 4,
                                one.max_bag_size());
  SgdState a = OnlineUpdate(start, one, 2, 1, pair);
  SgdState b = OnlineUpdate(start, one, 2, 1, bag);
  EXPECT_LE((a.w - b.w).norm(), 1e-15);
  EXPECT_EQ(a.k, start.k + 1);
  EXPECT_EQ(b.k, start.k + 1);
  EXPECT_THROW(OnlineUpdate(start, one, 2, 0, pair), ValidationError);
  TrainConfig gd;
  EXPECT_THROW(OnlineUpdate(start, one, 2, 1, gd), ValidationError);
}

TEST(OnlineUpdateTest, SaturatedLabelsBarelyMoveTheBagStep) {
  // Instance 0 is certainly class 0 and never class 1; those two labels
  // are saturated-correct, so only the class-2 label drives the bag step.
  Bag bag{"s", (Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished()};
  ParamMatrix w(4, 2);
  w << 40, 0, -40, -40, 0, 0.5, 0, 0;
  Dataset ds({bag}, {{L::kPositive, L::kNegative, L::kPositive, L::kUnknown}},
             4, 2);
  TrainConfig pair;
  pair.mode = UpdateMode::kPairSgd;
  TrainConfig whole = pair;
  whole.mode = UpdateMode::kBagSgd;
  SgdState start{w, 1, ComputeTau(pair.lambda, 4, 2)};
  SgdState a = OnlineUpdate(start, ds, 0, 2, pair);
  SgdState b = OnlineUpdate(start, ds, 0, 2, whole);
  EXPECT_LE((a.w - b.w).norm(), 1e-9);
}

TEST(SgdTrainTest, StaysInsideSphereAndTraces) {
  Dataset ds = Synthetic(20, 9);
  for (UpdateMode mode : {UpdateMode::kPairSgd, UpdateMode::kBagSgd}) {
    TrainConfig cfg;
    cfg.mode = mode;
    cfg.lambda = 0.1;
    cfg.c_prime = 20.0;
    SgdTrainResult r = SgdTrain(ds, cfg, ParamMatrix::Zero(4, 8), 5, 3);
    EXPECT_EQ(r.trace.size(), 6u);
    EXPECT_LE(r.state.w.norm(), r.state.tau + 1e-12);
    SgdTrainResult again = SgdTrain(ds, cfg, ParamMatrix::Zero(4, 8), 5, 3);
    EXPECT_EQ(r.state.w, again.state.w);
  }
}

TEST(SgdStateTest, ZeroLambdaDisablesProjection) {
  TrainConfig cfg;
  cfg.lambda = 0.0;
  SgdState s = MakeSgdState(RandomParams(2, 2, 100.0, 1), cfg, 2, 3);
  EXPECT_TRUE(std::isinf(s.tau));
}

}  // namespace
}  // namespace mimlal

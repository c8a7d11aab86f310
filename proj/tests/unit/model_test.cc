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


#include "mimlal/model.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mimlal/verify.h"

namespace mimlal {
namespace {

Bag ZeroBag(int n, int d) { return {"z", Eigen::MatrixXd::Random(n, d)}; }

TEST(InstancePosteriorTest, ZeroWeightsAreUniform) {
  Eigen::VectorXd p =
      InstancePosterior(ParamMatrix::Zero(5, 3), Eigen::VectorXd::Ones(3));
  for (int c = 0; c < 5; ++c) EXPECT_DOUBLE_EQ(p(c), 0.2);
}

TEST(InstancePosteriorTest, TwoClassValues) {
  ParamMatrix equal(2, 1);
  equal << 1, 1;
  Eigen::VectorXd x(1);
  x << -3.7;
  EXPECT_DOUBLE_EQ(InstancePosterior(equal, x)(0), 0.5);

  ParamMatrix w(2, 1);
  w << 1, -1;
  x << 1;
  Eigen::VectorXd p = InstancePosterior(w, x);
  EXPECT_NEAR(p(0), 0.88079708, 1e-8);
  EXPECT_NEAR(p(1), 0.11920292, 1e-8);
}

TEST(InstancePosteriorTest, ExtremeScoresStayFinite) {
  ParamMatrix w(3, 1);
  w << 800, -800, 0;
  Eigen::VectorXd x(1);
  x << 1;
  Eigen::VectorXd p = InstancePosterior(w, x);
  EXPECT_DOUBLE_EQ(p(0), 1.0);
  EXPECT_LT(p(1), 1e-300);
  EXPECT_TRUE(std::isfinite(LogProbNotClass(w, x, 0)));
  EXPECT_NEAR(LogProbNotClass(w, x, 0), -800.0, 1e-9);
  EXPECT_THROW(InstancePosterior(w, Eigen::VectorXd::Ones(2)),
               ValidationError);
}

TEST(LogProbNotClassTest, ClosedForms) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
  EXPECT_NEAR(LogProbNotClass(ParamMatrix::Zero(4, 2), x, 1),
              std::log(3.0 / 4.0), 1e-15);
  ParamMatrix sym(2, 2);
  sym << 0.3, -0.2, 0.3, -0.2;
  EXPECT_NEAR(LogProbNotClass(sym, x, 0), std::log(0.5), 1e-15);
  EXPECT_THROW(LogProbNotClass(sym, x, 2), ValidationError);
}

TEST(LogProbNotClassTest, MatchesLinearSpace) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    ParamMatrix w(4, 3);
    for (int i = 0; i < w.size(); ++i) w(i) = u(rng);
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x(i) = u(rng);
    // Independent evaluation in long double.
    long double z = 0, e[4];
    for (int c = 0; c < 4; ++c) {
      long double s = 0;
      for (int j = 0; j < 3; ++j) s += static_cast<long double>(w(c, j)) * x(j);
      e[c] = std::exp(s);
      z += e[c];
    }
    for (int t = 0; t < 4; ++t) {
      EXPECT_NEAR(LogProbNotClass(w, x, t),
                  static_cast<double>(std::log(1.0L - e[t] / z)), 1e-12);
    }
  }
}

TEST(BagClassLogProbTest, UniformBag) {
  Bag bag = ZeroBag(3, 2);
  ParamMatrix w = ParamMatrix::Zero(4, 2);
  EXPECT_NEAR(BagClassLogProb(w, bag, 2), 3.0 * std::log(0.75), 1e-14);
  EXPECT_NEAR(1.0 - BagClassProbPositive(w, bag, 2), 27.0 / 64.0, 1e-15);
}

TEST(BagClassLogProbTest, SingleInstanceIsThePosterior) {
  ParamMatrix w = RandomParams(3, 4, 1.0, 5);
  Bag bag = RandomBag(1, 4, 6);
  Eigen::VectorXd p = InstancePosterior(w, bag.instances.row(0).transpose());
  for (int t = 0; t < 3; ++t) {
    EXPECT_NEAR(BagClassProbPositive(w, bag, t), p(t), 1e-15);
  }
}

TEST(BagClassLogProbTest, MatchesEnumeration) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    ParamMatrix w = RandomParams(3, 2, 2.0, seed);
    Bag bag = RandomBag(4, 2, seed + 100);
    for (int t = 0; t < 3; ++t) {
      EXPECT_NEAR(BagClassProbPositive(w, bag, t),
                  BruteforceMarginal(w, bag, t, 1), 1e-10);
    }
  }
}

TEST(ClampTest, FloorAndIdentity) {
  EXPECT_NEAR(OneMinusExp(ClampBagLogProb(-1e6)), 1.0 - kProbabilityFloor,
              1e-16);
  EXPECT_NEAR(OneMinusExp(ClampBagLogProb(0.0)), kProbabilityFloor, 1e-20);
  EXPECT_DOUBLE_EQ(OneMinusExp(std::log(0.5)), 0.5);
  for (double a : {-30.0, -2.0, -0.3, -1e-5}) {
    EXPECT_NEAR(OneMinusExp(a) + std::exp(a), 1.0, 1e-14);
  }
}

TEST(BagEvaluationTest, AgreesWithPointwiseFunctions) {
  ParamMatrix w = RandomParams(4, 3, 2.0, 8);
  Bag bag = RandomBag(5, 3, 9);
  BagEvaluation eval(w, bag);
  for (int t = 0; t < 4; ++t) {
    EXPECT_NEAR(eval.log_prob_negative(t), BagClassLogProb(w, bag, t), 1e-14);
    EXPECT_NEAR(eval.prob_positive(t), BagClassProbPositive(w, bag, t),
                1e-14);
  }
  EXPECT_NEAR(eval.posterior().row(2).sum(), 1.0, 1e-14);
}

TEST(PredictBagTest, ThresholdBehaviour) {
  Bag bag = ZeroBag(3, 2);
  ParamMatrix w = ParamMatrix::Zero(4, 2);
  BagPrediction p = PredictBag(w, bag, 0.5);
  for (int c = 0; c < 4; ++c) {
    EXPECT_NEAR(p.scores(c), 37.0 / 64.0, 1e-15);
    EXPECT_EQ(p.labels[c], 1);
  }
  BagPrediction none = PredictBag(w, bag, 1.0 - kProbabilityFloor);
  for (int c = 0; c < 4; ++c) EXPECT_EQ(none.labels[c], 0);

  // Huge bag under uniform weights saturates at 1 - eps for every class.
  BagPrediction all = PredictBag(w, ZeroBag(200, 2), 0.5);
  for (int c = 0; c < 4; ++c) {
    EXPECT_DOUBLE_EQ(all.scores(c), 1.0 - kProbabilityFloor);
    EXPECT_EQ(all.labels[c], 1);
  }
}

TEST(ParamsIoTest, RoundTrip) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "mimlal_params_test.csv")
          .string();
  ParamMatrix w = RandomParams(3, 4, 5.0, 1);
  WriteParams(w, path);
  EXPECT_EQ(LoadParams(path), w);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace mimlal

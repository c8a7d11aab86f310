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

#ifndef MIMLAL_TRAINER_H_
#define MIMLAL_TRAINER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mimlal/common.h"
#include "mimlal/dataset.h"

namespace mimlal {

enum class UpdateMode { kFullGd, kPairSgd, kBagSgd };

UpdateMode ParseUpdateMode(std::string_view name);
std::string_view UpdateModeName(UpdateMode mode);

struct TrainConfig {
  double lambda = 1e-3;
  // Step schedule eta_k = c_prime / (lambda * k + c_dprime).
  double c_prime = 1.0;
  double c_dprime = 1.0;
  int max_epochs = 2000;
  double grad_tol = 1e-6;
  double initial_step = 1.0;
  double backtrack_shrink = 0.5;
  double backtrack_slope = 1e-4;
  UpdateMode mode = UpdateMode::kFullGd;
  int steps_per_query = 1;
  // Adds lambda * w to SGD gradients.
  bool regularized_sgd = true;
  // Restart the step counter k at 1 for every query.
  bool reset_step_counter = false;

  void Validate() const;
};

// sqrt((2 / lambda) * max(log C, max_bag_size / (C - 1))).
double ComputeTau(double lambda, int num_classes, int max_bag_size);

// Radial projection onto the ball of radius tau.
ParamMatrix Project(const ParamMatrix& w, double tau);

struct TraceRow {
  int epoch = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
};

struct GdResult {
  ParamMatrix w;
  std::vector<TraceRow> trace;  // row 0 is the starting point
  bool converged = false;
};

// Gradient descent on MmlObjective with Armijo backtracking.
GdResult FullGd(const Dataset& ds, const TrainConfig& cfg,
                const ParamMatrix& w_init);

struct SgdState {
  ParamMatrix w;
  long k = 1;
  // Projection radius; +inf when lambda == 0.
  double tau = 0.0;
};

SgdState MakeSgdState(const ParamMatrix& w, const TrainConfig& cfg,
                      int num_classes, int max_bag_size);

double StepSize(const TrainConfig& cfg, long k);

// w <- P(w - eta_k g), k <- k + 1.
SgdState SgdStep(SgdState state, const Gradient& g, const TrainConfig& cfg);

// One (or cfg.steps_per_query) SGD step(s) after (b, c) was revealed in ds:
// the pair gradient for pair-sgd, the whole-bag gradient for bag-sgd.
SgdState OnlineUpdate(SgdState state, const Dataset& ds, int b, int c,
                      const TrainConfig& cfg);

// Bag-sgd step after a whole-bag query.
SgdState OnlineBagUpdate(SgdState state, const Dataset& ds, int b,
                         const TrainConfig& cfg);

struct SgdTrainResult {
  SgdState state;
  std::vector<TraceRow> trace;  // one row per epoch, row 0 = start
};

// Epoch-based SGD over all known labels of ds: each epoch visits every
// known pair (pair-sgd) or every bag with known labels (bag-sgd) in a
// seeded random order.
SgdTrainResult SgdTrain(const Dataset& ds, const TrainConfig& cfg,
                        const ParamMatrix& w_init, int epochs, uint64_t seed);

void WriteTrace(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace mimlal

#endif  // MIMLAL_TRAINER_H_

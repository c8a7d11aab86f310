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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>

#include "mimlal/objective.h"

namespace mimlal {

UpdateMode ParseUpdateMode(std::string_view name) {
  if (name == "full-gd") return UpdateMode::kFullGd;
  if (name == "pair-sgd") return UpdateMode::kPairSgd;
  if (name == "bag-sgd") return UpdateMode::kBagSgd;
  throw ValidationError("unknown update mode '" + std::string(name) +
                        "' (expected full-gd, pair-sgd or bag-sgd)");
}

std::string_view UpdateModeName(UpdateMode mode) {
  switch (mode) {
    case UpdateMode::kFullGd:
      return "full-gd";
    case UpdateMode::kPairSgd:
      return "pair-sgd";
    case UpdateMode::kBagSgd:
      return "bag-sgd";
  }
  return "?";
}

void TrainConfig::Validate() const {
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  if (!(c_prime > 0.0)) throw ValidationError("c_prime must be > 0");
  if (!(c_dprime >= 0.0)) throw ValidationError("c_dprime must be >= 0");
  if (lambda == 0.0 && c_dprime == 0.0) {
    throw ValidationError("lambda and c_dprime cannot both be 0");
  }
  if (max_epochs < 0) throw ValidationError("max_epochs must be >= 0");
  if (!(grad_tol > 0.0)) throw ValidationError("grad_tol must be > 0");
  if (!(initial_step > 0.0)) throw ValidationError("initial_step must be > 0");
  if (!(backtrack_shrink > 0.0 && backtrack_shrink < 1.0)) {
    throw ValidationError("backtrack_shrink must lie in (0, 1)");
  }
  if (!(backtrack_slope > 0.0 && backtrack_slope < 1.0)) {
    throw ValidationError("backtrack_slope must lie in (0, 1)");
  }
  if (steps_per_query < 1) throw ValidationError("steps_per_query must be >= 1");
}

double ComputeTau(double lambda, int num_classes, int max_bag_size) {
  if (!(lambda > 0.0)) {
    throw ValidationError("tau is undefined for lambda <= 0");
  }
  if (num_classes < 2 || max_bag_size < 1) {
    throw ValidationError("tau needs C >= 2 and a non-empty bag");
  }
  const double bound =
      std::max(std::log(static_cast<double>(num_classes)),
               static_cast<double>(max_bag_size) / (num_classes - 1));
  return std::sqrt(2.0 / lambda * bound);
}

ParamMatrix Project(const ParamMatrix& w, double tau) {
  const double norm = w.norm();
  if (norm <= tau) return w;
  return w * (tau / norm);
}

GdResult FullGd(const Dataset& ds, const TrainConfig& cfg,
                const ParamMatrix& w_init) {
  cfg.Validate();
  GdResult result;
  result.w = w_init;
  const MmlProblem problem(ds);
  Gradient g;
  double f = problem.ValueAndGradient(result.w, cfg.lambda, &g);
  if (!std::isfinite(f)) throw std::runtime_error("non-finite objective");
  double g_norm = g.norm();
  result.trace.push_back({0, f, g_norm});

  ParamMatrix candidate;
  Gradient g_new;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (g_norm <= cfg.grad_tol) break;
    const double g_sq = g_norm * g_norm;
    double eta = cfg.initial_step;
    double f_new = 0.0;
    bool accepted = false;
    while (eta > 1e-20) {
      candidate = result.w - eta * g;
      f_new = problem.ValueAndGradient(candidate, cfg.lambda, &g_new);
      if (std::isfinite(f_new) &&
          f_new <= f - cfg.backtrack_slope * eta * g_sq) {
        accepted = true;
        break;
      }
      eta *= cfg.backtrack_shrink;
    }
    // No step satisfies Armijo: we are at a numerical stationary point.
    if (!accepted) break;
    result.w.swap(candidate);
    g.swap(g_new);
    f = f_new;
    g_norm = g.norm();
    result.trace.push_back({epoch, f, g_norm});
  }
  result.converged = g_norm <= cfg.grad_tol;
  return result;
}

SgdState MakeSgdState(const ParamMatrix& w, const TrainConfig& cfg,
                      int num_classes, int max_bag_size) {
  SgdState state;
  state.k = 1;
  if (cfg.lambda > 0.0) {
    state.tau = ComputeTau(cfg.lambda, num_classes, max_bag_size);
    state.w = Project(w, state.tau);
  } else {
    std::cerr << "warning: lambda = 0, SGD projection disabled\n";
    state.tau = std::numeric_limits<double>::infinity();
    state.w = w;
  }
  return state;
}

double StepSize(const TrainConfig& cfg, long k) {
  const double denom = cfg.lambda * static_cast<double>(k) + cfg.c_dprime;
  if (!(denom > 0.0)) {
    throw ValidationError("step schedule undefined: lambda = c_dprime = 0");
  }
  return cfg.c_prime / denom;
}

SgdState SgdStep(SgdState state, const Gradient& g, const TrainConfig& cfg) {
  if (state.k < 1) throw ValidationError("step counter must be >= 1");
  const double eta = StepSize(cfg, state.k);
  state.w = Project(state.w - eta * g, state.tau);
  ++state.k;
  return state;
}

SgdState OnlineUpdate(SgdState state, const Dataset& ds, int b, int c,
                      const TrainConfig& cfg) {
  if (cfg.mode == UpdateMode::kFullGd) {
    throw ValidationError("online updates need pair-sgd or bag-sgd");
  }
  if (ds.label(b, c) == TriLabel::kUnknown) {
    throw ValidationError("queried pair has not been revealed");
  }
  const double lambda = cfg.regularized_sgd ? cfg.lambda : 0.0;
  const Bag& bag = ds.bag(b);
  for (int s = 0; s < cfg.steps_per_query; ++s) {
    Gradient g =
        cfg.mode == UpdateMode::kPairSgd
            ? PairGradient(state.w, bag, c, TriLabelToInt(ds.label(b, c)),
                           lambda)
            : BagGradient(state.w, bag, AvailableLabels(ds, b), lambda);
    state = SgdStep(std::move(state), g, cfg);
  }
  return state;
}

SgdState OnlineBagUpdate(SgdState state, const Dataset& ds, int b,
                         const TrainConfig& cfg) {
  if (cfg.mode == UpdateMode::kFullGd) {
    throw ValidationError("online updates need pair-sgd or bag-sgd");
  }
  const double lambda = cfg.regularized_sgd ? cfg.lambda : 0.0;
  BagLabels labels = AvailableLabels(ds, b);
  for (int s = 0; s < cfg.steps_per_query; ++s) {
    state = SgdStep(std::move(state),
                    BagGradient(state.w, ds.bag(b), labels, lambda), cfg);
  }
  return state;
}

SgdTrainResult SgdTrain(const Dataset& ds, const TrainConfig& cfg,
                        const ParamMatrix& w_init, int epochs,
                        uint64_t seed) {
  cfg.Validate();
  if (cfg.mode == UpdateMode::kFullGd) {
    throw ValidationError("SgdTrain needs pair-sgd or bag-sgd");
  }
  const double lambda = cfg.regularized_sgd ? cfg.lambda : 0.0;
  SgdTrainResult result;
  result.state =
      MakeSgdState(w_init, cfg, ds.num_classes(), ds.max_bag_size());

  std::vector<PairIndex> items;
  if (cfg.mode == UpdateMode::kPairSgd) {
    items = DeriveIndexSets(ds).available;
  } else {
    for (int b = 0; b < ds.num_bags(); ++b) {
      if (ds.num_available(b) > 0) items.push_back({b, -1});
    }
  }
  std::mt19937_64 rng(seed);
  auto record = [&](int epoch) {
    result.trace.push_back(
        {epoch, MmlObjective(result.state.w, ds, cfg.lambda),
         MmlGradient(result.state.w, ds, cfg.lambda).norm()});
  };
  record(0);
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::shuffle(items.begin(), items.end(), rng);
    for (const PairIndex& item : items) {
      const Bag& bag = ds.bag(item.bag);
      Gradient g =
          item.cls >= 0
              ? PairGradient(result.state.w, bag, item.cls,
                             TriLabelToInt(ds.label(item.bag, item.cls)),
                             lambda)
              : BagGradient(result.state.w, bag,
                            AvailableLabels(ds, item.bag), lambda);
      result.state = SgdStep(std::move(result.state), g, cfg);
    }
    record(epoch);
  }
  return result;
}

void WriteTrace(const std::vector<TraceRow>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "epoch,objective,grad_norm\n";
  for (const TraceRow& row : trace) {
    out << row.epoch << ',' << FormatDouble(row.objective) << ','
        << FormatDouble(row.grad_norm) << '\n';
  }
}

}  // namespace mimlal

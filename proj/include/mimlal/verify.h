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

#ifndef MIMLAL_VERIFY_H_
#define MIMLAL_VERIFY_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mimlal/common.h"
#include "mimlal/dataset.h"
#include "mimlal/objective.h"

namespace mimlal {

// Brute-force enumeration of joint instance labelings. These routines do
// not share code with the closed-form model: they compute their own
// softmax and apply the OR rule by indicator.

struct EnumerationBudget {
  long max_states = 100000;  // cap on C^{n_b}
};

// Sum over y_b in {1..C}^{n_b} of P(Y_bt = y | y_b) prod_i P(y_bi | x_bi).
double BruteforceMarginal(const ParamMatrix& w, const Bag& bag, int t, int y,
                          const EnumerationBudget& budget = {});

// log sum_{y_b} prod_{(c, v) in labels} P(Y_bc = v | y_b)
//                prod_j P(y_bj | x_bj); 0 for no labels.
double BruteforceJointLoglik(const ParamMatrix& w, const Bag& bag,
                             const BagLabels& labels,
                             const EnumerationBudget& budget = {});

// Central differences, one coordinate at a time.
Gradient FiniteDiffGradient(
    const std::function<double(const ParamMatrix&)>& f, const ParamMatrix& w,
    double step = 1e-5);

// max |a - b| / max(|b|, abs_floor / rel_tol): relative error with an
// absolute floor near zero.
double GradientDiscrepancy(const Gradient& analytic, const Gradient& numeric,
                           double rel_tol = 1e-5, double abs_tol = 1e-8);

struct PropertyReport {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  int cases = 0;
};

struct VerifyOptions {
  int enumeration_cases = 200;
  int gradient_cases = 100;
  uint64_t seed = 20260101;
  // Added to every analytic gradient entry; lets tests check that the
  // suite catches a broken gradient.
  double gradient_perturbation = 0.0;
};

// Enumeration equivalence, pair-loss consistency and finite-difference
// checks of all gradient routines on random small instances.
std::vector<PropertyReport> RunVerifySuite(const VerifyOptions& options);

// Random bag with n instances of dimension d, entries N(0, 1).
Bag RandomBag(int n, int d, uint64_t seed);
// C x d matrix with entries uniform in [-scale, scale].
ParamMatrix RandomParams(int num_classes, int d, double scale, uint64_t seed);

}  // namespace mimlal

#endif  // MIMLAL_VERIFY_H_

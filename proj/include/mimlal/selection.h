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

#ifndef MIMLAL_SELECTION_H_
#define MIMLAL_SELECTION_H_

#include <random>
#include <string>
#include <string_view>

#include "mimlal/common.h"
#include "mimlal/dataset.h"

namespace mimlal {

enum class Criterion { kEglPair, kUncPair, kRandPair, kBagThenLabel, kBagAll };

// Accepts egl-pair, unc-pair, rand-pair, bag-then-label, bag-all.
Criterion ParseCriterion(std::string_view name);
std::string_view CriterionName(Criterion criterion);
bool IsPairCriterion(Criterion criterion);

struct PairScore {
  int bag = 0;
  int cls = 0;
  double score = 0.0;
};

// Expected gradient length of adding (b, c):
// [P1 ||grad log P1|| + P0 ||grad log P0||] / (num_labeled + 1).
double EglPairScore(const ParamMatrix& w, const Bag& bag, int c,
                    long num_labeled);

// 2 p (1 - p) with p = P(Y_bc = 1).
double UncertaintyPairScore(const ParamMatrix& w, const Bag& bag, int c);

struct SelectionResult {
  enum class Kind { kPair, kBag };
  Kind kind = Kind::kPair;
  int bag = -1;
  int cls = -1;  // -1 for whole-bag selections
  double score = 0.0;
  double cost_units = 1.0;
};

// Argmax of the criterion over U, ties to the lexicographically smallest
// (bag, class). kRandPair draws uniformly from U with `rng`.
// egl_divisor = false drops the constant 1 / (|L| + 1) factor.
SelectionResult SelectPair(const Dataset& ds, const ParamMatrix& w,
                           Criterion criterion, std::mt19937_64& rng,
                           bool egl_divisor = true);

// Mean positive-label count over fully labeled bags; C / 2 when none.
double AverageCardinality(const Dataset& ds);

// Bag score |#predicted positives - avg_cardinality| * (unlabeled fraction);
// within the best bag, the unlabeled class with P(Y = 1) closest to 0.5.
SelectionResult SelectBagThenLabel(const Dataset& ds, const ParamMatrix& w,
                                   double avg_cardinality,
                                   double threshold = 0.5);

// Bag whose unlabeled classes have the highest mean uncertainty score.
// Costs C / cost_divisor units.
SelectionResult SelectBagAll(const Dataset& ds, const ParamMatrix& w,
                             double cost_divisor = 1.0);

}  // namespace mimlal

#endif  // MIMLAL_SELECTION_H_

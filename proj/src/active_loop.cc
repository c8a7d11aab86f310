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

#include "mimlal/active_loop.h"

#include <cmath>
#include <fstream>
#include <random>

#include "mimlal/model.h"

namespace mimlal {

void RunConfig::Validate() const {
  train.Validate();
  if (queries < 0) throw ValidationError("query budget must be >= 0");
  if (!(eval_every > 0.0)) throw ValidationError("eval_every must be > 0");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("threshold must lie in (0, 1)");
  }
  if (!(cost_divisor >= 1.0)) throw ValidationError("k must be >= 1");
  if (retrain_max_epochs < 0) {
    throw ValidationError("retrain_max_epochs must be >= 0");
  }
}

int SimulatedOracle(const OracleTruth& oracle, int b, int c) {
  return oracle.value(b, c);
}

RunResult RunActiveLearning(Dataset train, const OracleTruth& oracle,
                            const Dataset& test, const RunConfig& cfg) {
  cfg.Validate();
  CheckConsistent(train, oracle);
  if (test.num_classes() != train.num_classes() ||
      test.feature_dim() != train.feature_dim()) {
    throw ValidationError("train and test sets differ in C or d");
  }
  if (IsPairCriterion(cfg.criterion)) {
    if (cfg.queries > train.num_unavailable()) {
      throw ValidationError("query budget " + std::to_string(cfg.queries) +
                            " exceeds the unlabeled pool (" +
                            std::to_string(train.num_unavailable()) + ")");
    }
  } else {
    int open_bags = 0;
    for (int b = 0; b < train.num_bags(); ++b) {
      open_bags += !train.fully_labeled(b);
    }
    if (cfg.queries > open_bags) {
      throw ValidationError("query budget exceeds the bags with unlabeled "
                            "classes (" + std::to_string(open_bags) + ")");
    }
  }

  const int num_classes = train.num_classes();
  RunResult result;
  ParamMatrix w0 = ParamMatrix::Zero(num_classes, train.feature_dim());
  ParamMatrix w = FullGd(train, cfg.train, w0).w;
  ++result.full_retrains;

  const bool online = cfg.train.mode != UpdateMode::kFullGd;
  SgdState state;
  if (online) {
    state = MakeSgdState(w, cfg.train, num_classes, train.max_bag_size());
    w = state.w;
  }
  TrainConfig retrain = cfg.train;
  retrain.max_epochs = cfg.retrain_max_epochs;

  std::mt19937_64 rng(cfg.seed);
  double cost = 0.0;
  MetricsRow first = Evaluate(w, test, cfg.threshold);
  first.cost = cost;
  result.curve.push_back(first);

  for (int q = 1; q <= cfg.queries; ++q) {
    SelectionResult sel;
    switch (cfg.criterion) {
      case Criterion::kEglPair:
      case Criterion::kUncPair:
      case Criterion::kRandPair:
        sel = SelectPair(train, w, cfg.criterion, rng);
        break;
      case Criterion::kBagThenLabel:
        sel = SelectBagThenLabel(train, w, AverageCardinality(train),
                                 cfg.threshold);
        break;
      case Criterion::kBagAll:
        sel = SelectBagAll(train, w, cfg.cost_divisor);
        break;
    }

    QueryRecord record;
    record.q = q;
    record.selection = sel;
    if (sel.kind == SelectionResult::Kind::kPair) {
      const int value = SimulatedOracle(oracle, sel.bag, sel.cls);
      train.Reveal(sel.bag, sel.cls, value);
      record.revealed.push_back({{sel.bag, sel.cls}, value});
    } else {
      for (int c = 0; c < num_classes; ++c) {
        if (train.label(sel.bag, c) != TriLabel::kUnknown) continue;
        const int value = SimulatedOracle(oracle, sel.bag, c);
        train.Reveal(sel.bag, c, value);
        record.revealed.push_back({{sel.bag, c}, value});
      }
    }

    if (!online) {
      w = FullGd(train, retrain, w).w;
      ++result.full_retrains;
    } else {
      if (cfg.train.reset_step_counter) state.k = 1;
      const long before = state.k;
      state = sel.kind == SelectionResult::Kind::kPair
                  ? OnlineUpdate(std::move(state), train, sel.bag, sel.cls,
                                 cfg.train)
                  : OnlineBagUpdate(std::move(state), train, sel.bag,
                                    cfg.train);
      result.sgd_steps += state.k - before;
      w = state.w;
    }

    const double previous = cost;
    cost += sel.cost_units;
    record.cumulative_cost = cost;
    result.queries.push_back(std::move(record));

    const bool crossed = std::floor(cost / cfg.eval_every + 1e-9) >
                         std::floor(previous / cfg.eval_every + 1e-9);
    if (crossed || q == cfg.queries) {
      MetricsRow row = Evaluate(w, test, cfg.threshold);
      row.cost = cost;
      result.curve.push_back(row);
    }
  }
  result.w = std::move(w);
  result.train = std::move(train);
  return result;
}

void WriteQueries(const std::vector<QueryRecord>& queries, const Dataset& ds,
                  const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "q,kind,bag,class,score,revealed,cost\n";
  for (const QueryRecord& rec : queries) {
    const SelectionResult& sel = rec.selection;
    const bool pair = sel.kind == SelectionResult::Kind::kPair;
    out << rec.q << ',' << (pair ? "pair" : "bag") << ','
        << ds.bag(sel.bag).id << ',';
    if (pair) out << sel.cls + 1;
    out << ',' << FormatDouble(sel.score) << ',';
    if (pair) {
      out << rec.revealed.front().second;
    } else {
      for (size_t i = 0; i < rec.revealed.size(); ++i) {
        if (i > 0) out << ';';
        out << rec.revealed[i].first.cls + 1 << ':' << rec.revealed[i].second;
      }
    }
    out << ',' << FormatDouble(rec.cumulative_cost) << '\n';
  }
}

}  // namespace mimlal

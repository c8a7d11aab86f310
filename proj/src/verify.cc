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

#include "mimlal/verify.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "mimlal/model.h"

namespace mimlal {
namespace {

// Row-wise softmax written out directly, independent of model.cc.
Eigen::MatrixXd NaivePosteriors(const ParamMatrix& w, const Bag& bag) {
  const int n = bag.size();
  const int num_classes = static_cast<int>(w.rows());
  Eigen::MatrixXd p(n, num_classes);
  for (int i = 0; i < n; ++i) {
    std::vector<double> s(num_classes);
    for (int c = 0; c < num_classes; ++c) {
      double dot = 0.0;
      for (int j = 0; j < w.cols(); ++j) dot += w(c, j) * bag.instances(i, j);
      s[c] = dot;
    }
    const double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (int c = 0; c < num_classes; ++c) z += std::exp(s[c] - m);
    for (int c = 0; c < num_classes; ++c) p(i, c) = std::exp(s[c] - m) / z;
  }
  return p;
}

void CheckBudget(int num_classes, int n, const EnumerationBudget& budget) {
  long states = 1;
  for (int i = 0; i < n; ++i) {
    states *= num_classes;
    if (states > budget.max_states) {
      throw ValidationError("enumeration of " + std::to_string(num_classes) +
                            "^" + std::to_string(n) +
                            " labelings exceeds the budget of " +
                            std::to_string(budget.max_states));
    }
  }
}

// Calls visit(labeling, probability) for every joint instance labeling.
template <typename Visit>
void EnumerateLabelings(const ParamMatrix& w, const Bag& bag,
                        const EnumerationBudget& budget, Visit visit) {
  const int num_classes = static_cast<int>(w.rows());
  const int n = bag.size();
  CheckBudget(num_classes, n, budget);
  Eigen::MatrixXd p = NaivePosteriors(w, bag);
  std::vector<int> y(n, 0);
  while (true) {
    double prob = 1.0;
    for (int i = 0; i < n; ++i) prob *= p(i, y[i]);
    visit(y, prob);
    int i = 0;
    while (i < n && ++y[i] == num_classes) y[i++] = 0;
    if (i == n) break;
  }
}

// OR rule: Y_t = 1 iff some instance carries label t.
int OrRule(const std::vector<int>& y, int t) {
  return std::find(y.begin(), y.end(), t) != y.end() ? 1 : 0;
}

}  // namespace

double BruteforceMarginal(const ParamMatrix& w, const Bag& bag, int t, int y,
                          const EnumerationBudget& budget) {
  if (t < 0 || t >= w.rows()) throw ValidationError("class out of range");
  if (y != 0 && y != 1) throw ValidationError("label must be 0 or 1");
  double total = 0.0;
  EnumerateLabelings(w, bag, budget,
                     [&](const std::vector<int>& labeling, double prob) {
                       if (OrRule(labeling, t) == y) total += prob;
                     });
  return total;
}

double BruteforceJointLoglik(const ParamMatrix& w, const Bag& bag,
                             const BagLabels& labels,
                             const EnumerationBudget& budget) {
  if (labels.empty()) return 0.0;
  double total = 0.0;
  EnumerateLabelings(w, bag, budget,
                     [&](const std::vector<int>& labeling, double prob) {
                       for (const auto& [c, v] : labels) {
                         if (OrRule(labeling, c) != v) return;
                       }
                       total += prob;
                     });
  return std::log(total);
}

Gradient FiniteDiffGradient(
    const std::function<double(const ParamMatrix&)>& f, const ParamMatrix& w,
    double step) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be > 0");
  Gradient g(w.rows(), w.cols());
  ParamMatrix probe = w;
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      const double saved = probe(r, c);
      probe(r, c) = saved + step;
      const double up = f(probe);
      probe(r, c) = saved - step;
      const double down = f(probe);
      probe(r, c) = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw std::runtime_error("non-finite function value in finite "
                                 "differences");
      }
      g(r, c) = (up - down) / (2.0 * step);
    }
  }
  return g;
}

double GradientDiscrepancy(const Gradient& analytic, const Gradient& numeric,
                           double rel_tol, double abs_tol) {
  const double floor = abs_tol / rel_tol;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < numeric.size(); ++i) {
    const double denom = std::max(std::abs(numeric(i)), floor);
    worst = std::max(worst, std::abs(analytic(i) - numeric(i)) / denom);
  }
  return worst;
}

Bag RandomBag(int n, int d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Bag bag;
  bag.id = "r" + std::to_string(seed % 100000);
  bag.instances.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) bag.instances(i, j) = normal(rng);
  }
  return bag;
}

ParamMatrix RandomParams(int num_classes, int d, double scale, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-scale, scale);
  ParamMatrix w(num_classes, d);
  for (int c = 0; c < num_classes; ++c) {
    for (int j = 0; j < d; ++j) w(c, j) = unit(rng);
  }
  return w;
}

namespace {

bool FloorActive(const ParamMatrix& w, const Bag& bag, int t) {
  double a = 0.0;
  for (int i = 0; i < bag.size(); ++i) {
    a += LogProbNotClass(w, bag.instances.row(i).transpose(), t);
  }
  return a != ClampBagLogProb(a);
}

struct Draw {
  ParamMatrix w;
  Bag bag;
};

Draw RandomDraw(std::mt19937_64& rng, int max_classes, int max_n, int max_d,
                double scale) {
  std::uniform_int_distribution<int> classes(2, max_classes);
  std::uniform_int_distribution<int> size(1, max_n);
  std::uniform_int_distribution<int> dim(1, max_d);
  const int num_classes = classes(rng);
  const int n = size(rng);
  const int d = dim(rng);
  Draw draw;
  draw.w = RandomParams(num_classes, d, scale, rng());
  draw.bag = RandomBag(n, d, rng());
  return draw;
}

}  // namespace

std::vector<PropertyReport> RunVerifySuite(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<PropertyReport> reports;

  // Closed form against enumeration.
  PropertyReport marginal{"closed-form P(Y_bt=y) vs enumeration", true, 0.0,
                          1e-10, 0};
  PropertyReport loss{"pair_loss vs -log enumerated marginal", true, 0.0,
                      1e-10, 0};
  PropertyReport normalization{"enumerated marginals sum to 1", true, 0.0,
                               1e-14, 0};
  for (int k = 0; k < options.enumeration_cases; ++k) {
    Draw draw = RandomDraw(rng, 4, 6, 8, 2.0);
    const int num_classes = static_cast<int>(draw.w.rows());
    for (int t = 0; t < num_classes; ++t) {
      const double e1 = BruteforceMarginal(draw.w, draw.bag, t, 1);
      const double e0 = BruteforceMarginal(draw.w, draw.bag, t, 0);
      const double p1 = BagClassProbPositive(draw.w, draw.bag, t);
      marginal.worst = std::max(
          {marginal.worst, std::abs(p1 - e1), std::abs((1.0 - p1) - e0)});
      normalization.worst =
          std::max(normalization.worst, std::abs(e0 + e1 - 1.0));
      if (!FloorActive(draw.w, draw.bag, t)) {
        for (int l = 0; l < 2; ++l) {
          const double enumerated = l == 1 ? e1 : e0;
          loss.worst =
              std::max(loss.worst, std::abs(PairLoss(draw.w, draw.bag, t, l) +
                                            std::log(enumerated)));
        }
        ++loss.cases;
      }
    }
    ++marginal.cases;
    ++normalization.cases;
  }
  reports.push_back(marginal);
  reports.push_back(loss);
  reports.push_back(normalization);

  // Gradients against central differences.
  const double rel = 1e-5, abs = 1e-8, step = 1e-5;
  PropertyReport mml{"mml_gradient vs finite differences", true, 0.0, rel, 0};
  PropertyReport pair{"pair_gradient vs finite differences", true, 0.0, rel,
                      0};
  PropertyReport bag{"bag_gradient vs finite differences", true, 0.0, rel, 0};
  PropertyReport logprob{"logprob_gradient_for_label vs finite differences",
                         true, 0.0, rel, 0};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto perturb = [&](Gradient g) {
    g.array() += options.gradient_perturbation;
    return g;
  };
  while (mml.cases < options.gradient_cases) {
    Draw draw = RandomDraw(rng, 5, 6, 8, 1.0);
    const int num_classes = static_cast<int>(draw.w.rows());
    bool floored = false;
    for (int t = 0; t < num_classes; ++t) {
      floored = floored || FloorActive(draw.w, draw.bag, t);
    }
    if (floored) continue;
    const double lambda = 0.1 * unit(rng);
    const int c = std::uniform_int_distribution<int>(0, num_classes - 1)(rng);
    const int label = unit(rng) < 0.5 ? 0 : 1;

    // Partially labeled bag: every class known with probability 0.6, and
    // class c always known.
    LabelVector labels(num_classes, TriLabel::kUnknown);
    BagLabels known;
    for (int t = 0; t < num_classes; ++t) {
      if (t == c || unit(rng) < 0.6) {
        const int v = t == c ? label : (unit(rng) < 0.5 ? 0 : 1);
        labels[t] = static_cast<TriLabel>(v);
        known.emplace_back(t, v);
      }
    }
    // A second bag so the dataset normalization is exercised.
    Bag other = RandomBag(1 + static_cast<int>(rng() % 4),
                          static_cast<int>(draw.w.cols()), rng());
    LabelVector other_labels(num_classes, TriLabel::kUnknown);
    other_labels[0] = TriLabel::kPositive;
    Dataset ds({draw.bag, other}, {labels, other_labels}, num_classes,
               static_cast<int>(draw.w.cols()));
    bool other_floored = false;
    for (int t = 0; t < num_classes; ++t) {
      other_floored = other_floored || FloorActive(draw.w, other, t);
    }
    if (other_floored) continue;

    auto check = [&](PropertyReport& report, const Gradient& analytic,
                     const std::function<double(const ParamMatrix&)>& f) {
      Gradient numeric = FiniteDiffGradient(f, draw.w, step);
      report.worst = std::max(
          report.worst, GradientDiscrepancy(perturb(analytic), numeric, rel,
                                            abs));
      ++report.cases;
    };
    check(mml, MmlGradient(draw.w, ds, lambda), [&](const ParamMatrix& w) {
      return MmlObjective(w, ds, lambda);
    });
    check(pair, PairGradient(draw.w, draw.bag, c, label, lambda),
          [&](const ParamMatrix& w) {
            return PairLoss(w, draw.bag, c, label) + 0.5 * lambda * w.squaredNorm();
          });
    check(bag, BagGradient(draw.w, draw.bag, known, lambda),
          [&](const ParamMatrix& w) {
            double total = 0.5 * lambda * w.squaredNorm();
            for (const auto& [t, v] : known) total += PairLoss(w, draw.bag, t, v);
            return total;
          });
    check(logprob, LogProbGradientForLabel(draw.w, draw.bag, c, label),
          [&](const ParamMatrix& w) {
            return -PairLoss(w, draw.bag, c, label);
          });
  }
  for (PropertyReport* r : {&mml, &pair, &bag, &logprob}) reports.push_back(*r);

  for (PropertyReport& r : reports) r.passed = r.worst <= r.tolerance;
  return reports;
}

}  // namespace mimlal

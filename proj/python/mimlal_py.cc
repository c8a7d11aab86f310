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

// Python bindings. Classes are 1-based here, matching the text formats;
// bag indices are 0-based positions.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include "mimlal/active_loop.h"
#include "mimlal/dataset.h"
#include "mimlal/experiment.h"
#include "mimlal/metrics.h"
#include "mimlal/model.h"
#include "mimlal/objective.h"
#include "mimlal/selection.h"
#include "mimlal/trainer.h"
#include "mimlal/verify.h"

namespace py = pybind11;

namespace mimlal {
namespace {

Bag MakeBag(const Eigen::MatrixXd& x) {
  Bag bag;
  bag.id = "bag";
  bag.instances = x;
  return bag;
}

int Zero(int cls) { return cls - 1; }

Eigen::MatrixXi LabelMatrix(const std::vector<LabelVector>& labels,
                            int num_classes) {
  Eigen::MatrixXi out(static_cast<Eigen::Index>(labels.size()), num_classes);
  for (size_t b = 0; b < labels.size(); ++b) {
    for (int c = 0; c < num_classes; ++c) out(b, c) = TriLabelToInt(labels[b][c]);
  }
  return out;
}

std::vector<LabelVector> LabelRows(const Eigen::MatrixXi& m) {
  std::vector<LabelVector> rows(m.rows());
  for (Eigen::Index b = 0; b < m.rows(); ++b) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rows[b].push_back(TriLabelFromInt(m(b, c)));
    }
  }
  return rows;
}

py::dict MetricsDict(const MetricsRow& m) {
  py::dict d;
  d["cost"] = m.cost;
  d["bag_accuracy"] = m.bag_accuracy;
  d["hamming_loss"] = m.hamming_loss;
  d["avg_precision"] = m.avg_precision;
  d["one_error"] = m.one_error;
  d["subset_accuracy"] = m.subset_accuracy;
  return d;
}

}  // namespace
}  // namespace mimlal

PYBIND11_MODULE(_core, m) {
  using namespace mimlal;
  m.doc() = "Active learning for MIML data with incomplete labels";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const std::vector<std::string>& ids,
                       const std::vector<Eigen::MatrixXd>& instances,
                       const Eigen::MatrixXi& labels) {
             if (ids.size() != instances.size()) {
               throw ValidationError("ids and instances differ in length");
             }
             std::vector<Bag> bags;
             for (size_t b = 0; b < ids.size(); ++b) {
               bags.push_back({ids[b], instances[b]});
             }
             const int d = instances.empty()
                               ? 0
                               : static_cast<int>(instances.front().cols());
             return Dataset(std::move(bags), LabelRows(labels),
                            static_cast<int>(labels.cols()), d);
           }),
           py::arg("ids"), py::arg("instances"), py::arg("labels"))
      .def_property_readonly("num_bags", &Dataset::num_bags)
      .def_property_readonly("num_classes", &Dataset::num_classes)
      .def_property_readonly("feature_dim", &Dataset::feature_dim)
      .def_property_readonly("num_available",
                             py::overload_cast<>(&Dataset::num_available,
                                                 py::const_))
      .def_property_readonly("num_unavailable", &Dataset::num_unavailable)
      .def_property_readonly("bag_ids",
                             [](const Dataset& ds) {
                               std::vector<std::string> ids;
                               for (const Bag& b : ds.bags()) ids.push_back(b.id);
                               return ids;
                             })
      .def("instances",
           [](const Dataset& ds, int b) { return ds.bag(b).instances; })
      .def("labels",
           [](const Dataset& ds) {
             return LabelMatrix(ds.all_labels(), ds.num_classes());
           })
      .def("label", [](const Dataset& ds, int b,
                       int c) { return TriLabelToInt(ds.label(b, Zero(c))); })
      .def("reveal",
           [](Dataset& ds, int b, int c, int value) {
             ds.Reveal(b, Zero(c), value);
           },
           py::arg("bag"), py::arg("cls"), py::arg("value"));

  m.def("load_dataset", &LoadDataset, py::arg("features_path"),
        py::arg("labels_path"));
  m.def("random_true_params", &RandomTrueParams, py::arg("num_classes"),
        py::arg("feature_dim"), py::arg("separation") = 2.0,
        py::arg("seed") = 0);
  m.def(
      "generate_synthetic",
      [](int bags, int classes, int dim, int bag_min, int bag_max,
         const ParamMatrix& w_true, uint64_t seed) {
        SyntheticSpec spec{bags, classes, dim, bag_min, bag_max, "bag"};
        SyntheticData data = GenerateSynthetic(spec, w_true, seed);
        std::vector<std::vector<int>> latent = data.instance_classes;
        for (auto& row : latent) {
          for (int& c : row) ++c;
        }
        return py::make_tuple(data.dataset,
                              LabelMatrix(data.truth.all_labels(), classes),
                              latent);
      },
      py::arg("bags"), py::arg("classes"), py::arg("dim"), py::arg("bag_min"),
      py::arg("bag_max"), py::arg("w_true"), py::arg("seed") = 0);
  m.def(
      "mask_labels",
      [](const Dataset& ds, const Eigen::MatrixXi& truth, double fraction,
         uint64_t seed) {
        MaskPolicy policy;
        policy.fraction = fraction;
        return MaskLabels(ds, OracleTruth(LabelRows(truth)), policy, seed);
      },
      py::arg("dataset"), py::arg("truth"), py::arg("fraction"),
      py::arg("seed") = 0);

  m.def("instance_posterior",
        [](const ParamMatrix& w, const Eigen::VectorXd& x) {
          return InstancePosterior(w, x);
        });
  m.def("log_prob_not_class",
        [](const ParamMatrix& w, const Eigen::VectorXd& x, int t) {
          return LogProbNotClass(w, x, Zero(t));
        });
  m.def("bag_class_logprob",
        [](const ParamMatrix& w, const Eigen::MatrixXd& x, int t) {
          return BagClassLogProb(w, MakeBag(x), Zero(t));
        });
  m.def("bag_class_prob_positive",
        [](const ParamMatrix& w, const Eigen::MatrixXd& x, int t) {
          return BagClassProbPositive(w, MakeBag(x), Zero(t));
        });
  m.def("pair_loss",
        [](const ParamMatrix& w, const Eigen::MatrixXd& x, int c, int l) {
          return PairLoss(w, MakeBag(x), Zero(c), l);
        });
  m.def("pair_gradient",
        [](const ParamMatrix& w, const Eigen::MatrixXd& x, int c, int l,
           double lambda) {
          return PairGradient(w, MakeBag(x), Zero(c), l, lambda);
        },
        py::arg("w"), py::arg("x"), py::arg("cls"), py::arg("label"),
        py::arg("lam") = 0.0);
  m.def("logprob_gradient_for_label",
        [](const ParamMatrix& w, const Eigen::MatrixXd& x, int c, int y) {
          return LogProbGradientForLabel(w, MakeBag(x), Zero(c), y);
        });
  m.def("mml_objective", &MmlObjective, py::arg("w"), py::arg("dataset"),
        py::arg("lam") = 0.0);
  m.def("mml_gradient", &MmlGradient, py::arg("w"), py::arg("dataset"),
        py::arg("lam") = 0.0);
  m.def("bruteforce_marginal",
        [](const ParamMatrix& w, const Eigen::MatrixXd& x, int t, int y) {
          return BruteforceMarginal(w, MakeBag(x), Zero(t), y);
        });

  m.def("compute_tau", &ComputeTau, py::arg("lam"), py::arg("num_classes"),
        py::arg("max_bag_size"));
  m.def("project", &Project, py::arg("w"), py::arg("tau"));
  m.def(
      "full_gd",
      [](const Dataset& ds, double lambda, int max_epochs, double grad_tol) {
        TrainConfig cfg;
        cfg.lambda = lambda;
        cfg.max_epochs = max_epochs;
        cfg.grad_tol = grad_tol;
        GdResult r = FullGd(
            ds, cfg, ParamMatrix::Zero(ds.num_classes(), ds.feature_dim()));
        std::vector<std::tuple<int, double, double>> trace;
        for (const TraceRow& row : r.trace) {
          trace.emplace_back(row.epoch, row.objective, row.grad_norm);
        }
        return py::make_tuple(r.w, trace, r.converged);
      },
      py::arg("dataset"), py::arg("lam") = 1e-3, py::arg("max_epochs") = 2000,
      py::arg("grad_tol") = 1e-6);

  m.def("egl_pair_score",
        [](const ParamMatrix& w, const Eigen::MatrixXd& x, int c,
           long num_labeled) {
          return EglPairScore(w, MakeBag(x), Zero(c), num_labeled);
        });
  m.def("uncertainty_pair_score",
        [](const ParamMatrix& w, const Eigen::MatrixXd& x, int c) {
          return UncertaintyPairScore(w, MakeBag(x), Zero(c));
        });
  m.def(
      "select_pair",
      [](const Dataset& ds, const ParamMatrix& w, const std::string& criterion,
         uint64_t seed) {
        std::mt19937_64 rng(seed);
        SelectionResult r = SelectPair(ds, w, ParseCriterion(criterion), rng);
        return py::make_tuple(r.bag, r.cls + 1, r.score);
      },
      py::arg("dataset"), py::arg("w"), py::arg("criterion"),
      py::arg("seed") = 0);

  m.def(
      "evaluate",
      [](const ParamMatrix& w, const Dataset& test, double threshold) {
        return MetricsDict(Evaluate(w, test, threshold));
      },
      py::arg("w"), py::arg("test"), py::arg("threshold") = 0.5);

  m.def(
      "run_experiment",
      [](const std::map<std::string, std::string>& settings,
         bool write_files) {
        ExperimentConfig cfg;
        for (const auto& [k, v] : settings) ApplySetting(cfg, k, v);
        ExperimentResult r = RunExperiment(cfg, write_files);
        py::list rows;
        for (const AggregateRow& a : r.aggregate) {
          py::dict d = MetricsDict(a.mean);
          d["runs"] = a.runs;
          rows.append(d);
        }
        return rows;
      },
      py::arg("settings"), py::arg("write_files") = false);

  m.def(
      "verify",
      [](int enumeration_cases, int gradient_cases) {
        VerifyOptions options;
        options.enumeration_cases = enumeration_cases;
        options.gradient_cases = gradient_cases;
        py::list out;
        for (const PropertyReport& r : RunVerifySuite(options)) {
          py::dict d;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["worst"] = r.worst;
          d["tolerance"] = r.tolerance;
          d["cases"] = r.cases;
          out.append(d);
        }
        return out;
      },
      py::arg("enumeration_cases") = 200, py::arg("gradient_cases") = 100);
}

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

// Command-line front end: train, active-run, gen-synthetic, verify, evaluate.
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mimlal/common.h"
#include "mimlal/experiment.h"

namespace {

std::string Dashed(std::string key) {
  for (char& ch : key) {
    if (ch == '_') ch = '-';
  }
  return key;
}

struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;
};

void AddExperimentOptions(CLI::App* cmd, Overrides* o) {
  cmd->add_option("--config", o->config_path,
                  "key = value file; flags override it");
  for (const std::string& key : mimlal::ExperimentConfigKeys()) {
    cmd->add_option("--" + Dashed(key), o->values[key]);
  }
}

mimlal::ExperimentConfig BuildConfig(CLI::App* cmd, const Overrides& o) {
  mimlal::ExperimentConfig cfg;
  if (!o.config_path.empty()) mimlal::LoadConfigFile(cfg, o.config_path);
  for (const auto& [key, value] : o.values) {
    if (cmd->count("--" + Dashed(key)) > 0) {
      mimlal::ApplySetting(cfg, key, value);
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active learning for multi-instance multi-label data with "
               "incomplete labels"};
  app.require_subcommand(1);

  Overrides train_o, run_o, gen_o, eval_o;
  CLI::App* train = app.add_subcommand(
      "train", "fit by full gradient descent; writes params.csv, trace.csv");
  CLI::App* run = app.add_subcommand(
      "active-run", "run the active-learning loop over folds x seeds");
  CLI::App* gen = app.add_subcommand(
      "gen-synthetic", "write a synthetic dataset in the text formats");
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "bag-level metrics of a parameter file");
  CLI::App* verify = app.add_subcommand(
      "verify", "brute-force and finite-difference property checks");
  AddExperimentOptions(train, &train_o);
  AddExperimentOptions(run, &run_o);
  AddExperimentOptions(gen, &gen_o);
  AddExperimentOptions(evaluate, &eval_o);

  mimlal::VerifyOptions verify_options;
  verify->add_option("--enumeration-cases", verify_options.enumeration_cases);
  verify->add_option("--gradient-cases", verify_options.gradient_cases);
  verify->add_option("--seed", verify_options.seed);
  verify->add_option("--inject-gradient-bug",
                     verify_options.gradient_perturbation,
                     "add this offset to every analytic gradient entry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*train) {
      mimlal::ExperimentConfig cfg = BuildConfig(train, train_o);
      mimlal::GdResult r = mimlal::TrainCommand(cfg);
      const mimlal::TraceRow& last = r.trace.back();
      std::cout << "epochs " << last.epoch << "  objective "
                << mimlal::FormatDouble(last.objective) << "  grad_norm "
                << mimlal::FormatDouble(last.grad_norm)
                << (r.converged ? "  converged" : "  not converged") << '\n';
    } else if (*run) {
      mimlal::ExperimentConfig cfg = BuildConfig(run, run_o);
      mimlal::ExperimentResult r = mimlal::RunExperiment(cfg);
      const mimlal::AggregateRow& last = r.aggregate.back();
      std::cout << r.curves.size() << " runs; final cost "
                << mimlal::FormatDouble(last.cost) << "  bag_accuracy "
                << mimlal::FormatDouble(last.mean.bag_accuracy)
                << "  hamming_loss "
                << mimlal::FormatDouble(last.mean.hamming_loss) << '\n';
    } else if (*gen) {
      mimlal::GenerateCommand(BuildConfig(gen, gen_o));
    } else if (*evaluate) {
      mimlal::MetricsRow m =
          mimlal::EvaluateCommand(BuildConfig(evaluate, eval_o));
      std::cout << "bag_accuracy,hamming_loss,avg_precision,one_error\n"
                << mimlal::FormatDouble(m.bag_accuracy) << ','
                << mimlal::FormatDouble(m.hamming_loss) << ','
                << mimlal::FormatDouble(m.avg_precision) << ','
                << mimlal::FormatDouble(m.one_error) << '\n';
    } else if (*verify) {
      return mimlal::VerifyCommand(verify_options, std::cout) ? 0 : 1;
    }
  } catch (const mimlal::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

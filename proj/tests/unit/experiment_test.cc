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


#include "mimlal/experiment.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

namespace mimlal {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int CountLines(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mimlal_experiment_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  ExperimentConfig Synthetic() const {
    ExperimentConfig cfg;
    cfg.synthetic = true;
    cfg.bags = 20;
    cfg.classes = 3;
    cfg.dim = 3;
    cfg.out = (dir_ / "out").string();
    cfg.retrain_max_epochs = 10;
    return cfg;
  }

  fs::path dir_;
};

TEST(ConfigTest, SettingsAndUnknownKeys) {
  ExperimentConfig cfg;
  ApplySetting(cfg, "criterion", "unc-pair");
  ApplySetting(cfg, "lambda", "0.25");
  ApplySetting(cfg, "synthetic", "true");
  ApplySetting(cfg, "queries", "7");
  ApplySetting(cfg, "retrain-max-epochs", "12");
  EXPECT_EQ(cfg.retrain_max_epochs, 12);
  EXPECT_EQ(cfg.criterion, "unc-pair");
  EXPECT_EQ(cfg.lambda, 0.25);
  EXPECT_TRUE(cfg.synthetic);
  EXPECT_EQ(cfg.queries, 7);
  EXPECT_THROW(ApplySetting(cfg, "learning_rate", "1"), ValidationError);
  EXPECT_THROW(ApplySetting(cfg, "queries", "seven"), ValidationError);
  EXPECT_THROW(ApplySetting(cfg, "queries", "7x"), ValidationError);
  for (const std::string& key : ExperimentConfigKeys()) {
    EXPECT_FALSE(key.empty());
  }
}

TEST(ConfigTest, ValidationCatchesBadFields) {
  auto bad = [](const char* key, const char* value) {
    ExperimentConfig cfg;
    ApplySetting(cfg, key, value);
    EXPECT_THROW(cfg.Validate(), ValidationError) << key << "=" << value;
  };
  bad("criterion", "entropy");
  bad("mode", "adam");
  bad("lambda", "-1");
  bad("threshold", "1");
  bad("k", "0.5");
  bad("init_fraction", "1.5");
  bad("folds", "0");
  ExperimentConfig ok;
  EXPECT_NO_THROW(ok.Validate());
}

TEST_F(ExperimentTest, ConfigFileWithComments) {
  std::ofstream(dir_ / "run.cfg") << "# comment\n\ncriterion = rand-pair\n"
                                     "queries=3   # trailing\nseed = 5\n";
  ExperimentConfig cfg;
  LoadConfigFile(cfg, (dir_ / "run.cfg").string());
  EXPECT_EQ(cfg.criterion, "rand-pair");
  EXPECT_EQ(cfg.queries, 3);
  EXPECT_EQ(cfg.seed, 5u);
  std::ofstream(dir_ / "bad.cfg") << "criterion rand-pair\n";
  EXPECT_THROW(LoadConfigFile(cfg, (dir_ / "bad.cfg").string()),
               ValidationError);
}

TEST_F(ExperimentTest, ZeroBudgetGivesOneRowPerFold) {
  ExperimentConfig cfg = Synthetic();
  cfg.folds = 10;
  cfg.queries = 0;
  ExperimentResult r = RunExperiment(cfg);
  ASSERT_EQ(r.curves.size(), 10u);
  for (int f = 0; f < 10; ++f) {
    EXPECT_EQ(r.curves[f].size(), 1u);
    EXPECT_EQ(CountLines(fs::path(cfg.out) /
                         ("curves_f" + std::to_string(f) + "_s0.csv")),
              2);
  }
  ASSERT_EQ(r.aggregate.size(), 1u);
  EXPECT_EQ(r.aggregate[0].runs, 10);
  double mean = 0.0;
  for (const auto& c : r.curves) mean += c[0].bag_accuracy / 10.0;
  EXPECT_NEAR(r.aggregate[0].mean.bag_accuracy, mean, 1e-12);
}

TEST_F(ExperimentTest, ReproducibleOutputs) {
  ExperimentConfig cfg = Synthetic();
  cfg.folds = 3;
  cfg.seeds = 2;
  cfg.queries = 6;
  cfg.criterion = "egl-pair";
  RunExperiment(cfg);
  const fs::path first = cfg.out;
  cfg.out = (dir_ / "again").string();
  RunExperiment(cfg);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(first)) {
    EXPECT_EQ(Slurp(entry.path()),
              Slurp(fs::path(cfg.out) / entry.path().filename()));
    ++files;
  }
  EXPECT_EQ(files, 3 * 2 * 2 + 1);
}

TEST_F(ExperimentTest, MissingLabelsFileNamesThePath) {
  ExperimentConfig cfg;
  std::ofstream(dir_ / "x.csv") << "a,1\n";
  cfg.features = (dir_ / "x.csv").string();
  cfg.labels = (dir_ / "nope.csv").string();
  try {
    RunExperiment(cfg, false);
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("nope.csv"), std::string::npos);
  }
}

TEST_F(ExperimentTest, GenerateIsByteIdentical) {
  ExperimentConfig cfg = Synthetic();
  cfg.bags = 10;
  GenerateCommand(cfg);
  const fs::path out = cfg.out;
  cfg.out = (dir_ / "again").string();
  GenerateCommand(cfg);
  for (const char* name :
       {"features.csv", "labels.csv", "labels_masked.csv", "w_true.csv"}) {
    EXPECT_EQ(Slurp(out / name), Slurp(fs::path(cfg.out) / name)) << name;
  }
  Dataset ds = LoadDataset((out / "features.csv").string(),
                           (out / "labels.csv").string());
  EXPECT_EQ(ds.num_bags(), 10);
  EXPECT_EQ(ds.num_classes(), 3);
  EXPECT_EQ(CountLines(out / "features.csv"), ds.num_instances());
}

TEST_F(ExperimentTest, TrainWithoutLabelsWritesZero) {
  std::ofstream(dir_ / "x.csv") << "a,1,2\nb,3,4\n";
  std::ofstream(dir_ / "y.csv") << "a,-1,-1\nb,-1,-1\n";
  ExperimentConfig cfg;
  cfg.features = (dir_ / "x.csv").string();
  cfg.labels = (dir_ / "y.csv").string();
  cfg.out = (dir_ / "out").string();
  GdResult r = TrainCommand(cfg);
  EXPECT_TRUE(r.w.isZero());
  EXPECT_TRUE(LoadParams((dir_ / "out" / "params.csv").string()).isZero());
  EXPECT_EQ(CountLines(dir_ / "out" / "trace.csv"),
            static_cast<int>(r.trace.size()) + 1);
}

TEST_F(ExperimentTest, TrainTraceIsMonotoneAndEvaluateReadsParams) {
  ExperimentConfig gen = Synthetic();
  gen.bags = 30;
  gen.init_fraction = 1.0;
  GenerateCommand(gen);
  ExperimentConfig cfg;
  cfg.features = (fs::path(gen.out) / "features.csv").string();
  cfg.labels = (fs::path(gen.out) / "labels.csv").string();
  cfg.out = (dir_ / "fit").string();
  cfg.max_epochs = 200;
  GdResult r = TrainCommand(cfg);
  for (size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i].objective, r.trace[i - 1].objective);
  }
  cfg.params = (dir_ / "fit" / "params.csv").string();
  MetricsRow m = EvaluateCommand(cfg);
  EXPECT_GT(m.bag_accuracy, 0.0);
}

TEST(VerifyCommandTest, ReportsEveryProperty) {
  VerifyOptions options;
  options.enumeration_cases = 10;
  options.gradient_cases = 5;
  std::ostringstream os;
  EXPECT_TRUE(VerifyCommand(options, os));
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  EXPECT_NE(text.find("worst="), std::string::npos);
  options.gradient_perturbation = 1e-2;
  std::ostringstream bad;
  EXPECT_FALSE(VerifyCommand(options, bad));
}

}  // namespace
}  // namespace mimlal

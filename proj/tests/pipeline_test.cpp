//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldream/pipeline.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "moldream/config.h"
#include "moldream/error.h"

namespace moldream {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path()
            / ("moldream_test_" + std::to_string(::getpid()) + "_"
               + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  const fs::path &path() const { return path_; }

  std::string write(const std::string &name, const std::string &text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::vector<std::string> smiles_of(const Dataset &ds) {
  std::vector<std::string> out;
  for (const DatasetEntry &e: ds.entries)
    out.push_back(e.smiles);
  return out;
}

TEST(IngestTest, DedupAndSizeOrder) {
  SurrogateOracle oracle;
  Dataset ds = ingest_text("CCO\nCCO\nC\n", 2, kDefaultMaxLength, oracle);
  EXPECT_EQ(smiles_of(ds), (std::vector<std::string> { "C", "CCO" }));
  ASSERT_EQ(ds.skips.size(), 1u);
  EXPECT_EQ(ds.skips[0].reason, "Duplicate");
  EXPECT_EQ(ds.skips[0].line, 2);
  EXPECT_NEAR(ds.entries[1].label, 0.6, 1e-12);
  EXPECT_EQ(ds.lines_read, 3);
}

TEST(IngestTest, SkipsWithReasons) {
  SurrogateOracle oracle;
  Dataset ds = ingest_text(
      "# comment\n\nc1ccccc1\nCCCC1CCCCCC\nC(C)(C)(C)(C)C\nC(C\n"
      "CCCCCCCCCCCCCCCCCCCCCCCC\nOCC extra-field\nN\n",
      100, kDefaultMaxLength, oracle);
  EXPECT_EQ(smiles_of(ds), (std::vector<std::string> { "N", "OCC" }));
  ASSERT_EQ(ds.skips.size(), 5u);
  EXPECT_EQ(ds.skips[0].reason, "UnsupportedFeature");
  EXPECT_EQ(ds.skips[0].line, 3);
  EXPECT_EQ(ds.skips[1].reason, "UnclosedRing");
  EXPECT_EQ(ds.skips[2].reason, "ValenceExceeded");
  EXPECT_EQ(ds.skips[3].reason, "SyntaxError");
  EXPECT_EQ(ds.skips[4].reason, "TooLong");
  EXPECT_THROW(ingest_text("c1ccccc1\n", 5, kDefaultMaxLength, oracle),
               EmptyInputError);
  EXPECT_THROW(ingest("/nonexistent/file.smi", 5, 20, oracle), IoError);
}

TEST(IngestTest, ExternalLabels) {
  ExternalLabelOracle oracle = ExternalLabelOracle::parse("C\t1.0\n");
  Dataset ds = ingest_text("C\nCC\n", 10, kDefaultMaxLength, oracle);
  ASSERT_EQ(ds.size(), 1);
  EXPECT_EQ(ds.entries[0].label, 1.0);
  ASSERT_EQ(ds.skips.size(), 1u);
  EXPECT_EQ(ds.skips[0].reason, "NoLabel");
}

TEST(IngestTest, TrainingRowsAreOneHot) {
  SurrogateOracle oracle;
  Dataset ds = ingest_text("CCO\nC=O\nN\n", 10, 6, oracle);
  TrainingSet ts = to_training_set(ds, 6);
  ASSERT_EQ(ts.size(), 3);
  EXPECT_EQ(ts.input_size, 6 * kAlphabetSize);
  for (int i = 0; i < ts.size(); ++i) {
    EXPECT_EQ(ts.labels[i], ds.entries[i].label);
    OneHotMatrix m(6);
    std::copy(ts.row(i).begin(), ts.row(i).end(), m.flat().begin());
    EXPECT_TRUE(m.is_exact_onehot());
    EXPECT_EQ(from_onehot_argmax(m), ds.entries[i].tokens);
  }
}

TEST(HistogramTest, Examples) {
  std::vector<double> v = { 0.5 };
  auto h = histogram(v, 2, 0.0, 1.0);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].count, 0);
  EXPECT_EQ(h[1].count, 1);
  EXPECT_EQ(h[0].lo, 0.0);
  EXPECT_EQ(h[0].hi, 0.5);
  EXPECT_EQ(h[1].hi, 1.0);

  h = histogram({}, 3, 0.0, 1.0);
  for (const auto &b: h)
    EXPECT_EQ(b.count, 0);

  v = { -5.0, 0.0, 0.2, 1.0, 9.0 };
  h = histogram(v, 4, 0.0, 1.0);
  EXPECT_EQ(h[0].count, 3);
  EXPECT_EQ(h[3].count, 2);
  long total = 0;
  for (const auto &b: h)
    total += b.count;
  EXPECT_EQ(total, 5);

  EXPECT_THROW(histogram(v, 0, 0.0, 1.0), BadRangeError);
  EXPECT_THROW(histogram(v, 2, 1.0, 1.0), BadRangeError);
}

DreamTrajectory two_step(const char *from, const char *to) {
  DreamTrajectory t;
  int epoch = 0;
  for (const char *smi: { from, to }) {
    DreamStep s;
    s.epoch = epoch++;
    s.prediction = 0.0;
    s.loss = 0.0;
    s.graph = parse_smiles(smi);
    s.key = canonical_key(s.graph).text;
    t.steps.push_back(s);
  }
  return t;
}

TEST(CompositionShiftTest, Examples) {
  std::vector<MolecularGraph> same = { parse_smiles("CCO"),
                                       parse_smiles("N") };
  CompositionShift s = composition_shift(same, same);
  for (Element e: kAllElements)
    EXPECT_EQ(s.of(e).delta, 0.0);
  EXPECT_EQ(s.hydrogens.delta, 0.0);
  EXPECT_EQ(s.molecules, 2);

  std::vector<DreamTrajectory> swap = { two_step("C", "N") };
  s = composition_shift(swap);
  EXPECT_EQ(s.of(Element::kC).delta, -1.0);
  EXPECT_EQ(s.of(Element::kN).delta, 1.0);
  EXPECT_EQ(s.hydrogens.delta, -1.0);

  std::vector<DreamTrajectory> two = { two_step("C", "N"),
                                       two_step("CC", "CC") };
  s = composition_shift(two);
  EXPECT_EQ(s.of(Element::kC).before, 1.5);
  EXPECT_EQ(s.of(Element::kC).after, 1.0);
  EXPECT_EQ(s.of(Element::kN).delta, 0.5);

  std::vector<MolecularGraph> one = { parse_smiles("C") };
  EXPECT_THROW(composition_shift(one, same), EmptyInputError);
}

TEST(ProbeTest, ReadsTrajectoryLines) {
  std::stringstream ss;
  DreamTrajectory t = two_step("CC", "CN");
  write_trajectory_jsonl(ss, t, "low", 0);
  t = two_step("O", "OC");
  write_trajectory_jsonl(ss, t, "low", 1);
  t = two_step("C", "F");
  write_trajectory_jsonl(ss, t, "high", 0);

  auto shifts = probe_trajectories(ss);
  ASSERT_EQ(shifts.size(), 2u);
  EXPECT_EQ(shifts["low"].molecules, 2);
  EXPECT_EQ(shifts["low"].of(Element::kN).delta, 0.5);
  EXPECT_EQ(shifts["low"].of(Element::kC).delta, 0.0);
  EXPECT_EQ(shifts["high"].of(Element::kF).delta, 1.0);

  std::stringstream bad("{not json\n");
  EXPECT_THROW(probe_trajectories(bad), Error);
}

TEST(ExperimentConfigTest, ParsesKeys) {
  KeyValueConfig kv = KeyValueConfig::parse(
      "dataset = mols.smi\nn_smallest = 50\nhidden = 8, 4\n"
      "noise_upper_bound = 0.5\ntarget_high = 3\ndream_split = train\n"
      "seed = 7\n");
  ExperimentConfig cfg = ExperimentConfig::from_config(kv, "/data");
  EXPECT_EQ(cfg.dataset_path, "/data/mols.smi");
  EXPECT_EQ(cfg.n_smallest, 50);
  EXPECT_EQ(cfg.train.hidden, (std::vector<int> { 8, 4 }));
  EXPECT_EQ(cfg.dream.noise_upper_bound, 0.5);
  EXPECT_EQ(cfg.target_high, 3.0);
  EXPECT_FALSE(cfg.target_low.has_value());
  EXPECT_EQ(cfg.split, DreamSplit::kTrain);
  EXPECT_EQ(cfg.train.seed, 7u);
  EXPECT_EQ(cfg.dream.seed, 7u);

  kv.set("dataset", "/abs/mols.smi");
  EXPECT_EQ(ExperimentConfig::from_config(kv, "/data").dataset_path,
            "/abs/mols.smi");

  auto rejects = [](const std::string &text) {
    EXPECT_THROW(ExperimentConfig::from_config(KeyValueConfig::parse(text)),
                 ConfigError)
        << text;
  };
  rejects("n_smallest = 5\n");
  rejects("dataset = x\nbogus = 1\n");
  rejects("dataset = x\nn_smallest = ten\n");
  rejects("dataset = x\nnoise_upper_bound = 1.5\n");
  rejects("dataset = x\ndream_split = some\n");
  rejects("dataset = x\nhidden = 8,,4\n");
}

std::string small_corpus() {
  return "C\nCC\nCO\nCN\nCF\nC=O\nC#N\nCCO\nCCN\nCCC\nOCO\nNCN\nC1CC1\n"
         "CC=O\nCC#N\nNC=O\nOC=O\nCCCC\nCC(C)C\nCC(C)O\nCOC\nCNC\nFCF\n"
         "C1CO1\nC1CN1\nN#CC#N\nO=CC=O\nCCCO\nCCCN\nOCCO\nNCCN\nCC(F)F\n";
}

ExperimentConfig small_experiment(const TempDir &dir) {
  ExperimentConfig cfg;
  cfg.dataset_path = dir.write("mols.smi", small_corpus());
  cfg.n_smallest = 100;
  cfg.max_length = 8;
  cfg.seed = 3;
  cfg.train.hidden = { 16, 16 };
  cfg.train.epochs = 30;
  cfg.train.batch_size = 8;
  cfg.train.seed = 3;
  cfg.dream.max_epochs = 60;
  cfg.dream.seed = 3;
  cfg.histogram_bins = 5;
  return cfg;
}

TEST(ExperimentTest, ReportIsConsistent) {
  TempDir dir;
  ExperimentConfig cfg = small_experiment(dir);
  ExperimentResult r = run_experiment(cfg);
  json report = json::parse(r.report_json);

  EXPECT_EQ(report["format"], "moldream-report v1");
  const long scored = report["dataset"]["scored"].get<long>();
  EXPECT_EQ(scored, r.dataset.size());
  for (const char *arm: { "original", "dreamed_high", "dreamed_low" }) {
    EXPECT_EQ(report["stats"][arm]["count"].get<long>(), scored);
    EXPECT_EQ(report["values"][arm].size(), static_cast<size_t>(scored));
    long total = 0;
    for (const auto &b: report["histogram"])
      total += b[arm].get<long>();
    EXPECT_EQ(total, scored);
  }

  // Extreme counts recomputed from the raw value lists.
  const double omax = report["extremes"]["original_max"].get<double>();
  const double omin = report["extremes"]["original_min"].get<double>();
  long above = 0, below = 0;
  for (double v: report["values"]["dreamed_high"].get<std::vector<double>>())
    above += v > omax ? 1 : 0;
  for (double v: report["values"]["dreamed_low"].get<std::vector<double>>())
    below += v < omin ? 1 : 0;
  EXPECT_EQ(report["extremes"]["high_above_original_max"].get<long>(), above);
  EXPECT_EQ(report["extremes"]["low_below_original_min"].get<long>(), below);

  // Dreamed values are oracle scores of the final molecules.
  SurrogateOracle oracle;
  auto high = report["values"]["dreamed_high"].get<std::vector<double>>();
  for (size_t i = 0; i < r.high.outcomes.size(); ++i)
    EXPECT_EQ(high[i], oracle.evaluate(r.high.outcomes[i].trajectory->final().graph));

  const Stats s = dataset_stats(r.dataset.labels());
  EXPECT_NEAR(report["targets"]["high"].get<double>(), s.max + 2 * s.std,
              1e-12);
  EXPECT_NEAR(report["targets"]["low"].get<double>(), s.min - 2 * s.std,
              1e-12);

  ExperimentResult again = run_experiment(cfg);
  EXPECT_EQ(again.report_json, r.report_json);

  write_experiment_outputs(r, (dir.path() / "out").string());
  for (const char *name: { "report.json", "histograms.csv", "stats.csv",
                           "trajectories.jsonl", "skips.txt", "model.txt" })
    EXPECT_TRUE(fs::exists(dir.path() / "out" / name)) << name;
  std::ifstream csv(dir.path() / "out" / "histograms.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "bin_lo,bin_hi,original,dreamed_high,dreamed_low");
}

TEST(ExperimentTest, ZeroLearningRateKeepsDistribution) {
  TempDir dir;
  ExperimentConfig cfg = small_experiment(dir);
  cfg.dream.learning_rate = 0.0;
  cfg.dream.max_epochs = 3;
  json report = json::parse(run_experiment(cfg).report_json);
  EXPECT_EQ(report["stats"]["dreamed_high"], report["stats"]["original"]);
  EXPECT_EQ(report["stats"]["dreamed_low"], report["stats"]["original"]);
  EXPECT_EQ(report["changed"]["high"].get<long>(), 0);
}

TEST(ExperimentTest, UntrainedNetworkStillReports) {
  TempDir dir;
  ExperimentConfig cfg = small_experiment(dir);
  cfg.train.epochs = 0;
  cfg.target_high = 5.0;
  cfg.target_low = -5.0;
  json report = json::parse(run_experiment(cfg).report_json);
  EXPECT_EQ(report["training"]["epochs"].get<long>(), 0);
  EXPECT_EQ(report["targets"]["high"].get<double>(), 5.0);
  EXPECT_EQ(report["histogram"].size(), 5u);
  EXPECT_TRUE(report["composition"]["low"].contains("N"));
}

TEST(ExperimentTest, PretrainedModelIsReused) {
  TempDir dir;
  ExperimentConfig cfg = small_experiment(dir);
  ExperimentResult first = run_experiment(cfg);
  ExperimentResult second = run_experiment(cfg, &first.training.model);
  EXPECT_TRUE(second.training.model == first.training.model);
  json a = json::parse(first.report_json);
  json b = json::parse(second.report_json);
  EXPECT_EQ(a["stats"], b["stats"]);
  EXPECT_TRUE(b["training"]["pretrained"].get<bool>());
}

int run_cli(const std::string &args) {
  const std::string cmd =
      std::string(MOLDREAM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  TempDir dir;
  const std::string mols = dir.write("mols.smi", small_corpus());
  const std::string bad = dir.write("bad.smi", "c1ccccc1\n");
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("ingest"), 1);
  EXPECT_EQ(run_cli("ingest --dataset " + mols), 0);
  EXPECT_EQ(run_cli("ingest --dataset " + bad), 2);
  EXPECT_EQ(run_cli("ingest --dataset /nonexistent.smi"), 2);

  const std::string cfg = dir.write(
      "exp.cfg", "dataset = mols.smi\nmax_length = 8\nhidden = 8\n"
                 "train_epochs = 5\ndream_max_epochs = 20\n");
  const std::string model = (dir.path() / "model.txt").string();
  EXPECT_EQ(run_cli("train --config " + cfg + " --out " + model), 0);
  EXPECT_EQ(run_cli("dream --model " + model + " --smiles CCO --target 2"),
            0);
  EXPECT_EQ(run_cli("dream --model " + model + " --smiles C1CC --target 2"),
            2);
  EXPECT_EQ(run_cli("dream --model " + model + " --smiles CCO"), 1);

  const std::string out = (dir.path() / "exp").string();
  EXPECT_EQ(run_cli("experiment --config " + cfg + " --out-dir " + out), 0);
  EXPECT_EQ(run_cli("probe --trajectories " + out + "/trajectories.jsonl"),
            0);
  const std::string broken = dir.write("broken.cfg", "dataset = x\nfoo = 1\n");
  EXPECT_EQ(run_cli("experiment --config " + broken + " --out-dir " + out),
            1);
}

}  // namespace
}  // namespace moldream

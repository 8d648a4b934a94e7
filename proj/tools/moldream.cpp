//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Command-line driver. Exit codes: 0 success, 1 usage error, 2 data error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "moldream/config.h"
#include "moldream/dream.h"
#include "moldream/error.h"
#include "moldream/mlp.h"
#include "moldream/oracle.h"
#include "moldream/pipeline.h"

namespace {

using namespace moldream;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

ExperimentConfig load_experiment_config(const std::string &path) {
  const auto kv = KeyValueConfig::load(path);
  return ExperimentConfig::from_config(
      kv, std::filesystem::path(path).parent_path().string());
}

int cmd_ingest(const std::string &dataset, int n_smallest, int max_length,
               const std::string &table, bool list) {
  std::unique_ptr<PropertyOracle> oracle;
  if (table.empty())
    oracle = std::make_unique<SurrogateOracle>();
  else
    oracle = std::make_unique<SurrogateOracle>(load_property_table(table));

  const Dataset ds = ingest(dataset, n_smallest, max_length, *oracle);
  std::map<std::string, int> reasons;
  for (const auto &s: ds.skips)
    ++reasons[s.reason];

  std::cout << "lines\t" << ds.lines_read << '\n'
            << "entries\t" << ds.size() << '\n'
            << "skipped\t" << ds.skips.size() << '\n';
  for (const auto &[reason, n]: reasons)
    std::cout << "skip:" << reason << '\t' << n << '\n';
  const Stats s = dataset_stats(ds.labels());
  std::cout << "label_mean\t" << format_double(s.mean) << '\n'
            << "label_std\t" << format_double(s.std) << '\n'
            << "label_min\t" << format_double(s.min) << '\n'
            << "label_max\t" << format_double(s.max) << '\n';
  for (const auto &sk: ds.skips)
    std::cerr << "skip line " << sk.line << ": " << sk.reason << " ("
              << sk.text << ")\n";
  if (list) {
    for (const auto &e: ds.entries)
      std::cout << e.smiles << '\t' << to_text(e.tokens) << '\t'
                << format_double(e.label) << '\n';
  }
  return 0;
}

int cmd_train(const std::string &dataset, const std::string &config_path,
              const std::string &out) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    auto kv = KeyValueConfig::load(config_path);
    if (!kv.contains("dataset"))
      kv.set("dataset", dataset);
    cfg = ExperimentConfig::from_config(
        kv, std::filesystem::path(config_path).parent_path().string());
  }
  if (!dataset.empty())
    cfg.dataset_path = dataset;
  if (cfg.dataset_path.empty())
    throw ConfigError("no dataset given");

  const auto oracle = cfg.make_oracle();
  const Dataset ds =
      ingest(cfg.dataset_path, cfg.n_smallest, cfg.max_length, *oracle);
  const TrainingSet data = to_training_set(ds, cfg.max_length);

  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult res = train(data, cfg.train);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();

  std::cout << "epoch\ttrain_mse\tvalidation_mse\n";
  for (const auto &r: res.history) {
    if (r.epoch == 1 || r.epoch % 10 == 0
        || r.epoch == static_cast<int>(res.history.size())) {
      std::cout << r.epoch << '\t' << format_double(r.train_mse) << '\t'
                << format_double(r.validation_mse) << '\n';
    }
  }
  save_mlp(res.model, out);
  std::cerr << "trained on " << res.split.train.size() << " molecules in "
            << std::fixed << std::setprecision(1) << secs << " s; model "
            << out << '\n';
  return 0;
}

int cmd_dream(const std::string &model_path, const std::string &smiles,
              double target, const DreamConfig &base) {
  const Mlp model = load_mlp(model_path);
  const MolecularGraph start = parse_smiles(smiles);
  DreamConfig cfg = base;
  cfg.target = target;
  const DreamTrajectory traj = dream(model, start, cfg);
  write_trajectory_jsonl(std::cout, traj, "cli", 0);
  std::cerr << "termination " << to_string(traj.termination) << " after "
            << traj.epochs_run << " epochs; final prediction "
            << format_double(traj.final_prediction) << '\n';
  return 0;
}

int cmd_experiment(const std::string &config_path, const std::string &out_dir) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult res = run_experiment(cfg);
  write_experiment_outputs(res, out_dir);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  std::cerr << "experiment finished in " << std::fixed << std::setprecision(1)
            << secs << " s; outputs in " << out_dir << '\n';
  return 0;
}

int cmd_probe(const std::string &path) {
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot read " + path);
  const auto shifts = probe_trajectories(is);
  std::cout << "arm\telement\tmean_before\tmean_after\tdelta\n";
  for (const auto &[arm, shift]: shifts) {
    for (Element e: kAllElements) {
      const auto &s = shift.of(e);
      std::cout << arm << '\t' << element_symbol(e) << '\t'
                << format_double(s.before) << '\t' << format_double(s.after)
                << '\t' << format_double(s.delta) << '\n';
    }
    std::cout << arm << "\tH\t" << format_double(shift.hydrogens.before)
              << '\t' << format_double(shift.hydrogens.after) << '\t'
              << format_double(shift.hydrogens.delta) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app { "Gradient-based molecule dreaming on a string grammar" };
  app.require_subcommand(1);

  std::string dataset, table, config, out, model, smiles, trajectories;
  int n_smallest = 10000, max_length = kDefaultMaxLength;
  bool list = false;
  double target = 0.0;
  DreamConfig dcfg;
  std::int64_t seed = 0;

  auto *ingest_cmd = app.add_subcommand("ingest", "Validate a SMILES file");
  ingest_cmd->add_option("--dataset", dataset, "SMILES file")->required();
  ingest_cmd->add_option("--n-smallest", n_smallest, "Molecules to keep");
  ingest_cmd->add_option("--max-length", max_length, "Token length limit");
  ingest_cmd->add_option("--table", table, "Property table file");
  ingest_cmd->add_flag("--list", list, "Print kept molecules");

  auto *train_cmd = app.add_subcommand("train", "Train the regressor");
  train_cmd->add_option("--dataset", dataset, "SMILES file");
  train_cmd->add_option("--config", config, "key = value config file");
  train_cmd->add_option("--out", out, "Model file to write")->required();

  auto *dream_cmd = app.add_subcommand("dream", "Dream one molecule");
  dream_cmd->add_option("--model", model, "Model file")->required();
  dream_cmd->add_option("--smiles", smiles, "Starting molecule")->required();
  dream_cmd->add_option("--target", target, "Target property value")
      ->required();
  dream_cmd->add_option("--noise-upper", dcfg.noise_upper_bound,
                        "Noise upper bound in [0, 1)");
  dream_cmd->add_option("--seed", seed, "Noise seed");
  dream_cmd->add_option("--lr", dcfg.learning_rate, "Input learning rate");
  dream_cmd->add_option("--max-epochs", dcfg.max_epochs, "Epoch limit");
  dream_cmd->add_option("--grad-tolerance", dcfg.grad_tolerance,
                        "Stop when the max input gradient falls below this");

  auto *exp_cmd = app.add_subcommand("experiment", "Run a full experiment");
  exp_cmd->add_option("--config", config, "key = value config file")
      ->required();
  exp_cmd->add_option("--out-dir", out, "Output directory")->required();

  auto *probe_cmd =
      app.add_subcommand("probe", "Composition shift of trajectories");
  probe_cmd->add_option("--trajectories", trajectories, "trajectories.jsonl")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*ingest_cmd)
      return cmd_ingest(dataset, n_smallest, max_length, table, list);
    if (*train_cmd) {
      if (dataset.empty() && config.empty()) {
        std::cerr << "train: --dataset or --config is required\n";
        return kExitUsage;
      }
      return cmd_train(dataset, config, out);
    }
    if (*dream_cmd) {
      dcfg.seed = static_cast<std::uint64_t>(seed);
      return cmd_dream(model, smiles, target, dcfg);
    }
    if (*exp_cmd)
      return cmd_experiment(config, out);
    if (*probe_cmd)
      return cmd_probe(trajectories);
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

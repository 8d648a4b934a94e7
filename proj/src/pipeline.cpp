//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldream/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>

#include <json.hpp>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "moldream/error.h"

namespace moldream {

using json = nlohmann::ordered_json;

std::vector<double> Dataset::labels() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto &e: entries)
    out.push_back(e.label);
  return out;
}

std::vector<MolecularGraph> Dataset::graphs() const {
  std::vector<MolecularGraph> out;
  out.reserve(entries.size());
  for (const auto &e: entries)
    out.push_back(e.graph);
  return out;
}

// Ingestion -------------------------------------------------------------------

Dataset ingest_text(std::string_view text, int n_smallest, int max_length,
                    const PropertyOracle &oracle) {
  Dataset ds;
  std::vector<DatasetEntry> candidates;
  std::set<std::string> seen;

  int lineno = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;

    const size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string_view::npos || line[b] == '#')
      continue;
    line = line.substr(b);
    const size_t e = line.find_first_of(" \t\r");
    const std::string_view smiles = line.substr(0, e);
    ++ds.lines_read;

    DatasetEntry entry;
    entry.smiles = std::string(smiles);
    entry.line = lineno;
    try {
      entry.graph = parse_smiles(smiles);
      if (entry.graph.empty())
        throw SmilesError(SmilesError::Kind::kSyntax, "empty molecule");
      entry.tokens = encode(entry.graph, max_length);
    } catch (const SmilesError &err) {
      ds.skips.push_back({ lineno, to_string(err.kind()), entry.smiles });
      continue;
    } catch (const EncodingError &err) {
      ds.skips.push_back({ lineno, to_string(err.kind()), entry.smiles });
      continue;
    }

    entry.key = canonical_key(entry.graph).text;
    if (!seen.insert(entry.key).second) {
      ds.skips.push_back({ lineno, "Duplicate", entry.smiles });
      continue;
    }
    candidates.push_back(std::move(entry));
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const DatasetEntry &a, const DatasetEntry &b) {
                     return std::tuple(a.graph.num_atoms(), a.tokens.size(),
                                       std::string_view(a.key))
                            < std::tuple(b.graph.num_atoms(), b.tokens.size(),
                                         std::string_view(b.key));
                   });

  for (auto &entry: candidates) {
    if (static_cast<int>(ds.entries.size()) >= n_smallest)
      break;
    try {
      entry.label = oracle.evaluate(entry.graph);
    } catch (const LookupError &) {
      ds.skips.push_back({ entry.line, "NoLabel", entry.smiles });
      continue;
    }
    if (!std::isfinite(entry.label)) {
      ds.skips.push_back({ entry.line, "NonFiniteLabel", entry.smiles });
      continue;
    }
    ds.entries.push_back(std::move(entry));
  }
  std::sort(ds.skips.begin(), ds.skips.end(),
            [](const SkipRecord &a, const SkipRecord &b) {
              return a.line < b.line;
            });

  if (ds.entries.empty())
    throw EmptyInputError("no usable molecules in dataset");
  return ds;
}

Dataset ingest(const std::string &path, int n_smallest, int max_length,
               const PropertyOracle &oracle) {
  return ingest_text(read_file(path), n_smallest, max_length, oracle);
}

TrainingSet to_training_set(const Dataset &ds, int max_length) {
  TrainingSet set;
  set.input_size = max_length * kAlphabetSize;
  for (const auto &e: ds.entries)
    set.add(to_onehot(e.tokens, max_length).flat(), e.label);
  return set;
}

// Histogram and composition ---------------------------------------------------

std::vector<HistogramBin> histogram(std::span<const double> values, int bins,
                                    double lo, double hi) {
  if (bins < 1)
    throw BadRangeError("histogram needs at least one bin");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw BadRangeError("histogram range must satisfy lo < hi");

  const double width = (hi - lo) / bins;
  std::vector<HistogramBin> out(bins);
  for (int i = 0; i < bins; ++i) {
    out[i].lo = lo + width * i;
    out[i].hi = i + 1 == bins ? hi : lo + width * (i + 1);
    out[i].count = 0;
  }
  for (double v: values) {
    int idx;
    if (!(v >= lo))
      idx = 0;
    else if (v >= hi)
      idx = bins - 1;
    else
      idx = std::min(bins - 1, static_cast<int>((v - lo) / width));
    // Floating-point division can land one bin off near an edge.
    while (idx > 0 && v < out[idx].lo)
      --idx;
    while (idx + 1 < bins && v >= out[idx + 1].lo)
      ++idx;
    ++out[idx].count;
  }
  return out;
}

CompositionShift composition_shift(std::span<const MolecularGraph> before,
                                   std::span<const MolecularGraph> after) {
  if (before.empty() || before.size() != after.size())
    throw EmptyInputError("composition shift needs matching, non-empty lists");

  CompositionShift shift;
  shift.molecules = static_cast<long>(before.size());
  std::array<long, kNumElements> sum_before {}, sum_after {};
  long h_before = 0, h_after = 0;
  for (size_t i = 0; i < before.size(); ++i) {
    const Composition b = composition(before[i]);
    const Composition a = composition(after[i]);
    for (int k = 0; k < kNumElements; ++k) {
      sum_before[k] += b.heavy[k];
      sum_after[k] += a.heavy[k];
    }
    h_before += b.hydrogens;
    h_after += a.hydrogens;
  }
  const double n = static_cast<double>(before.size());
  for (int k = 0; k < kNumElements; ++k) {
    auto &s = shift.elements[k];
    s.before = static_cast<double>(sum_before[k]) / n;
    s.after = static_cast<double>(sum_after[k]) / n;
    s.delta = static_cast<double>(sum_after[k] - sum_before[k]) / n;
  }
  shift.hydrogens.before = static_cast<double>(h_before) / n;
  shift.hydrogens.after = static_cast<double>(h_after) / n;
  shift.hydrogens.delta = static_cast<double>(h_after - h_before) / n;
  return shift;
}

CompositionShift composition_shift(std::span<const DreamTrajectory> trajs) {
  std::vector<MolecularGraph> before, after;
  for (const auto &t: trajs) {
    before.push_back(t.initial().graph);
    after.push_back(t.final().graph);
  }
  return composition_shift(before, after);
}

std::map<std::string, CompositionShift> probe_trajectories(std::istream &is) {
  struct Ends {
    int first_epoch = -1, last_epoch = -1;
    std::string first, last;
  };
  std::map<std::pair<std::string, long>, Ends> groups;

  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception &e) {
      throw IoError("trajectory line " + std::to_string(lineno) + ": "
                    + e.what());
    }
    if (!j.contains("arm") || !j.contains("molecule") || !j.contains("epoch")
        || !j.contains("smiles")) {
      throw IoError("trajectory line " + std::to_string(lineno)
                    + ": missing arm/molecule/epoch/smiles");
    }
    Ends &ends = groups[{ j["arm"].get<std::string>(),
                          j["molecule"].get<long>() }];
    const int epoch = j["epoch"].get<int>();
    const std::string smiles = j["smiles"].get<std::string>();
    if (ends.first_epoch < 0 || epoch < ends.first_epoch) {
      ends.first_epoch = epoch;
      ends.first = smiles;
    }
    if (epoch >= ends.last_epoch) {
      ends.last_epoch = epoch;
      ends.last = smiles;
    }
  }

  std::map<std::string, std::pair<std::vector<MolecularGraph>,
                                  std::vector<MolecularGraph>>> per_arm;
  for (const auto &[id, ends]: groups) {
    auto &[before, after] = per_arm[id.first];
    before.push_back(parse_smiles(ends.first));
    after.push_back(parse_smiles(ends.last));
  }
  std::map<std::string, CompositionShift> out;
  for (const auto &[arm, lists]: per_arm)
    out[arm] = composition_shift(lists.first, lists.second);
  return out;
}

// Experiment configuration ----------------------------------------------------

namespace {

const std::set<std::string> kExperimentKeys = {
  "dataset",          "property_table",   "labels",
  "n_smallest",       "max_length",       "seed",
  "train_learning_rate", "train_batch_size", "train_epochs",
  "train_fraction",   "train_seed",       "hidden",
  "dream_learning_rate", "dream_max_epochs", "grad_tolerance",
  "noise_upper_bound", "dream_seed",      "renoise_each_epoch",
  "target_high",      "target_low",       "dream_split",
  "histogram_bins",   "threads",
};

std::string resolve(const std::string &base, const std::string &path) {
  if (path.empty() || base.empty())
    return path;
  std::filesystem::path p(path);
  if (p.is_absolute())
    return path;
  return (std::filesystem::path(base) / p).string();
}

std::vector<int> parse_widths(const std::string &text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(static_cast<int>(parse_int(item)));
  return out;
}

const char *to_string(DreamSplit s) {
  switch (s) {
  case DreamSplit::kAll:
    return "all";
  case DreamSplit::kTrain:
    return "train";
  case DreamSplit::kValidation:
    return "validation";
  }
  return "all";
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig &kv,
                                               const std::string &base_dir) {
  for (const auto &[key, _]: kv.entries()) {
    if (!kExperimentKeys.count(key))
      throw ConfigError("unknown config key '" + key + "'");
  }

  ExperimentConfig cfg;
  cfg.dataset_path = resolve(base_dir, kv.get_string("dataset", ""));
  if (cfg.dataset_path.empty())
    throw ConfigError("missing key 'dataset'");
  cfg.property_table_path =
      resolve(base_dir, kv.get_string("property_table", ""));
  cfg.labels_path = resolve(base_dir, kv.get_string("labels", ""));
  cfg.n_smallest = static_cast<int>(kv.get_int("n_smallest", cfg.n_smallest));
  cfg.max_length = static_cast<int>(kv.get_int("max_length", cfg.max_length));
  cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));

  cfg.train.learning_rate =
      kv.get_double("train_learning_rate", cfg.train.learning_rate);
  cfg.train.batch_size =
      static_cast<int>(kv.get_int("train_batch_size", cfg.train.batch_size));
  cfg.train.epochs =
      static_cast<int>(kv.get_int("train_epochs", cfg.train.epochs));
  cfg.train.train_fraction =
      kv.get_double("train_fraction", cfg.train.train_fraction);
  cfg.train.seed = static_cast<std::uint64_t>(
      kv.get_int("train_seed", static_cast<std::int64_t>(cfg.seed)));
  if (auto h = kv.get("hidden"))
    cfg.train.hidden = parse_widths(*h);

  cfg.dream.learning_rate =
      kv.get_double("dream_learning_rate", cfg.dream.learning_rate);
  cfg.dream.max_epochs =
      static_cast<int>(kv.get_int("dream_max_epochs", cfg.dream.max_epochs));
  cfg.dream.grad_tolerance =
      kv.get_double("grad_tolerance", cfg.dream.grad_tolerance);
  cfg.dream.noise_upper_bound =
      kv.get_double("noise_upper_bound", cfg.dream.noise_upper_bound);
  cfg.dream.seed = static_cast<std::uint64_t>(
      kv.get_int("dream_seed", static_cast<std::int64_t>(cfg.seed)));
  cfg.dream.renoise_each_epoch =
      kv.get_bool("renoise_each_epoch", cfg.dream.renoise_each_epoch);

  if (kv.contains("target_high"))
    cfg.target_high = kv.get_double("target_high", 0);
  if (kv.contains("target_low"))
    cfg.target_low = kv.get_double("target_low", 0);

  const std::string split = kv.get_string("dream_split", "all");
  if (split == "all")
    cfg.split = DreamSplit::kAll;
  else if (split == "train")
    cfg.split = DreamSplit::kTrain;
  else if (split == "validation")
    cfg.split = DreamSplit::kValidation;
  else
    throw ConfigError("dream_split must be all, train or validation");

  cfg.histogram_bins =
      static_cast<int>(kv.get_int("histogram_bins", cfg.histogram_bins));
  cfg.threads = static_cast<int>(kv.get_int("threads", 0));

  if (cfg.n_smallest < 1)
    throw ConfigError("n_smallest must be positive");
  if (cfg.max_length < 1)
    throw ConfigError("max_length must be positive");
  if (cfg.histogram_bins < 1)
    throw ConfigError("histogram_bins must be positive");
  cfg.train.validate();
  DreamConfig probe = cfg.dream;
  probe.target = 0;
  probe.validate();
  return cfg;
}

std::unique_ptr<PropertyOracle> ExperimentConfig::make_oracle() const {
  if (!labels_path.empty())
    return std::make_unique<ExternalLabelOracle>(
        ExternalLabelOracle::load(labels_path));
  if (!property_table_path.empty())
    return std::make_unique<SurrogateOracle>(
        load_property_table(property_table_path));
  return std::make_unique<SurrogateOracle>();
}

// Experiment ------------------------------------------------------------------

namespace {

json stats_json(const Stats &s) {
  return json { { "count", s.count },
                { "mean", s.mean },
                { "std", s.std },
                { "min", s.min },
                { "max", s.max } };
}

json shift_json(const CompositionShift &shift) {
  json out = json::object();
  auto row = [](const ElementShift &s) {
    return json { { "before", s.before },
                  { "after", s.after },
                  { "delta", s.delta } };
  };
  for (Element e: kAllElements)
    out[std::string(1, element_symbol(e))] = row(shift.of(e));
  out["H"] = row(shift.hydrogens);
  out["molecules"] = shift.molecules;
  return out;
}

json config_echo(const ExperimentConfig &cfg, const std::string &oracle) {
  json hidden = json::array();
  for (int h: cfg.train.hidden)
    hidden.push_back(h);
  json j {
    { "dataset", std::filesystem::path(cfg.dataset_path).filename().string() },
    { "oracle", oracle },
    { "n_smallest", cfg.n_smallest },
    { "max_length", cfg.max_length },
    { "seed", cfg.seed },
    { "train_learning_rate", cfg.train.learning_rate },
    { "train_batch_size", cfg.train.batch_size },
    { "train_epochs", cfg.train.epochs },
    { "train_fraction", cfg.train.train_fraction },
    { "train_seed", cfg.train.seed },
    { "hidden", hidden },
    { "dream_learning_rate", cfg.dream.learning_rate },
    { "dream_max_epochs", cfg.dream.max_epochs },
    { "grad_tolerance", cfg.dream.grad_tolerance },
    { "noise_upper_bound", cfg.dream.noise_upper_bound },
    { "dream_seed", cfg.dream.seed },
    { "renoise_each_epoch", cfg.dream.renoise_each_epoch },
    { "dream_split", to_string(cfg.split) },
    { "histogram_bins", cfg.histogram_bins },
  };
  return j;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << v;
  return ss.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig &cfg,
                                const Mlp *pretrained) {
#if defined(_OPENMP)
  if (cfg.threads > 0)
    omp_set_num_threads(cfg.threads);
#endif
  const std::unique_ptr<PropertyOracle> oracle = cfg.make_oracle();

  ExperimentResult result;
  result.dataset =
      ingest(cfg.dataset_path, cfg.n_smallest, cfg.max_length, *oracle);
  const Dataset &ds = result.dataset;
  const TrainingSet data = to_training_set(ds, cfg.max_length);

  if (pretrained != nullptr) {
    if (pretrained->input_size() != data.input_size)
      throw ShapeMismatchError("pretrained model does not match max_length");
    result.training.model = *pretrained;
    result.training.split = split_indices(ds.size(), cfg.train.train_fraction,
                                          cfg.train.seed);
  } else {
    result.training = train(data, cfg.train);
  }
  const Mlp &model = result.training.model;

  switch (cfg.split) {
  case DreamSplit::kAll:
    for (int i = 0; i < ds.size(); ++i)
      result.dreamed.push_back(i);
    break;
  case DreamSplit::kTrain:
    result.dreamed = result.training.split.train;
    std::sort(result.dreamed.begin(), result.dreamed.end());
    break;
  case DreamSplit::kValidation:
    result.dreamed = result.training.split.validation;
    std::sort(result.dreamed.begin(), result.dreamed.end());
    break;
  }

  const std::vector<double> all_labels = ds.labels();
  const Stats dataset_summary = dataset_stats(all_labels);
  const double target_high =
      cfg.target_high.value_or(dataset_summary.max + 2 * dataset_summary.std);
  const double target_low =
      cfg.target_low.value_or(dataset_summary.min - 2 * dataset_summary.std);

  std::vector<MolecularGraph> starts;
  for (int i: result.dreamed)
    starts.push_back(ds.entries[i].graph);

  result.high.name = "high";
  result.high.target = target_high;
  result.low.name = "low";
  result.low.target = target_low;
  for (ArmResult *arm: { &result.high, &result.low }) {
    DreamConfig dc = cfg.dream;
    dc.target = arm->target;
    arm->outcomes = dream_set(model, starts, dc);
  }

  // Score final molecules with the oracle. A molecule enters the statistics
  // only if both arms produced a scored result, so all three distributions
  // cover the same molecules.
  json failures = json::array();
  std::vector<double> original, high_vals, low_vals;
  std::vector<DreamTrajectory> high_trajs, low_trajs;
  long changed_high = 0, changed_low = 0;
  std::map<std::string, long> term_high, term_low;
  for (size_t i = 0; i < starts.size(); ++i) {
    const DatasetEntry &entry = ds.entries[result.dreamed[i]];
    std::optional<double> hv, lv;
    for (ArmResult *arm: { &result.high, &result.low }) {
      const DreamOutcome &o = arm->outcomes[i];
      std::optional<double> &slot = arm == &result.high ? hv : lv;
      if (!o.ok()) {
        failures.push_back({ { "arm", arm->name },
                             { "molecule", static_cast<long>(i) },
                             { "smiles", entry.smiles },
                             { "error", o.error } });
        continue;
      }
      try {
        slot = oracle->evaluate(o.trajectory->final().graph);
      } catch (const LookupError &e) {
        failures.push_back({ { "arm", arm->name },
                             { "molecule", static_cast<long>(i) },
                             { "smiles", entry.smiles },
                             { "error", e.what() } });
      }
    }
    if (!hv || !lv)
      continue;
    original.push_back(entry.label);
    high_vals.push_back(*hv);
    low_vals.push_back(*lv);
    const DreamTrajectory &th = *result.high.outcomes[i].trajectory;
    const DreamTrajectory &tl = *result.low.outcomes[i].trajectory;
    high_trajs.push_back(th);
    low_trajs.push_back(tl);
    changed_high += th.steps.size() > 1 ? 1 : 0;
    changed_low += tl.steps.size() > 1 ? 1 : 0;
    ++term_high[to_string(th.termination)];
    ++term_low[to_string(tl.termination)];
  }
  if (original.empty())
    throw EmptyInputError("no molecule could be dreamed and scored");

  const Stats s_orig = dataset_stats(original);
  const Stats s_high = dataset_stats(high_vals);
  const Stats s_low = dataset_stats(low_vals);

  double lo = std::min({ s_orig.min, s_high.min, s_low.min });
  double hi = std::max({ s_orig.max, s_high.max, s_low.max });
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const auto h_orig = histogram(original, cfg.histogram_bins, lo, hi);
  const auto h_high = histogram(high_vals, cfg.histogram_bins, lo, hi);
  const auto h_low = histogram(low_vals, cfg.histogram_bins, lo, hi);

  auto count_if = [](const std::vector<double> &v, auto pred) {
    return static_cast<long>(std::count_if(v.begin(), v.end(), pred));
  };

  json report;
  report["format"] = "moldream-report v1";
  report["seed"] = cfg.seed;
  report["config"] = config_echo(cfg, oracle->describe());
  report["dataset"] = {
    { "lines", ds.lines_read },
    { "entries", ds.size() },
    { "skipped", static_cast<long>(ds.skips.size()) },
    { "dreamed", static_cast<long>(starts.size()) },
    { "scored", static_cast<long>(original.size()) },
  };
  {
    json training = {
      { "pretrained", pretrained != nullptr },
      { "epochs", static_cast<long>(result.training.history.size()) },
      { "train_size", static_cast<long>(result.training.split.train.size()) },
      { "validation_size",
        static_cast<long>(result.training.split.validation.size()) },
      { "label_mean", model.scaler().mean },
      { "label_std", model.scaler().std },
      { "model_checksum", hex64(model.checksum()) },
    };
    if (!result.training.history.empty()) {
      const EpochRecord &last = result.training.history.back();
      training["final_train_mse"] = last.train_mse;
      training["final_validation_mse"] =
          std::isfinite(last.validation_mse) ? json(last.validation_mse)
                                             : json(nullptr);
    }
    report["training"] = training;
  }
  report["targets"] = { { "high", target_high }, { "low", target_low } };
  report["stats"] = {
    { "original", stats_json(s_orig) },
    { "dreamed_high", stats_json(s_high) },
    { "dreamed_low", stats_json(s_low) },
  };
  report["extremes"] = {
    { "original_min", s_orig.min },
    { "original_max", s_orig.max },
    { "high_above_original_max",
      count_if(high_vals, [&](double v) { return v > s_orig.max; }) },
    { "high_below_original_min",
      count_if(high_vals, [&](double v) { return v < s_orig.min; }) },
    { "low_above_original_max",
      count_if(low_vals, [&](double v) { return v > s_orig.max; }) },
    { "low_below_original_min",
      count_if(low_vals, [&](double v) { return v < s_orig.min; }) },
  };
  report["changed"] = { { "high", changed_high }, { "low", changed_low } };
  report["terminations"] = { { "high", term_high }, { "low", term_low } };

  json bins = json::array();
  for (int b = 0; b < cfg.histogram_bins; ++b) {
    bins.push_back({ { "bin_lo", h_orig[b].lo },
                     { "bin_hi", h_orig[b].hi },
                     { "original", h_orig[b].count },
                     { "dreamed_high", h_high[b].count },
                     { "dreamed_low", h_low[b].count } });
  }
  report["histogram"] = bins;
  report["composition"] = {
    { "high", shift_json(composition_shift(high_trajs)) },
    { "low", shift_json(composition_shift(low_trajs)) },
  };
  report["values"] = {
    { "original", original },
    { "dreamed_high", high_vals },
    { "dreamed_low", low_vals },
  };
  report["failures"] = failures;

  result.report_json = report.dump(2) + "\n";
  return result;
}

// Output files ----------------------------------------------------------------

void write_trajectory_jsonl(std::ostream &os, const DreamTrajectory &traj,
                            std::string_view arm, int molecule) {
  for (const DreamStep &step: traj.steps) {
    json j {
      { "arm", arm },
      { "molecule", molecule },
      { "epoch", step.epoch },
      { "tokens", to_text(step.tokens) },
      { "smiles", write_smiles(step.graph) },
      { "predicted", step.prediction },
      { "loss", step.loss },
    };
    os << j.dump() << '\n';
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path &p) {
  std::ofstream os(p, std::ios::binary);
  if (!os)
    throw IoError("cannot write " + p.string());
  return os;
}

}  // namespace

void write_experiment_outputs(const ExperimentResult &result,
                              const std::string &out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  {
    auto os = open_out(dir / "report.json");
    os << result.report_json;
  }

  const json report = json::parse(result.report_json);
  {
    auto os = open_out(dir / "histograms.csv");
    os << "bin_lo,bin_hi,original,dreamed_high,dreamed_low\n";
    for (const auto &b: report["histogram"]) {
      os << format_double(b["bin_lo"].get<double>()) << ','
         << format_double(b["bin_hi"].get<double>()) << ','
         << b["original"].get<long>() << ',' << b["dreamed_high"].get<long>()
         << ',' << b["dreamed_low"].get<long>() << '\n';
    }
  }
  {
    auto os = open_out(dir / "stats.csv");
    os << "distribution,count,mean,std,min,max\n";
    for (const char *name: { "original", "dreamed_high", "dreamed_low" }) {
      const auto &s = report["stats"][name];
      os << name << ',' << s["count"].get<long>() << ','
         << format_double(s["mean"].get<double>()) << ','
         << format_double(s["std"].get<double>()) << ','
         << format_double(s["min"].get<double>()) << ','
         << format_double(s["max"].get<double>()) << '\n';
    }
  }
  {
    auto os = open_out(dir / "trajectories.jsonl");
    for (const ArmResult *arm: { &result.high, &result.low }) {
      for (size_t i = 0; i < arm->outcomes.size(); ++i) {
        if (arm->outcomes[i].ok())
          write_trajectory_jsonl(os, *arm->outcomes[i].trajectory, arm->name,
                                 static_cast<int>(i));
      }
    }
  }
  {
    auto os = open_out(dir / "skips.txt");
    os << "# line\treason\ttext\n";
    for (const SkipRecord &s: result.dataset.skips)
      os << s.line << '\t' << s.reason << '\t' << s.text << '\n';
  }
  {
    auto os = open_out(dir / "training.csv");
    os << "epoch,train_mse,validation_mse\n";
    for (const EpochRecord &r: result.training.history) {
      os << r.epoch << ',' << format_double(r.train_mse) << ','
         << (std::isfinite(r.validation_mse) ? format_double(r.validation_mse)
                                             : std::string())
         << '\n';
    }
  }
  save_mlp(result.training.model, (dir / "model.txt").string());
}

}  // namespace moldream

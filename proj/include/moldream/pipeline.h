//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDREAM_PIPELINE_H_
#define MOLDREAM_PIPELINE_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moldream/config.h"
#include "moldream/dream.h"
#include "moldream/mlp.h"
#include "moldream/molgraph.h"
#include "moldream/oracle.h"
#include "moldream/selfies.h"

namespace moldream {

struct DatasetEntry {
  MolecularGraph graph;
  TokenSequence tokens;
  std::string key;
  std::string smiles;  // as written in the source file
  int line = 0;
  double label = 0.0;
};

struct SkipRecord {
  int line;
  std::string reason;  // error kind, e.g. "UnsupportedFeature"
  std::string text;
};

struct Dataset {
  std::vector<DatasetEntry> entries;
  std::vector<SkipRecord> skips;
  int lines_read = 0;  // non-blank, non-comment lines

  int size() const { return static_cast<int>(entries.size()); }
  std::vector<double> labels() const;
  std::vector<MolecularGraph> graphs() const;
};

/// One SMILES per line (first whitespace-separated field), `#` comments and
/// blank lines ignored. Unparseable, unencodable, unlabeled and duplicate
/// molecules are skipped and reported. Survivors are ordered by heavy-atom
/// count, then token length, then canonical key, and the first n_smallest
/// are kept and labeled.
///
/// Throws IoError if the file cannot be read and EmptyInputError if nothing
/// survives.
Dataset ingest(const std::string &path, int n_smallest, int max_length,
               const PropertyOracle &oracle);
Dataset ingest_text(std::string_view text, int n_smallest, int max_length,
                    const PropertyOracle &oracle);

struct HistogramBin {
  double lo;
  double hi;
  long count;
};

/// Equal-width bins over [lo, hi]; bins are left-closed and right-open
/// except the last, which is closed. Values outside the range go to the end
/// bins. Throws BadRangeError for bins < 1 or lo >= hi.
std::vector<HistogramBin> histogram(std::span<const double> values, int bins,
                                    double lo, double hi);

struct ElementShift {
  double before = 0.0;
  double after = 0.0;
  double delta = 0.0;
};

/// Mean heavy-atom counts per element and mean implicit hydrogens.
struct CompositionShift {
  std::array<ElementShift, kNumElements> elements {};
  ElementShift hydrogens;
  long molecules = 0;

  const ElementShift &of(Element e) const {
    return elements[element_index(e)];
  }
};

/// Throws EmptyInputError when there is nothing to average.
CompositionShift composition_shift(std::span<const MolecularGraph> before,
                                   std::span<const MolecularGraph> after);
CompositionShift composition_shift(std::span<const DreamTrajectory> trajs);

/// Reads trajectories.jsonl and returns the shift per arm, comparing the
/// first and last recorded step of every (arm, molecule) pair.
std::map<std::string, CompositionShift> probe_trajectories(std::istream &is);

enum class DreamSplit {
  kAll,
  kTrain,
  kValidation,
};

struct ExperimentConfig {
  std::string dataset_path;
  std::string property_table_path;  // empty: built-in defaults
  std::string labels_path;          // empty: surrogate labels
  int n_smallest = 10000;
  int max_length = kDefaultMaxLength;
  std::uint64_t seed = 0;
  TrainConfig train;
  DreamConfig dream;  // target is ignored; see target_high / target_low
  std::optional<double> target_high;
  std::optional<double> target_low;
  DreamSplit split = DreamSplit::kAll;
  int histogram_bins = 30;
  int threads = 0;  // 0: OpenMP default

  /// Reads the keys documented in the README; unknown keys are rejected.
  static ExperimentConfig from_config(const KeyValueConfig &kv,
                                      const std::string &base_dir = "");

  std::unique_ptr<PropertyOracle> make_oracle() const;
};

struct ArmResult {
  std::string name;  // "high" or "low"
  double target = 0.0;
  std::vector<DreamOutcome> outcomes;  // aligned with ExperimentResult::dreamed
};

struct ExperimentResult {
  Dataset dataset;
  std::vector<int> dreamed;  // dataset indices that were dreamed
  TrainResult training;
  ArmResult high;
  ArmResult low;
  std::string report_json;
};

/// ingest -> train -> dream towards both targets -> score final molecules
/// with the oracle -> report. A pretrained model skips the training step.
ExperimentResult run_experiment(const ExperimentConfig &cfg,
                                const Mlp *pretrained = nullptr);

/// Writes report.json, histograms.csv, stats.csv, trajectories.jsonl,
/// skips.txt, training.csv and model.txt into out_dir (created if needed).
void write_experiment_outputs(const ExperimentResult &result,
                              const std::string &out_dir);

void write_trajectory_jsonl(std::ostream &os, const DreamTrajectory &traj,
                            std::string_view arm, int molecule);

// Training inputs for every entry of a dataset.
TrainingSet to_training_set(const Dataset &ds, int max_length);

}  // namespace moldream

#endif  // MOLDREAM_PIPELINE_H_

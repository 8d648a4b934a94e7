//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDREAM_DREAM_H_
#define MOLDREAM_DREAM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moldream/mlp.h"
#include "moldream/molgraph.h"
#include "moldream/selfies.h"

namespace moldream {

struct DreamConfig {
  double target = 0.0;  // raw property units
  double learning_rate = 0.1;
  int max_epochs = 500;
  double grad_tolerance = 1e-6;
  double noise_upper_bound = 0.9;
  std::uint64_t seed = 0;
  // Draw fresh noise around the current argmax encoding after every update
  // instead of keeping the single perturbation from epoch 0.
  bool renoise_each_epoch = false;

  // Throws ConfigError.
  void validate() const;
};

enum class Termination {
  kGradientVanished,
  kMaxEpochs,
};

const char *to_string(Termination t);

struct DreamStep {
  int epoch;
  TokenSequence tokens;
  MolecularGraph graph;
  std::string key;
  double prediction;  // raw units
  double loss;        // standardized units
};

/// Distinct molecules visited while descending on the input. Step 0 is the
/// decode of the noised starting encoding; later steps are only added when
/// the canonical key changes.
struct DreamTrajectory {
  std::vector<DreamStep> steps;
  OneHotMatrix final_input;
  Termination termination = Termination::kMaxEpochs;
  int epochs_run = 0;
  double final_prediction = 0.0;
  double final_loss = 0.0;
  // Loss at every epoch including 0.
  std::vector<double> loss_history;

  const DreamStep &initial() const { return steps.front(); }
  const DreamStep &final() const { return steps.back(); }
};

/// Replaces every 0.0 entry by an independent draw from
/// [0, upper_bound); 1.0 entries are kept. Throws NotOneHotError if `x`
/// is not an exact one-hot matrix and ConfigError for a bound outside
/// [0, 1).
OneHotMatrix inject_noise(const OneHotMatrix &x, double upper_bound,
                          std::uint64_t seed);

/// Gradient descent on the network input towards cfg.target with the
/// weights held fixed. Throws EncodingError if `start` cannot be encoded
/// within the model's input length.
DreamTrajectory dream(const Mlp &m, const MolecularGraph &start,
                      const DreamConfig &cfg);

struct DreamOutcome {
  std::optional<DreamTrajectory> trajectory;
  std::string error;

  bool ok() const { return trajectory.has_value(); }
};

/// Seed used for one molecule of a batch. Derived from the molecule itself so
/// that results do not depend on list position.
std::uint64_t item_seed(std::uint64_t seed, const CanonicalKey &key);

/// Dreams every molecule independently with item_seed(cfg.seed, key);
/// results are aligned with the input. Per-molecule errors are recorded in
/// the outcome instead of being thrown.
std::vector<DreamOutcome> dream_set(const Mlp &m,
                                    std::span<const MolecularGraph> graphs,
                                    const DreamConfig &cfg);

// Token length the model was built for.
int model_max_length(const Mlp &m);

}  // namespace moldream

#endif  // MOLDREAM_DREAM_H_

//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldream/dream.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "moldream/error.h"
#include "moldream/rng.h"

namespace moldream {

const char *to_string(Termination t) {
  switch (t) {
  case Termination::kGradientVanished:
    return "GradientVanished";
  case Termination::kMaxEpochs:
    return "MaxEpochs";
  }
  return "Unknown";
}

void DreamConfig::validate() const {
  if (!std::isfinite(target))
    throw ConfigError("dream target must be finite");
  if (!(learning_rate >= 0) || !std::isfinite(learning_rate))
    throw ConfigError("dream learning_rate must not be negative");
  if (max_epochs < 1)
    throw ConfigError("dream max_epochs must be at least 1");
  if (!(grad_tolerance > 0))
    throw ConfigError("dream grad_tolerance must be positive");
  if (!(noise_upper_bound >= 0 && noise_upper_bound < 1))
    throw ConfigError("noise upper bound must lie in [0, 1)");
}

OneHotMatrix inject_noise(const OneHotMatrix &x, double upper_bound,
                          std::uint64_t seed) {
  if (!(upper_bound >= 0 && upper_bound < 1))
    throw ConfigError("noise upper bound must lie in [0, 1)");
  if (!x.is_exact_onehot())
    throw NotOneHotError("noise can only be injected into a one-hot matrix");

  OneHotMatrix out = x;
  std::mt19937_64 rng(seed);
  for (double &v: out.flat()) {
    if (v == 0.0)
      v = upper_bound * uniform01(rng);
  }
  return out;
}

std::uint64_t item_seed(std::uint64_t seed, const CanonicalKey &key) {
  return splitmix64(seed ^ fnv1a64(key.text));
}

int model_max_length(const Mlp &m) {
  if (m.input_size() % kAlphabetSize != 0)
    throw ShapeMismatchError("model input is not a token matrix");
  return m.input_size() / kAlphabetSize;
}

namespace {

struct Lane {
  DreamTrajectory traj;
  OneHotMatrix x;
  std::uint64_t seed = 0;
  std::mt19937_64 rng;
  TokenSequence last_tokens;
  int epoch = 0;
  bool done = false;
};

void observe(Lane &lane, double prediction, double loss,
             const LabelScaler &scaler) {
  lane.traj.loss_history.push_back(loss);
  lane.traj.final_prediction = scaler.denormalize(prediction);
  lane.traj.final_loss = loss;
  lane.traj.epochs_run = lane.epoch;

  TokenSequence tokens = from_onehot_argmax(lane.x);
  if (!lane.traj.steps.empty() && tokens == lane.last_tokens)
    return;
  MolecularGraph g = decode(tokens);
  std::string key = canonical_key(g).text;
  lane.last_tokens = tokens;
  if (!lane.traj.steps.empty() && lane.traj.steps.back().key == key)
    return;
  lane.traj.steps.push_back({ lane.epoch, std::move(tokens), std::move(g),
                              std::move(key), scaler.denormalize(prediction),
                              loss });
}

// Advances all lanes in lockstep so the frozen weights are shared by one
// batched forward/backward per epoch. Each lane's arithmetic is independent
// of the others (row-wise kernels), so batching does not change results.
void run_lanes(const Mlp &m, std::vector<Lane> &lanes, const DreamConfig &cfg) {
  const double target = m.scaler().normalize(cfg.target);
  const int width = m.input_size();
  std::vector<int> active;
  for (int i = 0; i < static_cast<int>(lanes.size()); ++i)
    active.push_back(i);

  std::vector<double> x, dpred;
  while (!active.empty()) {
    const int batch = static_cast<int>(active.size());
    x.resize(static_cast<size_t>(batch) * width);
    for (int r = 0; r < batch; ++r) {
      auto src = lanes[active[r]].x.flat();
      std::copy(src.begin(), src.end(), x.begin() + static_cast<ptrdiff_t>(r) * width);
    }

    const ForwardCache cache = forward_batch(m, x, batch);
    dpred.resize(batch);
    for (int r = 0; r < batch; ++r)
      dpred[r] = 2.0 * (cache.output()[r] - target);
    const std::vector<double> grad = input_gradient(m, cache, dpred);

#pragma omp parallel for schedule(dynamic, 4)
    for (int r = 0; r < batch; ++r) {
      Lane &lane = lanes[active[r]];
      const double err = cache.output()[r] - target;
      observe(lane, cache.output()[r], err * err, m.scaler());

      const double *g = grad.data() + static_cast<ptrdiff_t>(r) * width;
      double gmax = 0.0;
      for (int i = 0; i < width; ++i)
        gmax = std::max(gmax, std::abs(g[i]));
      if (gmax < cfg.grad_tolerance) {
        lane.traj.termination = Termination::kGradientVanished;
        lane.done = true;
        continue;
      }
      if (lane.epoch >= cfg.max_epochs) {
        lane.traj.termination = Termination::kMaxEpochs;
        lane.done = true;
        continue;
      }

      auto xs = lane.x.flat();
      for (int i = 0; i < width; ++i)
        xs[i] -= cfg.learning_rate * g[i];
      if (cfg.renoise_each_epoch) {
        lane.x = inject_noise(to_onehot(from_onehot_argmax(lane.x),
                                        lane.x.rows()),
                              cfg.noise_upper_bound, lane.rng());
      }
      ++lane.epoch;
    }

    std::erase_if(active, [&](int i) { return lanes[i].done; });
  }

  for (Lane &lane: lanes)
    lane.traj.final_input = std::move(lane.x);
}

Lane make_lane(const MolecularGraph &start, int max_length,
               const DreamConfig &cfg, std::uint64_t seed) {
  Lane lane;
  lane.seed = seed;
  lane.rng.seed(splitmix64(seed));
  lane.x = inject_noise(to_onehot(encode(start, max_length), max_length),
                        cfg.noise_upper_bound, seed);
  return lane;
}

}  // namespace

DreamTrajectory dream(const Mlp &m, const MolecularGraph &start,
                      const DreamConfig &cfg) {
  cfg.validate();
  std::vector<Lane> lanes;
  lanes.push_back(make_lane(start, model_max_length(m), cfg, cfg.seed));
  run_lanes(m, lanes, cfg);
  return std::move(lanes.front().traj);
}

std::vector<DreamOutcome> dream_set(const Mlp &m,
                                    std::span<const MolecularGraph> graphs,
                                    const DreamConfig &cfg) {
  cfg.validate();
  const int max_length = model_max_length(m);

  std::vector<DreamOutcome> out(graphs.size());
  std::vector<Lane> lanes;
  std::vector<size_t> owner;
  for (size_t i = 0; i < graphs.size(); ++i) {
    try {
      const std::uint64_t seed = item_seed(cfg.seed, canonical_key(graphs[i]));
      lanes.push_back(make_lane(graphs[i], max_length, cfg, seed));
      owner.push_back(i);
    } catch (const Error &e) {
      out[i].error = e.what();
    }
  }

  run_lanes(m, lanes, cfg);
  for (size_t j = 0; j < lanes.size(); ++j)
    out[owner[j]].trajectory = std::move(lanes[j].traj);
  return out;
}

}  // namespace moldream

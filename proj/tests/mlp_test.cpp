//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldream/mlp.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "moldream/error.h"
#include "moldream/rng.h"

namespace moldream {
namespace {

using kernels::Mode;

std::vector<double> random_vector(std::mt19937_64 &rng, size_t n) {
  std::vector<double> v(n);
  for (double &x: v)
    x = uniform(rng, -1, 1);
  return v;
}

void randomize_biases(Mlp &m, std::mt19937_64 &rng) {
  for (int l = 0; l < m.num_layers(); ++l)
    for (double &b: m.mutable_layer(l).bias)
      b = uniform(rng, -0.5, 0.5);
  m.sync();
}

bool close(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  return diff <= 1e-6
         || diff <= 1e-4 * std::max(std::abs(analytic), std::abs(numeric));
}

TEST(MlpInitTest, Deterministic) {
  Mlp a = Mlp::init({ 6, 5, 4, 1 }, 3);
  Mlp b = Mlp::init({ 6, 5, 4, 1 }, 3);
  Mlp c = Mlp::init({ 6, 5, 4, 1 }, 4);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.checksum(), b.checksum());
  EXPECT_FALSE(a == c);
  EXPECT_NE(a.checksum(), c.checksum());

  for (int l = 0; l < a.num_layers(); ++l) {
    const DenseLayer &layer = a.layer(l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (double w: layer.weights) {
      EXPECT_LT(std::abs(w), bound);
    }
    for (double v: layer.bias)
      EXPECT_EQ(v, 0.0);
  }
  EXPECT_THROW(Mlp({ 4, 3, 2 }), ShapeMismatchError);
}

TEST(MlpForwardTest, ZeroWeights) {
  Mlp m({ 5, 4, 1 });
  std::vector<double> x = { 1, -2, 3, 0.5, 7 };
  EXPECT_EQ(forward(m, x).value, 0.0);
  m.mutable_layer(1).bias[0] = 1.25;
  m.sync();
  EXPECT_EQ(forward(m, x).value, 1.25);
}

TEST(MlpForwardTest, HandComputedChain) {
  Mlp m({ 4, 3, 1 });
  // Row k holds the outgoing weights of input unit k.
  m.mutable_layer(0).weights = { 0.5, -1.0, 0.0,  //
                                 0.25, 0.5, 1.0,  //
                                 -0.5, 0.0, 2.0,  //
                                 1.0, 1.0, -1.0 };
  m.mutable_layer(0).bias = { 0.1, -0.2, 0.3 };
  m.mutable_layer(1).weights = { 2.0, -1.0, 0.5 };
  m.mutable_layer(1).bias = { 0.05 };
  m.sync();

  std::vector<double> x = { 1.0, 2.0, -1.0, 0.5 };
  // h = relu(x W + b)
  //   = relu(0.5 + 0.5 + 0.5 + 0.5 + 0.1, -1 + 1 + 0 + 0.5 - 0.2,
  //          0 + 2 - 2 - 0.5 + 0.3)
  //   = (2.1, 0.3, 0)
  // y = 2 * 2.1 - 0.3 + 0 + 0.05 = 3.95
  EXPECT_NEAR(forward(m, x).value, 3.95, 1e-12);
  EXPECT_NEAR(forward(m, x, Mode::kReference).value, 3.95, 1e-12);

  Mlp lin({ 4, 3, 1 }, Activation::kIdentity);
  for (int l = 0; l < 2; ++l)
    lin.mutable_layer(l) = m.layer(l);
  lin.sync();
  // Without the rectifier the third unit contributes 0.5 * -0.2.
  EXPECT_NEAR(forward(lin, x).value, 3.85, 1e-12);
}

TEST(MlpForwardTest, Errors) {
  Mlp m = Mlp::init({ 3, 2, 1 }, 1);
  std::vector<double> bad = { 1, 2 };
  EXPECT_THROW(forward(m, bad), ShapeMismatchError);
  std::vector<double> inf = { 1, NAN, 2 };
  EXPECT_THROW(forward(m, inf), NumericError);
}

TEST(MlpForwardTest, BatchMatchesSingleRows) {
  std::mt19937_64 rng(67);
  Mlp m = Mlp::init({ 24, 16, 8, 1 }, 5);
  randomize_biases(m, rng);
  const int batch = 37;
  auto x = random_vector(rng, batch * 24);
  ForwardCache par = forward_batch(m, x, batch, Mode::kParallel);
  ForwardCache ref = forward_batch(m, x, batch, Mode::kReference);
  for (int i = 0; i < batch; ++i) {
    std::span<const double> row(x.data() + i * 24, 24);
    EXPECT_EQ(forward(m, row).value, par.output()[i]);
    EXPECT_EQ(ref.output()[i], par.output()[i]);
  }
}

TEST(MlpBackwardTest, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(71);
  Mlp m = Mlp::init({ 5, 4, 3, 1 }, 9);
  auto x = random_vector(rng, 5);
  Prediction p = forward(m, x);
  GradientBundle g = backward(m, p.cache, 0.0);
  for (const auto &w: g.weights)
    for (double v: w)
      EXPECT_EQ(v, 0.0);
  for (const auto &b: g.biases)
    for (double v: b)
      EXPECT_EQ(v, 0.0);
  for (double v: g.input)
    EXPECT_EQ(v, 0.0);
}

TEST(MlpBackwardTest, FiniteDifferences) {
  std::mt19937_64 rng(73);
  const double eps = 1e-5;
  long checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> dims { 2 + static_cast<int>(rng() % 5) };
    const int hidden = 1 + static_cast<int>(rng() % 3);
    for (int h = 0; h < hidden; ++h)
      dims.push_back(2 + static_cast<int>(rng() % 4));
    dims.push_back(1);
    const Activation act =
        trial % 4 == 3 ? Activation::kIdentity : Activation::kRelu;
    Mlp m = Mlp::init(dims, trial, act);
    randomize_biases(m, rng);
    auto x = random_vector(rng, dims[0]);
    const double target = uniform(rng, -1, 1);

    auto loss = [&](const Mlp &net, std::span<const double> in) {
      const double e = forward(net, in).value - target;
      return e * e;
    };

    Prediction p = forward(m, x);
    const Mode mode = trial % 2 == 0 ? Mode::kParallel : Mode::kReference;
    GradientBundle g = backward(m, p.cache, 2 * (p.value - target), mode);

    for (size_t k = 0; k < x.size(); ++k) {
      auto xp = x, xm = x;
      xp[k] += eps;
      xm[k] -= eps;
      const double numeric = (loss(m, xp) - loss(m, xm)) / (2 * eps);
      EXPECT_PRED2(close, g.input[k], numeric) << trial << " input " << k;
      ++checked;
    }
    for (int l = 0; l < m.num_layers(); ++l) {
      for (size_t k = 0; k < m.layer(l).weights.size(); ++k) {
        Mlp mp = m, mm = m;
        mp.mutable_layer(l).weights[k] += eps;
        mm.mutable_layer(l).weights[k] -= eps;
        mp.sync();
        mm.sync();
        const double numeric = (loss(mp, x) - loss(mm, x)) / (2 * eps);
        EXPECT_PRED2(close, g.weights[l][k], numeric)
            << trial << " w" << l << " " << k;
        ++checked;
      }
      for (size_t k = 0; k < m.layer(l).bias.size(); ++k) {
        Mlp mp = m, mm = m;
        mp.mutable_layer(l).bias[k] += eps;
        mm.mutable_layer(l).bias[k] -= eps;
        mp.sync();
        mm.sync();
        const double numeric = (loss(mp, x) - loss(mm, x)) / (2 * eps);
        EXPECT_PRED2(close, g.biases[l][k], numeric)
            << trial << " b" << l << " " << k;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 2000);
}

TEST(MlpBackwardTest, LinearNetInputGradientIsWeightProduct) {
  std::mt19937_64 rng(79);
  Mlp m = Mlp::init({ 6, 4, 3, 1 }, 2, Activation::kIdentity);
  randomize_biases(m, rng);
  auto x = random_vector(rng, 6);
  const double upstream = -1.7;

  // v = W0 W1 W2 (6 x 1)
  std::vector<double> v = { 1.0 };
  for (int l = m.num_layers() - 1; l >= 0; --l) {
    const DenseLayer &layer = m.layer(l);
    std::vector<double> next(layer.in, 0.0);
    for (int i = 0; i < layer.in; ++i)
      for (int j = 0; j < layer.out; ++j)
        next[i] += layer.weights[i * layer.out + j] * v[j];
    v = next;
  }
  Prediction p = forward(m, x);
  std::vector<double> d = { upstream };
  std::vector<double> g = input_gradient(m, p.cache, d);
  ASSERT_EQ(g.size(), 6u);
  for (int i = 0; i < 6; ++i)
    EXPECT_NEAR(g[i], v[i] * upstream, 1e-12);
}

TEST(MlpBackwardTest, BatchedRowsAreIndependent) {
  std::mt19937_64 rng(83);
  Mlp m = Mlp::init({ 12, 7, 1 }, 6);
  const int batch = 5;
  auto x = random_vector(rng, batch * 12);
  auto d = random_vector(rng, batch);
  ForwardCache cache = forward_batch(m, x, batch);
  std::vector<double> g = input_gradient(m, cache, d);
  for (int i = 0; i < batch; ++i) {
    std::span<const double> row(x.data() + i * 12, 12);
    Prediction p = forward(m, row);
    std::vector<double> one = { d[i] };
    std::vector<double> gi = input_gradient(m, p.cache, one);
    for (int k = 0; k < 12; ++k)
      EXPECT_EQ(g[i * 12 + k], gi[k]);
  }
}

TrainingSet linear_data(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TrainingSet data;
  for (int i = 0; i < n; ++i) {
    auto x = random_vector(rng, 4);
    data.add(x, 2 * x[0] - x[1] + 0.5 * x[3] + 0.1 * uniform(rng, -1, 1));
  }
  return data;
}

TEST(TrainTest, SplitIndices) {
  DataSplit s = split_indices(10, 0.8, 1);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.validation.size(), 2u);
  std::vector<int> all = s.train;
  all.insert(all.end(), s.validation.begin(), s.validation.end());
  std::sort(all.begin(), all.end());
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(all[i], i);
  EXPECT_EQ(split_indices(2, 0.8, 1).train.size(), 1u);
  EXPECT_EQ(split_indices(10, 0.8, 1).train, s.train);
}

TEST(TrainTest, DeterministicAndZeroEpochs) {
  TrainingSet data = linear_data(60, 3);
  TrainConfig cfg;
  cfg.hidden = { 8, 8 };
  cfg.epochs = 20;
  cfg.batch_size = 16;
  cfg.seed = 12;
  TrainResult a = train(data, cfg);
  TrainResult b = train(data, cfg);
  ASSERT_EQ(a.history.size(), 20u);
  for (size_t e = 0; e < a.history.size(); ++e) {
    EXPECT_EQ(a.history[e].epoch, static_cast<int>(e) + 1);
    EXPECT_EQ(a.history[e].train_mse, b.history[e].train_mse);
    EXPECT_EQ(a.history[e].validation_mse, b.history[e].validation_mse);
  }
  EXPECT_TRUE(a.model == b.model);
  EXPECT_LT(a.history.back().train_mse, a.history.front().train_mse);

  cfg.epochs = 0;
  TrainResult z = train(data, cfg);
  EXPECT_TRUE(z.history.empty());
  Mlp init = Mlp::init({ 4, 8, 8, 1 }, cfg.seed);
  for (int l = 0; l < init.num_layers(); ++l) {
    EXPECT_EQ(z.model.layer(l).weights, init.layer(l).weights);
    EXPECT_EQ(z.model.layer(l).bias, init.layer(l).bias);
  }
}

TEST(TrainTest, ConvexLossIsMonotone) {
  TrainingSet data = linear_data(10, 5);
  TrainConfig cfg;
  cfg.hidden = {};
  cfg.activation = Activation::kIdentity;
  cfg.train_fraction = 0.2;  // two training points, one full batch
  cfg.batch_size = 16;
  cfg.learning_rate = 0.01;
  cfg.epochs = 100;
  TrainResult r = train(data, cfg);
  ASSERT_EQ(r.split.train.size(), 2u);
  for (size_t e = 1; e < r.history.size(); ++e)
    EXPECT_LE(r.history[e].train_mse, r.history[e - 1].train_mse) << e;
  EXPECT_LT(r.history.back().train_mse, r.history.front().train_mse);
}

TEST(TrainTest, Errors) {
  TrainingSet data;
  std::vector<double> x = { 1, 0 };
  data.add(x, 3.0);
  TrainConfig cfg;
  cfg.hidden = { 2 };
  EXPECT_THROW(train(data, cfg), EmptyInputError);
  data.add(x, 3.0);
  data.add(x, 3.0);
  EXPECT_THROW(train(data, cfg), DegenerateLabelsError);
  std::vector<double> wide = { 1, 0, 0 };
  EXPECT_THROW(data.add(wide, 1.0), ShapeMismatchError);

  cfg.learning_rate = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.train_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ModelFileTest, RoundTripIsBitExact) {
  std::mt19937_64 rng(89);
  Mlp m = Mlp::init({ 7, 5, 3, 1 }, 21);
  randomize_biases(m, rng);
  m.mutable_layer(0).weights[3] = 1e-310;  // subnormal
  m.mutable_layer(1).weights[0] = -0.1;
  m.sync();
  m.set_scaler({ 0.3305, 0.9452 });
  std::stringstream ss;
  save_mlp(m, ss);
  EXPECT_EQ(ss.str().rfind("moldream-mlp v1\n", 0), 0u);
  Mlp back = load_mlp(ss);
  EXPECT_TRUE(back == m);
  EXPECT_EQ(back.checksum(), m.checksum());

  std::stringstream again;
  save_mlp(back, again);
  EXPECT_EQ(again.str(), ss.str());

  std::stringstream bad("moldream-mlp v2\n");
  EXPECT_THROW(load_mlp(bad), Error);
  std::string text = ss.str();
  std::stringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(load_mlp(truncated), Error);
}

}  // namespace
}  // namespace moldream

//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldream/mlp.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "moldream/config.h"
#include "moldream/error.h"
#include "moldream/rng.h"

namespace moldream {

const char *to_string(Activation a) {
  switch (a) {
  case Activation::kRelu:
    return "relu";
  case Activation::kIdentity:
    return "identity";
  }
  return "unknown";
}

Mlp::Mlp(std::vector<int> dims, Activation hidden)
    : dims_(std::move(dims)), hidden_(hidden) {
  if (dims_.size() < 2 || dims_.back() != 1)
    throw ShapeMismatchError("dimension chain must end in a scalar output");
  for (int d: dims_) {
    if (d <= 0)
      throw ShapeMismatchError("layer widths must be positive");
  }
  for (size_t l = 0; l + 1 < dims_.size(); ++l) {
    DenseLayer layer;
    layer.in = dims_[l];
    layer.out = dims_[l + 1];
    layer.weights.assign(static_cast<size_t>(layer.in) * layer.out, 0.0);
    layer.bias.assign(layer.out, 0.0);
    layers_.push_back(std::move(layer));
  }
  sync();
}

Mlp Mlp::init(std::vector<int> dims, std::uint64_t seed, Activation hidden) {
  Mlp m(std::move(dims), hidden);
  std::mt19937_64 rng(seed);
  for (DenseLayer &layer: m.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (double &w: layer.weights)
      w = uniform(rng, -bound, bound);
  }
  m.sync();
  return m;
}

void Mlp::sync() {
  transposed_.resize(layers_.size());
  for (size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer &layer = layers_[l];
    transposed_[l].resize(layer.weights.size());
    kernels::transpose(layer.weights, transposed_[l], layer.in, layer.out);
  }
}

std::uint64_t Mlp::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    h = fnv1a64(std::string_view(reinterpret_cast<const char *>(&bits),
                                 sizeof(bits)),
                h);
  };
  for (const DenseLayer &layer: layers_) {
    for (double w: layer.weights)
      mix(w);
    for (double b: layer.bias)
      mix(b);
  }
  mix(scaler_.mean);
  mix(scaler_.std);
  return h;
}

bool Mlp::all_finite() const {
  for (const DenseLayer &layer: layers_) {
    for (double w: layer.weights) {
      if (!std::isfinite(w))
        return false;
    }
    for (double b: layer.bias) {
      if (!std::isfinite(b))
        return false;
    }
  }
  return true;
}

bool operator==(const Mlp &a, const Mlp &b) {
  if (a.dims_ != b.dims_ || a.hidden_ != b.hidden_ || !(a.scaler_ == b.scaler_))
    return false;
  for (size_t l = 0; l < a.layers_.size(); ++l) {
    if (a.layers_[l].weights != b.layers_[l].weights
        || a.layers_[l].bias != b.layers_[l].bias) {
      return false;
    }
  }
  return true;
}

// Forward / backward ----------------------------------------------------------

ForwardCache forward_batch(const Mlp &m, std::span<const double> x, int batch,
                           kernels::Mode mode) {
  if (batch <= 0
      || x.size() != static_cast<size_t>(batch) * m.input_size()) {
    throw ShapeMismatchError("input of size " + std::to_string(x.size())
                             + " does not match " + std::to_string(batch)
                             + " x " + std::to_string(m.input_size()));
  }
  for (double v: x) {
    if (!std::isfinite(v))
      throw NumericError("non-finite network input");
  }

  ForwardCache cache;
  cache.batch = batch;
  cache.activations.reserve(m.num_layers() + 1);
  cache.activations.emplace_back(x.begin(), x.end());
  for (int l = 0; l < m.num_layers(); ++l) {
    const DenseLayer &layer = m.layer(l);
    std::vector<double> y(static_cast<size_t>(batch) * layer.out);
    const kernels::Shape s { batch, layer.in, layer.out };
    if (mode == kernels::Mode::kReference)
      kernels::reference::affine(cache.activations.back(), layer.weights,
                                 layer.bias, y, s);
    else
      kernels::parallel::affine(cache.activations.back(), layer.weights,
                                layer.bias, y, s);
    if (l + 1 < m.num_layers() && m.hidden_activation() == Activation::kRelu)
      kernels::relu(y);
    cache.activations.push_back(std::move(y));
  }
  return cache;
}

Prediction forward(const Mlp &m, std::span<const double> x,
                   kernels::Mode mode) {
  ForwardCache cache = forward_batch(m, x, 1, mode);
  const double value = cache.output()[0];
  return { value, std::move(cache) };
}

namespace {

GradientBundle backward_impl(const Mlp &m, const ForwardCache &cache,
                             std::span<const double> dloss_dpred,
                             kernels::Mode mode, bool want_params,
                             bool want_input) {
  const int batch = cache.batch;
  if (cache.activations.size() != static_cast<size_t>(m.num_layers()) + 1
      || dloss_dpred.size() != static_cast<size_t>(batch)) {
    throw ShapeMismatchError("cache does not belong to this network");
  }
  for (int l = 0; l <= m.num_layers(); ++l) {
    if (cache.activations[l].size()
        != static_cast<size_t>(batch) * m.dims()[l]) {
      throw ShapeMismatchError("cache does not belong to this network");
    }
  }

  GradientBundle g;
  if (want_params) {
    g.weights.resize(m.num_layers());
    g.biases.resize(m.num_layers());
  }

  std::vector<double> delta(dloss_dpred.begin(), dloss_dpred.end());
  for (int l = m.num_layers() - 1; l >= 0; --l) {
    const DenseLayer &layer = m.layer(l);
    const kernels::Shape s { batch, layer.in, layer.out };
    if (want_params) {
      g.weights[l].resize(layer.weights.size());
      g.biases[l].resize(layer.bias.size());
      if (mode == kernels::Mode::kReference)
        kernels::reference::weight_grad(cache.activations[l], delta,
                                        g.weights[l], g.biases[l], s);
      else
        kernels::parallel::weight_grad(cache.activations[l], delta,
                                       g.weights[l], g.biases[l], s);
    }
    if (l == 0 && !want_input)
      break;

    std::vector<double> prev(static_cast<size_t>(batch) * layer.in);
    if (mode == kernels::Mode::kReference)
      kernels::reference::backprop_input(delta, layer.weights, prev, s);
    else
      kernels::parallel::backprop_input(delta, m.transposed(l), prev, s);
    if (l > 0 && m.hidden_activation() == Activation::kRelu)
      kernels::relu_backward(cache.activations[l], prev);
    delta = std::move(prev);
  }
  if (want_input)
    g.input = std::move(delta);
  return g;
}

}  // namespace

GradientBundle backward(const Mlp &m, const ForwardCache &cache,
                        std::span<const double> dloss_dpred,
                        kernels::Mode mode) {
  return backward_impl(m, cache, dloss_dpred, mode, true, true);
}

GradientBundle backward(const Mlp &m, const ForwardCache &cache,
                        double dloss_dpred, kernels::Mode mode) {
  std::vector<double> d(cache.batch, dloss_dpred);
  return backward_impl(m, cache, d, mode, true, true);
}

std::vector<double> input_gradient(const Mlp &m, const ForwardCache &cache,
                                   std::span<const double> dloss_dpred,
                                   kernels::Mode mode) {
  return backward_impl(m, cache, dloss_dpred, mode, false, true).input;
}

// Training --------------------------------------------------------------------

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate must be positive");
  if (batch_size < 1)
    throw ConfigError("batch_size must be positive");
  if (epochs < 0)
    throw ConfigError("epochs must not be negative");
  if (!(train_fraction > 0 && train_fraction < 1))
    throw ConfigError("train_fraction must lie in (0, 1)");
  for (int h: hidden) {
    if (h < 1)
      throw ConfigError("hidden widths must be positive");
  }
}

void TrainingSet::add(std::span<const double> x, double label) {
  if (input_size == 0)
    input_size = static_cast<int>(x.size());
  if (x.size() != static_cast<size_t>(input_size))
    throw ShapeMismatchError("training row has the wrong width");
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(label);
}

DataSplit split_indices(int n, double train_fraction, std::uint64_t seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(splitmix64(seed));
  shuffle(std::span<int>(order), rng);

  int ntrain = static_cast<int>(std::lround(train_fraction * n));
  ntrain = std::max(ntrain, 1);
  if (n >= 2)
    ntrain = std::min(ntrain, n - 1);
  ntrain = std::min(ntrain, n);

  DataSplit split;
  split.train.assign(order.begin(), order.begin() + ntrain);
  split.validation.assign(order.begin() + ntrain, order.end());
  return split;
}

double evaluate_mse(const Mlp &m, const TrainingSet &data,
                    std::span<const int> rows) {
  if (rows.empty())
    return std::numeric_limits<double>::quiet_NaN();

  constexpr int kChunk = 256;
  double sse = 0.0;
  std::vector<double> x;
  for (size_t start = 0; start < rows.size(); start += kChunk) {
    const size_t end = std::min(rows.size(), start + kChunk);
    x.clear();
    for (size_t i = start; i < end; ++i) {
      auto r = data.row(rows[i]);
      x.insert(x.end(), r.begin(), r.end());
    }
    const ForwardCache cache =
        forward_batch(m, x, static_cast<int>(end - start));
    for (size_t i = start; i < end; ++i) {
      const double err = cache.output()[i - start]
                         - m.scaler().normalize(data.labels[rows[i]]);
      sse += err * err;
    }
  }
  return sse / static_cast<double>(rows.size());
}

TrainResult train(const TrainingSet &data, const TrainConfig &cfg) {
  cfg.validate();
  if (data.size() < 2)
    throw EmptyInputError("training needs at least two samples");

  TrainResult result;
  result.split = split_indices(data.size(), cfg.train_fraction, cfg.seed);
  const std::vector<int> &train_rows = result.split.train;

  std::vector<double> train_labels;
  for (int i: train_rows)
    train_labels.push_back(data.labels[i]);
  double mean = 0.0;
  for (double y: train_labels)
    mean += y;
  mean /= static_cast<double>(train_labels.size());
  double var = 0.0;
  for (double y: train_labels)
    var += (y - mean) * (y - mean);
  var /= static_cast<double>(train_labels.size());
  const double sd = std::sqrt(var);
  if (!(sd > 0) || !std::isfinite(sd))
    throw DegenerateLabelsError("training labels have zero spread");

  std::vector<int> dims { data.input_size };
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(1);
  Mlp model = Mlp::init(dims, cfg.seed, cfg.activation);
  model.set_scaler({ mean, sd });

  std::mt19937_64 rng(splitmix64(cfg.seed ^ 0x5eedba7c4ULL));
  std::vector<int> order = train_rows;
  std::vector<double> x, target, dpred;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(std::span<int>(order), rng);
    double sse = 0.0;
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      const int b = static_cast<int>(end - start);
      x.clear();
      target.clear();
      for (size_t i = start; i < end; ++i) {
        auto r = data.row(order[i]);
        x.insert(x.end(), r.begin(), r.end());
        target.push_back(model.scaler().normalize(data.labels[order[i]]));
      }

      const ForwardCache cache = forward_batch(model, x, b);
      dpred.assign(b, 0.0);
      for (int r = 0; r < b; ++r) {
        const double err = cache.output()[r] - target[r];
        sse += err * err;
        dpred[r] = 2.0 * err / b;
      }
      const GradientBundle g = backward_impl(
          model, cache, dpred, kernels::Mode::kParallel, true, false);
      for (int l = 0; l < model.num_layers(); ++l) {
        DenseLayer &layer = model.mutable_layer(l);
        kernels::sgd_update(layer.weights, g.weights[l], cfg.learning_rate);
        kernels::sgd_update(layer.bias, g.biases[l], cfg.learning_rate);
      }
      model.sync();
    }

    if (!model.all_finite())
      throw NumericError("training diverged at epoch " + std::to_string(epoch));

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_mse = sse / static_cast<double>(order.size());
    rec.validation_mse = evaluate_mse(model, data, result.split.validation);
    result.history.push_back(rec);
  }

  result.model = std::move(model);
  return result;
}

// Serialization ---------------------------------------------------------------

namespace {

constexpr const char *kModelHeader = "moldream-mlp v1";

std::vector<std::string> split_ws(const std::string &line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok)
    out.push_back(tok);
  return out;
}

std::string next_line(std::istream &is, const char *what) {
  std::string line;
  if (!std::getline(is, line))
    throw IoError(std::string("model file truncated before ") + what);
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  return line;
}

void write_row(std::ostream &os, std::span<const double> values) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0)
      os << ' ';
    os << format_double(values[i]);
  }
  os << '\n';
}

std::vector<double> read_row(std::istream &is, size_t expected,
                             const char *what) {
  const auto tokens = split_ws(next_line(is, what));
  if (tokens.size() != expected)
    throw IoError(std::string("model file: wrong value count in ") + what);
  std::vector<double> out;
  out.reserve(expected);
  for (const auto &t: tokens)
    out.push_back(parse_double(t));
  return out;
}

}  // namespace

void save_mlp(const Mlp &m, std::ostream &os) {
  os << kModelHeader << '\n';
  os << "dims";
  for (int d: m.dims())
    os << ' ' << d;
  os << '\n';
  os << "activation " << to_string(m.hidden_activation()) << '\n';
  os << "scaler " << format_double(m.scaler().mean) << ' '
     << format_double(m.scaler().std) << '\n';
  for (int l = 0; l < m.num_layers(); ++l) {
    const DenseLayer &layer = m.layer(l);
    os << "layer " << l << ' ' << layer.in << ' ' << layer.out << '\n';
    for (int k = 0; k < layer.in; ++k) {
      write_row(os, std::span<const double>(layer.weights)
                        .subspan(static_cast<size_t>(k) * layer.out, layer.out));
    }
    write_row(os, layer.bias);
  }
}

void save_mlp(const Mlp &m, const std::string &path) {
  std::ofstream os(path);
  if (!os)
    throw IoError("cannot write " + path);
  save_mlp(m, os);
  if (!os)
    throw IoError("failed writing " + path);
}

Mlp load_mlp(std::istream &is) {
  if (next_line(is, "header") != kModelHeader)
    throw IoError("not a moldream-mlp v1 file");

  auto dims_tok = split_ws(next_line(is, "dims"));
  if (dims_tok.size() < 3 || dims_tok[0] != "dims")
    throw IoError("model file: bad dims line");
  std::vector<int> dims;
  for (size_t i = 1; i < dims_tok.size(); ++i)
    dims.push_back(static_cast<int>(parse_int(dims_tok[i])));

  auto act_tok = split_ws(next_line(is, "activation"));
  if (act_tok.size() != 2 || act_tok[0] != "activation")
    throw IoError("model file: bad activation line");
  Activation act;
  if (act_tok[1] == "relu")
    act = Activation::kRelu;
  else if (act_tok[1] == "identity")
    act = Activation::kIdentity;
  else
    throw IoError("model file: unknown activation " + act_tok[1]);

  auto sc_tok = split_ws(next_line(is, "scaler"));
  if (sc_tok.size() != 3 || sc_tok[0] != "scaler")
    throw IoError("model file: bad scaler line");

  Mlp m(dims, act);
  m.set_scaler({ parse_double(sc_tok[1]), parse_double(sc_tok[2]) });
  for (int l = 0; l < m.num_layers(); ++l) {
    DenseLayer &layer = m.mutable_layer(l);
    auto head = split_ws(next_line(is, "layer header"));
    if (head.size() != 4 || head[0] != "layer"
        || parse_int(head[1]) != l || parse_int(head[2]) != layer.in
        || parse_int(head[3]) != layer.out) {
      throw IoError("model file: bad header for layer " + std::to_string(l));
    }
    for (int k = 0; k < layer.in; ++k) {
      auto row = read_row(is, layer.out, "weights");
      std::copy(row.begin(), row.end(),
                layer.weights.begin() + static_cast<ptrdiff_t>(k) * layer.out);
    }
    layer.bias = read_row(is, layer.out, "bias");
  }
  m.sync();
  if (!m.all_finite())
    throw IoError("model file contains non-finite parameters");
  return m;
}

Mlp load_mlp(const std::string &path) {
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot read " + path);
  return load_mlp(is);
}

}  // namespace moldream

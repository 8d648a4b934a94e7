//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDREAM_MLP_H_
#define MOLDREAM_MLP_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "moldream/kernels.h"

namespace moldream {

enum class Activation {
  kRelu,
  kIdentity,
};

const char *to_string(Activation a);

// Hidden widths of the default regression network.
inline const std::vector<int> kDefaultHidden = { 500, 500, 500, 500 };

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;  // in x out, row-major: one row per input unit
  std::vector<double> bias;     // out
};

// Affine map between raw property units and the standardized units the
// network is trained in.
struct LabelScaler {
  double mean = 0.0;
  double std = 1.0;

  double normalize(double raw) const { return (raw - mean) / std; }
  double denormalize(double z) const { return z * std + mean; }

  friend bool operator==(const LabelScaler &, const LabelScaler &) = default;
};

/// Fully connected regression network with a scalar linear head. The hidden
/// activation is rectified by default; the identity variant exists for
/// closed-form checks.
class Mlp {
public:
  Mlp() = default;

  // Zero-initialized network with the given dimension chain
  // (input, hidden..., 1).
  explicit Mlp(std::vector<int> dims, Activation hidden = Activation::kRelu);

  // Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
  static Mlp init(std::vector<int> dims, std::uint64_t seed,
                  Activation hidden = Activation::kRelu);

  const std::vector<int> &dims() const { return dims_; }
  int input_size() const { return dims_.front(); }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  Activation hidden_activation() const { return hidden_; }

  const DenseLayer &layer(int l) const { return layers_[l]; }

  // Mutable access; call sync() after editing weights.
  DenseLayer &mutable_layer(int l) { return layers_[l]; }
  void sync();

  std::span<const double> transposed(int l) const { return transposed_[l]; }

  const LabelScaler &scaler() const { return scaler_; }
  void set_scaler(LabelScaler s) { scaler_ = s; }

  // Hash over the bit patterns of every parameter and the scaler.
  std::uint64_t checksum() const;

  bool all_finite() const;

  friend bool operator==(const Mlp &a, const Mlp &b);

private:
  std::vector<int> dims_;
  Activation hidden_ = Activation::kRelu;
  std::vector<DenseLayer> layers_;
  std::vector<std::vector<double>> transposed_;
  LabelScaler scaler_;
};

/// Post-activation values of every layer for a batch; entry 0 is the input.
struct ForwardCache {
  int batch = 0;
  std::vector<std::vector<double>> activations;

  std::span<const double> output() const { return activations.back(); }
};

/// Throws NumericError on non-finite input and ShapeMismatchError when the
/// input is not batch x input_size.
ForwardCache forward_batch(const Mlp &m, std::span<const double> x, int batch,
                           kernels::Mode mode = kernels::Mode::kParallel);

struct Prediction {
  double value;
  ForwardCache cache;
};

Prediction forward(const Mlp &m, std::span<const double> x,
                   kernels::Mode mode = kernels::Mode::kParallel);

struct GradientBundle {
  std::vector<std::vector<double>> weights;  // same shapes as the layers
  std::vector<std::vector<double>> biases;
  std::vector<double> input;                 // batch x input_size
};

/// Gradients of a scalar loss given d(loss)/d(prediction) per batch row.
/// Parameter gradients are summed over the batch.
GradientBundle backward(const Mlp &m, const ForwardCache &cache,
                        std::span<const double> dloss_dpred,
                        kernels::Mode mode = kernels::Mode::kParallel);

GradientBundle backward(const Mlp &m, const ForwardCache &cache,
                        double dloss_dpred,
                        kernels::Mode mode = kernels::Mode::kParallel);

/// Input gradient only; the frozen-weight path used while dreaming.
std::vector<double> input_gradient(
    const Mlp &m, const ForwardCache &cache,
    std::span<const double> dloss_dpred,
    kernels::Mode mode = kernels::Mode::kParallel);

struct TrainConfig {
  double learning_rate = 0.05;
  int batch_size = 128;
  int epochs = 200;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  std::vector<int> hidden = kDefaultHidden;
  Activation activation = Activation::kRelu;

  // Throws ConfigError.
  void validate() const;
};

// Flattened features, n x input_size.
struct TrainingSet {
  int input_size = 0;
  std::vector<double> features;
  std::vector<double> labels;

  int size() const { return static_cast<int>(labels.size()); }
  std::span<const double> row(int i) const {
    return std::span<const double>(features).subspan(
        static_cast<size_t>(i) * input_size, input_size);
  }
  void add(std::span<const double> x, double label);
};

struct EpochRecord {
  int epoch;
  double train_mse;       // mean over the epoch's mini-batches, standardized
  double validation_mse;  // after the epoch; NaN without a validation split
};

struct DataSplit {
  std::vector<int> train;
  std::vector<int> validation;
};

/// Seeded shuffle of 0..n-1; the first round(fraction * n) indices (at least
/// one, and at least one left over when n >= 2) form the training part.
DataSplit split_indices(int n, double train_fraction, std::uint64_t seed);

struct TrainResult {
  Mlp model;
  std::vector<EpochRecord> history;
  DataSplit split;
};

/// Mini-batch SGD on mean squared error over standardized labels. The scaler
/// fitted on the training part is stored in the returned model.
///
/// Throws EmptyInputError with fewer than two samples and
/// DegenerateLabelsError when the training labels have zero spread.
TrainResult train(const TrainingSet &data, const TrainConfig &cfg);

/// Mean squared error in standardized units over the given rows.
double evaluate_mse(const Mlp &m, const TrainingSet &data,
                    std::span<const int> rows);

// Model file: "moldream-mlp v1" header, dimension chain, activation and
// label scaler, then one block per layer holding the weight rows and biases.
// Values are written in shortest round-trip form, so save/load is bit-exact.
void save_mlp(const Mlp &m, std::ostream &os);
void save_mlp(const Mlp &m, const std::string &path);
Mlp load_mlp(std::istream &is);
Mlp load_mlp(const std::string &path);

}  // namespace moldream

#endif  // MOLDREAM_MLP_H_

//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "moldream/kernels.h"
#include "moldream/mlp.h"
#include "moldream/rng.h"

namespace {

using namespace moldream;

std::vector<double> random_vec(size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n);
  for (double &x: v)
    x = uniform(rng, -1, 1);
  return v;
}

kernels::Shape shape_of(const benchmark::State &state) {
  return { static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
           static_cast<int>(state.range(2)) };
}

void set_flops(benchmark::State &state, const kernels::Shape &s) {
  state.counters["MAC/s"] = benchmark::Counter(
      static_cast<double>(state.iterations()) * s.batch * s.in * s.out,
      benchmark::Counter::kIsRate);
}

void BM_AffineReference(benchmark::State &state) {
  const auto s = shape_of(state);
  auto x = random_vec(size_t(s.batch) * s.in, 1);
  auto w = random_vec(size_t(s.in) * s.out, 2);
  auto b = random_vec(s.out, 3);
  std::vector<double> y(size_t(s.batch) * s.out);
  for (auto _: state) {
    kernels::reference::affine(x, w, b, y, s);
    benchmark::DoNotOptimize(y.data());
  }
  set_flops(state, s);
}

void BM_AffineParallel(benchmark::State &state) {
  const auto s = shape_of(state);
  auto x = random_vec(size_t(s.batch) * s.in, 1);
  auto w = random_vec(size_t(s.in) * s.out, 2);
  auto b = random_vec(s.out, 3);
  std::vector<double> y(size_t(s.batch) * s.out);
  for (auto _: state) {
    kernels::parallel::affine(x, w, b, y, s);
    benchmark::DoNotOptimize(y.data());
  }
  set_flops(state, s);
}

void BM_BackpropReference(benchmark::State &state) {
  const auto s = shape_of(state);
  auto d = random_vec(size_t(s.batch) * s.out, 1);
  auto w = random_vec(size_t(s.in) * s.out, 2);
  std::vector<double> g(size_t(s.batch) * s.in);
  for (auto _: state) {
    kernels::reference::backprop_input(d, w, g, s);
    benchmark::DoNotOptimize(g.data());
  }
  set_flops(state, s);
}

void BM_BackpropParallel(benchmark::State &state) {
  const auto s = shape_of(state);
  auto d = random_vec(size_t(s.batch) * s.out, 1);
  auto w = random_vec(size_t(s.in) * s.out, 2);
  std::vector<double> wt(w.size());
  kernels::transpose(w, wt, s.in, s.out);
  std::vector<double> g(size_t(s.batch) * s.in);
  for (auto _: state) {
    kernels::parallel::backprop_input(d, wt, g, s);
    benchmark::DoNotOptimize(g.data());
  }
  set_flops(state, s);
}

void BM_WeightGradReference(benchmark::State &state) {
  const auto s = shape_of(state);
  auto x = random_vec(size_t(s.batch) * s.in, 1);
  auto d = random_vec(size_t(s.batch) * s.out, 2);
  std::vector<double> dw(size_t(s.in) * s.out), db(s.out);
  for (auto _: state) {
    kernels::reference::weight_grad(x, d, dw, db, s);
    benchmark::DoNotOptimize(dw.data());
  }
  set_flops(state, s);
}

void BM_WeightGradParallel(benchmark::State &state) {
  const auto s = shape_of(state);
  auto x = random_vec(size_t(s.batch) * s.in, 1);
  auto d = random_vec(size_t(s.batch) * s.out, 2);
  std::vector<double> dw(size_t(s.in) * s.out), db(s.out);
  for (auto _: state) {
    kernels::parallel::weight_grad(x, d, dw, db, s);
    benchmark::DoNotOptimize(dw.data());
  }
  set_flops(state, s);
}

// Full dreaming step (forward + input gradient) on the default architecture.
void BM_DreamStep(benchmark::State &state) {
  const int batch = static_cast<int>(state.range(0));
  const auto mode = state.range(1) == 0 ? kernels::Mode::kReference
                                        : kernels::Mode::kParallel;
  Mlp m = Mlp::init({ 240, 500, 500, 500, 500, 1 }, 7);
  auto x = random_vec(size_t(batch) * 240, 4);
  std::vector<double> dpred(batch, 1.0);
  for (auto _: state) {
    auto cache = forward_batch(m, x, batch, mode);
    auto g = input_gradient(m, cache, dpred, mode);
    benchmark::DoNotOptimize(g.data());
  }
}


}  // namespace

BENCHMARK(BM_AffineReference)->ArgsProduct({ { 1, 128 }, { 500 }, { 500 } });
BENCHMARK(BM_AffineParallel)->ArgsProduct({ { 1, 128 }, { 500 }, { 500 } });
BENCHMARK(BM_BackpropReference)->ArgsProduct({ { 1, 128 }, { 500 }, { 500 } });
BENCHMARK(BM_BackpropParallel)->ArgsProduct({ { 1, 128 }, { 500 }, { 500 } });
BENCHMARK(BM_WeightGradReference)->ArgsProduct({ { 128 }, { 500 }, { 500 } });
BENCHMARK(BM_WeightGradParallel)->ArgsProduct({ { 128 }, { 500 }, { 500 } });
BENCHMARK(BM_DreamStep)->ArgsProduct({ { 1, 256 }, { 0, 1 } });

BENCHMARK_MAIN();

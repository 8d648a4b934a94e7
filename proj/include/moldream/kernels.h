//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDREAM_KERNELS_H_
#define MOLDREAM_KERNELS_H_

#include <span>

// Dense kernels for the regression network. All matrices are row-major.
//
// Every output element is accumulated in ascending index order of the summed
// dimension, starting from the bias (or zero). The reference and the OpenMP
// variants follow the same per-element order, so they agree bit for bit and
// results do not depend on the thread count or on how rows are batched.
namespace moldream::kernels {

struct Shape {
  int batch;
  int in;
  int out;
};

enum class Mode {
  kReference,
  kParallel,
};

namespace reference {

// y[r][j] = b[j] + sum_k x[r][k] * w[k][j]
void affine(std::span<const double> x, std::span<const double> w,
            std::span<const double> b, std::span<double> y, Shape s);

// g[r][k] = sum_j d[r][j] * w[k][j]
void backprop_input(std::span<const double> d, std::span<const double> w,
                    std::span<double> g, Shape s);

// dw[k][j] = sum_r x[r][k] * d[r][j];  db[j] = sum_r d[r][j]
void weight_grad(std::span<const double> x, std::span<const double> d,
                 std::span<double> dw, std::span<double> db, Shape s);

}  // namespace reference

namespace parallel {

void affine(std::span<const double> x, std::span<const double> w,
            std::span<const double> b, std::span<double> y, Shape s);

// Takes the transposed weights (out x in) so the inner loop runs over
// contiguous memory.
void backprop_input(std::span<const double> d, std::span<const double> wt,
                    std::span<double> g, Shape s);

void weight_grad(std::span<const double> x, std::span<const double> d,
                 std::span<double> dw, std::span<double> db, Shape s);

}  // namespace parallel

void relu(std::span<double> v);

// Zeroes d wherever the rectified activation a is not positive.
void relu_backward(std::span<const double> a, std::span<double> d);

// w -= lr * g
void sgd_update(std::span<double> w, std::span<const double> g, double lr);

// wt[j][i] = w[i][j] for a rows x cols matrix w.
void transpose(std::span<const double> w, std::span<double> wt, int rows,
               int cols);

int max_threads();

}  // namespace moldream::kernels

#endif  // MOLDREAM_KERNELS_H_

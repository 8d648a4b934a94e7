//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldream/kernels.h"

#include <algorithm>
#include <cstddef>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace moldream::kernels {
namespace {

// Rows of w kept hot while a block of samples streams past.
constexpr int kInBlock = 64;
constexpr int kRowBlock = 16;

inline void axpy(double a, const double *__restrict x, double *__restrict y,
                 int n) {
  for (int j = 0; j < n; ++j)
    y[j] += a * x[j];
}

}  // namespace

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace reference {

void affine(std::span<const double> x, std::span<const double> w,
            std::span<const double> b, std::span<double> y, Shape s) {
  for (int r = 0; r < s.batch; ++r) {
    for (int j = 0; j < s.out; ++j) {
      double acc = b[j];
      for (int k = 0; k < s.in; ++k)
        acc += x[r * s.in + k] * w[k * s.out + j];
      y[r * s.out + j] = acc;
    }
  }
}

void backprop_input(std::span<const double> d, std::span<const double> w,
                    std::span<double> g, Shape s) {
  for (int r = 0; r < s.batch; ++r) {
    for (int k = 0; k < s.in; ++k) {
      double acc = 0.0;
      for (int j = 0; j < s.out; ++j)
        acc += d[r * s.out + j] * w[k * s.out + j];
      g[r * s.in + k] = acc;
    }
  }
}

void weight_grad(std::span<const double> x, std::span<const double> d,
                 std::span<double> dw, std::span<double> db, Shape s) {
  for (int k = 0; k < s.in; ++k) {
    for (int j = 0; j < s.out; ++j) {
      double acc = 0.0;
      for (int r = 0; r < s.batch; ++r)
        acc += x[r * s.in + k] * d[r * s.out + j];
      dw[k * s.out + j] = acc;
    }
  }
  for (int j = 0; j < s.out; ++j) {
    double acc = 0.0;
    for (int r = 0; r < s.batch; ++r)
      acc += d[r * s.out + j];
    db[j] = acc;
  }
}

}  // namespace reference

namespace parallel {

// Zero operands are skipped: adding x*w with x == 0 leaves the accumulator
// unchanged, so the skip does not alter any result.

void affine(std::span<const double> x, std::span<const double> w,
            std::span<const double> b, std::span<double> y, Shape s) {
  const int nblocks = (s.batch + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static) if (s.batch > kRowBlock)
  for (int rb = 0; rb < nblocks; ++rb) {
    const int r0 = rb * kRowBlock;
    const int r1 = std::min(s.batch, r0 + kRowBlock);
    for (int r = r0; r < r1; ++r)
      std::copy(b.begin(), b.begin() + s.out, y.begin() + r * s.out);
    for (int k0 = 0; k0 < s.in; k0 += kInBlock) {
      const int k1 = std::min(s.in, k0 + kInBlock);
      for (int r = r0; r < r1; ++r) {
        const double *xr = x.data() + static_cast<ptrdiff_t>(r) * s.in;
        double *yr = y.data() + static_cast<ptrdiff_t>(r) * s.out;
        for (int k = k0; k < k1; ++k) {
          if (xr[k] != 0.0)
            axpy(xr[k], w.data() + static_cast<ptrdiff_t>(k) * s.out, yr,
                 s.out);
        }
      }
    }
  }
}

void backprop_input(std::span<const double> d, std::span<const double> wt,
                    std::span<double> g, Shape s) {
  const int nblocks = (s.batch + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static) if (s.batch > kRowBlock)
  for (int rb = 0; rb < nblocks; ++rb) {
    const int r0 = rb * kRowBlock;
    const int r1 = std::min(s.batch, r0 + kRowBlock);
    for (int r = r0; r < r1; ++r)
      std::fill_n(g.begin() + r * s.in, s.in, 0.0);
    for (int j0 = 0; j0 < s.out; j0 += kInBlock) {
      const int j1 = std::min(s.out, j0 + kInBlock);
      for (int r = r0; r < r1; ++r) {
        const double *dr = d.data() + static_cast<ptrdiff_t>(r) * s.out;
        double *gr = g.data() + static_cast<ptrdiff_t>(r) * s.in;
        for (int j = j0; j < j1; ++j) {
          if (dr[j] != 0.0)
            axpy(dr[j], wt.data() + static_cast<ptrdiff_t>(j) * s.in, gr,
                 s.in);
        }
      }
    }
  }
}

void weight_grad(std::span<const double> x, std::span<const double> d,
                 std::span<double> dw, std::span<double> db, Shape s) {
#pragma omp parallel for schedule(static) if (s.in > kRowBlock)
  for (int k = 0; k < s.in; ++k) {
    double *dwk = dw.data() + static_cast<ptrdiff_t>(k) * s.out;
    std::fill_n(dwk, s.out, 0.0);
    for (int r = 0; r < s.batch; ++r) {
      const double xv = x[static_cast<ptrdiff_t>(r) * s.in + k];
      if (xv != 0.0)
        axpy(xv, d.data() + static_cast<ptrdiff_t>(r) * s.out, dwk, s.out);
    }
  }
  std::fill_n(db.begin(), s.out, 0.0);
  for (int r = 0; r < s.batch; ++r)
    axpy(1.0, d.data() + static_cast<ptrdiff_t>(r) * s.out, db.data(), s.out);
}

}  // namespace parallel

void relu(std::span<double> v) {
  const ptrdiff_t n = static_cast<ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static) if (n > (1 << 16))
  for (ptrdiff_t i = 0; i < n; ++i)
    v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

void relu_backward(std::span<const double> a, std::span<double> d) {
  const ptrdiff_t n = static_cast<ptrdiff_t>(d.size());
#pragma omp parallel for schedule(static) if (n > (1 << 16))
  for (ptrdiff_t i = 0; i < n; ++i)
    d[i] = a[i] > 0.0 ? d[i] : 0.0;
}

void sgd_update(std::span<double> w, std::span<const double> g, double lr) {
  const ptrdiff_t n = static_cast<ptrdiff_t>(w.size());
#pragma omp parallel for schedule(static) if (n > (1 << 16))
  for (ptrdiff_t i = 0; i < n; ++i)
    w[i] -= lr * g[i];
}

void transpose(std::span<const double> w, std::span<double> wt, int rows,
               int cols) {
  constexpr int kTile = 32;
#pragma omp parallel for schedule(static) if (rows * cols > (1 << 16))
  for (int i0 = 0; i0 < rows; i0 += kTile) {
    for (int j0 = 0; j0 < cols; j0 += kTile) {
      const int i1 = std::min(rows, i0 + kTile);
      const int j1 = std::min(cols, j0 + kTile);
      for (int i = i0; i < i1; ++i) {
        for (int j = j0; j < j1; ++j)
          wt[static_cast<ptrdiff_t>(j) * rows + i] =
              w[static_cast<ptrdiff_t>(i) * cols + j];
      }
    }
  }
}

}  // namespace moldream::kernels

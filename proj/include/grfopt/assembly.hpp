#pragma once

// Covariance blocks of one induction step, shared by the limit predictor
// (inner products from the limiting representations y_k) and the exact
// finite-N sampler (inner products from the realized coordinates <X_k, v_i>).
//
// Points are given by their coordinates in an orthonormal basis v_0..v_{d-1};
// every inner product needed by the covariance formulas follows from those
// coordinates since <v_i, v_j> = delta_ij.
//
// History layout is row-major over the matrix
//
//        X_0        ...  X_{n-1}
//   f    f(X_0)     ...  f(X_{n-1})
//   v_0  D_v0 f(X_0) ... D_v0 f(X_{n-1})
//   ...
//
// i.e. entry (row r, point k) sits at index r * n + k with row 0 the function
// values and row 1 + i the derivatives along v_i.

#include <cstddef>

#include "grfopt/gaussian.hpp"

namespace grfopt {

struct StepBlocks {
  // "v" system: function values and derivatives along the basis directions.
  Matrix s11;  // n(d+1) x n(d+1), history autocovariance
  Matrix s12;  // n(d+1) x (d+1), history vs new point
  Matrix s22;  // (d+1) x (d+1), new point
  Vector mu1;
  Vector mu2;
  // "w" system: derivatives along any unit direction orthogonal to the span.
  Matrix w11;  // n x n
  Matrix w12;  // n x 1
  Matrix w22;  // 1 x 1
};

inline std::size_t history_index(std::size_t row, std::size_t point, std::size_t n_points) {
  return row * n_points + point;
}

/// `coords` holds one row per point X_0..X_n (n = coords.rows() - 1) with d
/// columns. Covariances are returned without the 1/N scaling.
template <class Model>
StepBlocks assemble_step(const Model& model, const Matrix& coords) {
  const auto n = static_cast<std::size_t>(coords.rows()) - 1;
  const auto d = static_cast<std::size_t>(coords.cols());
  const std::size_t rows = d + 1;
  const std::size_t hist = n * rows;

  StepBlocks b;
  b.s11.setZero(hist, hist);
  b.s12.setZero(hist, rows);
  b.s22.setZero(rows, rows);
  b.mu1.setZero(hist);
  b.mu2.setZero(rows);
  b.w11.setZero(n, n);
  b.w12.setZero(n, 1);
  b.w22.setZero(1, 1);

  Vector half_sq(n + 1);
  for (std::size_t k = 0; k <= n; ++k) half_sq(k) = 0.5 * coords.row(k).squaredNorm();

  // Covariance between the (d+1)-column of point k and that of point l,
  // written into `out` at row offset/stride (k) and column offset/stride (l).
  auto fill_pair = [&](std::size_t k, std::size_t l, auto&& put) {
    const double ip = coords.row(k).dot(coords.row(l));
    const auto pair = model.at(half_sq(k), half_sq(l), ip);
    put(0, 0, pair.f_f());
    for (std::size_t j = 0; j < d; ++j) {
      // Cov(f(X_k), D_vj f(X_l)) = Cov(D_vj f(X_l), f(X_k))
      put(0, 1 + j, pair.f_df(coords(l, j), coords(k, j)));
    }
    for (std::size_t i = 0; i < d; ++i) {
      put(1 + i, 0, pair.df_f(coords(k, i), coords(l, i)));
      for (std::size_t j = 0; j < d; ++j) {
        put(1 + i, 1 + j,
            pair.df_df(coords(k, i), coords(l, i), coords(k, j), coords(l, j), i == j ? 1.0 : 0.0));
      }
    }
    return pair.orthogonal();
  };

  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      const double w = fill_pair(k, l, [&](std::size_t r, std::size_t c, double value) {
        b.s11(history_index(r, k, n), history_index(c, l, n)) = value;
        b.s11(history_index(c, l, n), history_index(r, k, n)) = value;
      });
      b.w11(k, l) = w;
      b.w11(l, k) = w;
    }
    b.w12(k, 0) = fill_pair(k, n, [&](std::size_t r, std::size_t c, double value) {
      b.s12(history_index(r, k, n), c) = value;
    });
  }
  b.w22(0, 0) = fill_pair(n, n, [&](std::size_t r, std::size_t c, double value) {
    b.s22(r, c) = value;
  });
  b.s22 = 0.5 * (b.s22 + b.s22.transpose()).eval();

  for (std::size_t k = 0; k <= n; ++k) {
    const double m = model.mean(half_sq(k));
    const double slope = model.mean_slope(half_sq(k));
    if (k < n) {
      b.mu1(history_index(0, k, n)) = m;
      for (std::size_t i = 0; i < d; ++i) b.mu1(history_index(1 + i, k, n)) = slope * coords(k, i);
    } else {
      b.mu2(0) = m;
      for (std::size_t i = 0; i < d; ++i) b.mu2(1 + i) = slope * coords(k, i);
    }
  }
  return b;
}

/// Observed history vector in the row-major layout: f values in row 0 and the
/// gradient coordinates (with their structural zeros) in rows 1..d.
/// `values` has one entry per point; `grad(k, i)` returns <grad f(X_k), v_i>.
template <class GradFn>
Vector history_vector(const std::vector<double>& values, std::size_t n, std::size_t d,
                      GradFn&& grad) {
  Vector out(n * (d + 1));
  for (std::size_t k = 0; k < n; ++k) {
    out(history_index(0, k, n)) = values[k];
    for (std::size_t i = 0; i < d; ++i) out(history_index(1 + i, k, n)) = grad(k, i);
  }
  return out;
}

}  // namespace grfopt

#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "xling/vsm.hpp"

namespace xling::lsi {

struct SvdOptions {
  int oversampling = 10;
  // Minimum number of power (subspace) iterations; more are run until the
  // residual test passes.
  int power_iterations = 2;
  int max_iterations = 2000;
  // Converged when max_i ||M v_i - s_i u_i|| <= tolerance * s_1.
  double tolerance = 1e-10;
  // Singular values below rank_cutoff * s_1 are dropped.
  double rank_cutoff = 1e-10;
  std::uint64_t seed = 42;
};

struct TruncatedSvd {
  Eigen::MatrixXd u;  // rows x k, orthonormal columns
  Eigen::VectorXd s;  // k, descending and positive
  Eigen::MatrixXd v;  // cols x k
  int iterations = 0;
  double residual = 0.0;  // relative residual at exit
};

// Rank-k factorisation of a sparse matrix by randomized subspace iteration.
// The effective rank is min(k, rows, cols, numerical rank). Deterministic for
// a fixed seed. Throws degenerate-corpus on an all-zero matrix and
// convergence-failure (with iteration diagnostics) when the residual test does
// not pass within max_iterations.
TruncatedSvd truncated_svd(const vsm::SparseMatrix& matrix, int k, const SvdOptions& options = {});

}  // namespace xling::lsi

#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "xling/vsm.hpp"

namespace xling::testing {

// Largest principal angle between the column spaces of two orthonormal bases,
// via the sine form, which stays accurate for tiny angles.
inline double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd residual = b - a * (a.transpose() * b);
  const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(residual).singularValues()(0);
  return std::asin(std::min(1.0, s));
}

// Nonnegative sparse matrix with uniformly placed entries.
inline vsm::SparseMatrix random_sparse(std::mt19937_64& rng, int rows, int cols, double density) {
  std::uniform_real_distribution<double> value(0.1, 5.0);
  std::bernoulli_distribution keep(density);
  std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      if (keep(rng)) triplets.emplace_back(i, j, value(rng));
    }
  }
  vsm::SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace xling::testing

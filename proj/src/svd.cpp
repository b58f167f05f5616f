#include "xling/svd.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "xling/error.hpp"

namespace xling::lsi {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd orthonormal_basis(const MatrixXd& y) {
  Eigen::HouseholderQR<MatrixXd> qr(y);
  return qr.householderQ() * MatrixXd::Identity(y.rows(), y.cols());
}

// Gaussian test matrix from a Box-Muller transform over mt19937_64 so the
// draws do not depend on the standard library's distribution code.
MatrixXd gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] {
    return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  };
  MatrixXd g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      g(i, j) = std::sqrt(-2.0 * std::log(uniform())) * std::cos(6.283185307179586 * uniform());
    }
  }
  return g;
}

// Flip each singular pair so that the entry of largest magnitude in u is
// positive (first such entry on ties).
void canonicalize_signs(MatrixXd& u, MatrixXd& v) {
  for (Index c = 0; c < u.cols(); ++c) {
    Index arg = 0;
    u.col(c).cwiseAbs().maxCoeff(&arg);
    if (u(arg, c) < 0.0) {
      u.col(c) = -u.col(c);
      v.col(c) = -v.col(c);
    }
  }
}

}  // namespace

TruncatedSvd truncated_svd(const vsm::SparseMatrix& matrix, int k, const SvdOptions& options) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "rank k must be at least 1");
  const Index rows = matrix.rows();
  const Index cols = matrix.cols();
  const Index full = std::min(rows, cols);
  if (full == 0 || matrix.nonZeros() == 0 || matrix.coeffs().cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorCode::kDegenerateCorpus, "cannot factorise an all-zero matrix");
  }
  const Index rank = std::min<Index>(k, full);
  const Index width = std::min<Index>(rank + std::max(options.oversampling, 0), full);

  MatrixXd q = orthonormal_basis(matrix * gaussian(cols, width, options.seed));

  TruncatedSvd result;
  for (int iteration = 1;; ++iteration) {
    // One subspace iteration: Q <- orth(M orth(M^T Q)).
    MatrixXd w = orthonormal_basis(matrix.transpose() * q);
    q = orthonormal_basis(matrix * w);

    // Rayleigh-Ritz on span(Q): B = Q^T M, so U^T M = S V^T holds exactly.
    const MatrixXd b = (matrix.transpose() * q).transpose();
    Eigen::BDCSVD<MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sigma = svd.singularValues();
    const double top = sigma(0);
    if (!(top > 0.0)) {
      throw Error(ErrorCode::kDegenerateCorpus, "matrix has no positive singular value");
    }
    Index kept = 0;
    while (kept < rank && sigma(kept) > options.rank_cutoff * top) ++kept;

    result.u = q * svd.matrixU().leftCols(kept);
    result.s = sigma.head(kept);
    result.v = svd.matrixV().leftCols(kept);
    result.iterations = iteration;

    const MatrixXd r = matrix * result.v - result.u * result.s.asDiagonal();
    result.residual = r.colwise().norm().maxCoeff() / top;
    if (!std::isfinite(result.residual)) {
      throw Error(ErrorCode::kConvergenceFailure, "non-finite residual in truncated SVD");
    }
    if (iteration >= options.power_iterations && result.residual <= options.tolerance) break;
    if (iteration >= options.max_iterations) {
      std::ostringstream msg;
      msg << "truncated SVD did not converge: " << iteration << " iterations, relative residual "
          << result.residual << " > tolerance " << options.tolerance << " (k=" << kept
          << ", subspace width " << width << ", matrix " << rows << "x" << cols << ")";
      throw Error(ErrorCode::kConvergenceFailure, msg.str());
    }
  }
  canonicalize_signs(result.u, result.v);
  return result;
}

}  // namespace xling::lsi

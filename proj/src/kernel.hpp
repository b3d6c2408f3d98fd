#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace rbsam {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dense symmetric positive definite Gram matrix with a cached Cholesky
// factor. Construction validates symmetry (relative tolerance 1e-12) and
// definiteness; a non-SPD input raises an error naming the failing pivot.
class SpdGram {
public:
  explicit SpdGram(MatrixXd g);
  static SpdGram identity(int n);

  int dim() const { return static_cast<int>(g_.rows()); }
  const MatrixXd &matrix() const { return g_; }
  const MatrixXd &chol_lower() const { return l_; }

  // Solve G x = rhs with one step of iterative refinement. The relative
  // residual is checked against 1e-10 and a failure raises an error.
  VectorXd solve(const VectorXd &rhs) const;
  MatrixXd solve_many(const MatrixXd &rhs) const;

  double norm(const VectorXd &x) const;
  double inner(const VectorXd &x, const VectorXd &y) const;

private:
  MatrixXd g_;
  MatrixXd l_;
};

// Solve gram * x = rhs (residual-checked).
VectorXd spd_solve(const SpdGram &gram, const VectorXd &rhs);

// sqrt(r' G^{-1} r), the dual norm of the functional with coefficient
// vector r in the metric G.
double dual_norm(const SpdGram &gram, const VectorXd &r);

struct GenSingular {
  double sigma_min = 0.0;
  VectorXd trial_vector; // normalized to unit gram_trial norm
};

// Smallest generalized singular value of the rectangular cross matrix
// (n_test x n_trial) between the metrics gram_test and gram_trial,
// computed as the smallest singular value of L_test^{-1} cross L_trial^{-T}.
// Requires n_test >= n_trial.
GenSingular min_generalized_singular(const MatrixXd &cross,
                                     const SpdGram &gram_test,
                                     const SpdGram &gram_trial);

// All generalized singular values, descending.
VectorXd generalized_singular_values(const MatrixXd &cross,
                                     const SpdGram &gram_test,
                                     const SpdGram &gram_trial);

struct OrthoResult {
  MatrixXd basis;         // kept columns, G-orthonormal
  std::vector<int> kept;  // indices of surviving input columns
};

// Modified Gram-Schmidt in the metric given by mul_g (v -> G v), with one
// full reorthogonalization pass. A column whose post-projection norm falls
// below drop_tol times its original norm is dropped.
OrthoResult gram_orthonormalize_metric(
    const MatrixXd &columns,
    const std::function<VectorXd(const VectorXd &)> &mul_g,
    double drop_tol = 1e-10);

OrthoResult gram_orthonormalize(const MatrixXd &columns, const SpdGram &gram,
                                double drop_tol = 1e-10);

} // namespace rbsam

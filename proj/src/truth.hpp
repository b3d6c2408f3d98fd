#pragma once

#include "kernel.hpp"

#include <Eigen/Sparse>

#include <array>
#include <memory>
#include <string>
#include <utility>

namespace rbsam {

using SpMat = Eigen::SparseMatrix<double>;

// Angle y in [0, 2pi) and diffusion level epsilon in (0, 1].
struct ParameterPoint {
  double y = 0.0;
  double epsilon = 1.0;
};

// Validates epsilon and wraps y into [0, 2pi).
ParameterPoint make_parameter(double y, double epsilon);

// Affine coefficients (epsilon, cos y, sin y, 1).
Eigen::Vector4d theta_eval(const ParameterPoint &p);

// Exactly integrated piecewise-linear forms on the uniform n x n
// triangulation of (0,1)^2, over all (n+1)^2 nodes. Each square cell is
// split along its (+1,+1) diagonal. Row index is the test function,
// column index the trial function.
struct P1Forms {
  int n = 0;
  SpMat stiffness;  // (grad u, grad v)
  SpMat convect_x;  // (du/dx, v)
  SpMat convect_y;  // (du/dy, v)
  SpMat mass;       // (u, v)
  VectorXd load;    // integral of each nodal function (f == 1)
  std::vector<int> interior;
};

P1Forms assemble_p1_forms(int n);

// Nodal prolongation from the n grid to the 2n grid, all nodes. Exact on
// the piecewise-linear space: coarse cell centers lie on coarse diagonals.
SpMat prolongation(int n_coarse);

// Sparse SPD matrix with a cached Cholesky factorization.
class SparseSpd {
public:
  explicit SparseSpd(SpMat g);

  int dim() const { return static_cast<int>(g_.rows()); }
  const SpMat &matrix() const { return g_; }

  // Solve G x = rhs with one refinement step; relative residual above
  // 1e-10 raises an error.
  VectorXd solve(const VectorXd &rhs) const;
  MatrixXd solve_many(const MatrixXd &rhs) const;

  double norm(const VectorXd &x) const;
  double dual_norm(const VectorXd &r) const;

private:
  SpMat g_;
  Eigen::SimplicialLLT<SpMat> llt_;
};

// Parametric truth pair for the convection-diffusion model problem on
// (0,1)^2 with homogeneous Dirichlet conditions:
//
//   b_y(u, v) = eps (grad u, grad v) + (cos(y) du/dx + sin(y) du/dy, v)
//               + (u, v)
//
// The trial space is the interior piecewise-linear space at resolution
// h = 1/n_trial, the test space the interior space at h/2. The trial norm
// is the H^1_0 seminorm, the test norm ||v||_V^2 = eps |v|^2 + ||v||^2.
// Epsilon is fixed per build; the test norm does not depend on y.
class TruthModel {
public:
  static constexpr int n_terms = 4;

  TruthModel(int n_trial, double epsilon);

  int n_trial_cells() const { return n_trial_; }
  double h() const { return 1.0 / n_trial_; }
  double epsilon() const { return epsilon_; }
  int dim_trial() const { return static_cast<int>(ops_[0].cols()); }
  int dim_test() const { return static_cast<int>(ops_[0].rows()); }

  // A_k, mapping trial coefficients to test functionals. Order matches
  // theta_eval: stiffness, x convection, y convection, mass.
  const SpMat &op(int k) const { return ops_.at(static_cast<size_t>(k)); }
  // Square trial-space restriction interp^T A_k.
  const SpMat &op_square(int k) const {
    return ops_square_.at(static_cast<size_t>(k));
  }
  // Interior-to-interior prolongation (dim_test x dim_trial).
  const SpMat &interp() const { return interp_; }

  const VectorXd &rhs() const { return rhs_; }
  const VectorXd &rhs_square() const { return rhs_square_; }

  const SparseSpd &gram_u() const { return *gram_u_; }
  const SparseSpd &gram_v() const { return *gram_v_; }

  // Smallest truth-pair inf-sup constant found by the build check.
  double truth_infsup() const { return truth_infsup_; }

  // sum_k theta_k(p) A_k u
  VectorXd apply_operator(const ParameterPoint &p, const VectorXd &u) const;
  // sum_k theta_k(p) A_k^T v
  VectorXd apply_operator_t(const ParameterPoint &p, const VectorXd &v) const;

  // ||B_p u||_{V'}, the renormed trial norm of u.
  double u_hat_norm(const ParameterPoint &p, const VectorXd &u) const;

  // Solve [G_V, A; A^T, 0] (top; bottom) = (g; d) by sparse direct
  // factorization, refined to relative residual 1e-9.
  std::pair<VectorXd, VectorXd> saddle_solve(const Eigen::Vector4d &theta,
                                             const VectorXd &g,
                                             const VectorXd &d) const;

  // Minimum-residual truth solution u with Riesz-lifted residual r.
  std::pair<VectorXd, VectorXd> truth_solve(const ParameterPoint &p) const;

  // Dual truth solution z with b_p(w, z) = -ell(w) for all trial w,
  // realized as the minimum-V-norm solution of the consistent transposed
  // system, plus the trial-space Riesz lift s of the dual residual.
  std::pair<VectorXd, VectorXd> dual_truth_solve(const ParameterPoint &p,
                                                 const VectorXd &ell) const;

  // Plain-text dump of A_k, gram_U, gram_V and rhs, one file per object,
  // header "%%role name rows cols nnz".
  void export_matrices(const std::string &dir) const;

private:
  double estimate_infsup(const Eigen::Vector4d &theta) const;
  SpMat saddle_matrix(const Eigen::Vector4d &theta) const;

  int n_trial_ = 0;
  double epsilon_ = 1.0;
  std::array<SpMat, n_terms> ops_;
  std::array<SpMat, n_terms> ops_square_;
  SpMat interp_;
  VectorXd rhs_;
  VectorXd rhs_square_;
  std::unique_ptr<SparseSpd> gram_u_;
  std::unique_ptr<SparseSpd> gram_v_;
  double truth_infsup_ = 0.0;
};

} // namespace rbsam

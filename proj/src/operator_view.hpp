#pragma once

#include "truth.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace rbsam {

// Orientation of the truth pair: the primal view is (A_k, U -> V', f);
// the dual view swaps the roles of the spaces, applies the transposed
// operators, and drives the manifold of dual solutions of
// A(y)^T z = -ell. Greedy machinery written against this view serves
// both orientations.
class OperatorView {
public:
  static OperatorView make_primal(const TruthModel &model);
  static OperatorView make_dual(const TruthModel &model, VectorXd ell);

  bool is_dual() const { return dual_; }
  const TruthModel &truth() const { return *model_; }

  int dim_trial() const;
  int dim_test() const;
  const SparseSpd &gram_trial() const;
  const SparseSpd &gram_test() const;
  const VectorXd &rhs() const { return rhs_vec_; }

  VectorXd apply(int k, const VectorXd &w) const;
  VectorXd apply_theta(const ParameterPoint &p, const VectorXd &w) const;

  // Renormed trial norm: the test-space dual norm of B_p w.
  double uhat_norm(const ParameterPoint &p, const VectorXd &w) const;

  // Truth solution and lifted residual of this orientation.
  std::pair<VectorXd, VectorXd> truth_solve(const ParameterPoint &p) const;

  // The square trial-space restriction exists for the primal view only.
  bool has_square() const { return !dual_; }
  const SpMat &op_square(int k) const;
  const VectorXd &rhs_square() const;

private:
  const TruthModel *model_ = nullptr;
  bool dual_ = false;
  VectorXd rhs_vec_;
  VectorXd ell_;
  std::shared_ptr<const std::vector<SpMat>> ops_t_;
};

} // namespace rbsam

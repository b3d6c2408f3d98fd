#include "operator_view.hpp"

#include <stdexcept>

namespace rbsam {

OperatorView OperatorView::make_primal(const TruthModel &model) {
  OperatorView view;
  view.model_ = &model;
  view.dual_ = false;
  view.rhs_vec_ = model.rhs();
  return view;
}

OperatorView OperatorView::make_dual(const TruthModel &model, VectorXd ell) {
  if (ell.size() != model.dim_trial())
    throw std::invalid_argument("dual functional size does not match the trial dimension");
  OperatorView view;
  view.model_ = &model;
  view.dual_ = true;
  view.rhs_vec_ = -ell;
  view.ell_ = std::move(ell);
  auto ops = std::make_shared<std::vector<SpMat>>();
  ops->reserve(TruthModel::n_terms);
  for (int k = 0; k < TruthModel::n_terms; ++k) {
    SpMat t = model.op(k).transpose();
    t.makeCompressed();
    ops->push_back(std::move(t));
  }
  view.ops_t_ = std::move(ops);
  return view;
}

int OperatorView::dim_trial() const {
  return dual_ ? model_->dim_test() : model_->dim_trial();
}

int OperatorView::dim_test() const {
  return dual_ ? model_->dim_trial() : model_->dim_test();
}

const SparseSpd &OperatorView::gram_trial() const {
  return dual_ ? model_->gram_v() : model_->gram_u();
}

const SparseSpd &OperatorView::gram_test() const {
  return dual_ ? model_->gram_u() : model_->gram_v();
}

VectorXd OperatorView::apply(int k, const VectorXd &w) const {
  if (k < 0 || k >= TruthModel::n_terms)
    throw std::invalid_argument("operator term index out of range");
  if (w.size() != dim_trial())
    throw std::invalid_argument("operator argument size does not match the trial dimension");
  if (dual_)
    return (*ops_t_)[static_cast<std::size_t>(k)] * w;
  return model_->op(k) * w;
}

VectorXd OperatorView::apply_theta(const ParameterPoint &p, const VectorXd &w) const {
  const Eigen::Vector4d th = theta_eval(p);
  VectorXd out = th(0) * apply(0, w);
  for (int k = 1; k < TruthModel::n_terms; ++k)
    out += th(k) * apply(k, w);
  return out;
}

double OperatorView::uhat_norm(const ParameterPoint &p, const VectorXd &w) const {
  return gram_test().dual_norm(apply_theta(p, w));
}

std::pair<VectorXd, VectorXd> OperatorView::truth_solve(const ParameterPoint &p) const {
  if (dual_)
    return model_->dual_truth_solve(p, ell_);
  return model_->truth_solve(p);
}

const SpMat &OperatorView::op_square(int k) const {
  if (dual_)
    throw std::logic_error("square restriction is not defined for the dual view");
  return model_->op_square(k);
}

const VectorXd &OperatorView::rhs_square() const {
  if (dual_)
    throw std::logic_error("square restriction is not defined for the dual view");
  return model_->rhs_square();
}

} // namespace rbsam

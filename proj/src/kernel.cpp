#include "kernel.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace rbsam {

namespace {

// In-place lower Cholesky that reports the first non-positive pivot.
std::optional<int> cholesky_failure_index(MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  for (int k = 0; k < n; ++k) {
    const double d = a(k, k);
    if (!(d > 0.0) || !std::isfinite(d)) return k;
    const double lkk = std::sqrt(d);
    a(k, k) = lkk;
    for (int i = k + 1; i < n; ++i) a(i, k) /= lkk;
    for (int j = k + 1; j < n; ++j)
      for (int i = j; i < n; ++i) a(i, j) -= a(i, k) * a(j, k);
  }
  return std::nullopt;
}

} // namespace

SpdGram::SpdGram(MatrixXd g) : g_(std::move(g)) {
  if (g_.rows() != g_.cols())
    throw std::invalid_argument("SpdGram: matrix is not square");
  const double scale = g_.cwiseAbs().maxCoeff();
  const double asym = (g_ - g_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw std::invalid_argument("SpdGram: matrix is not symmetric (max "
                                "asymmetry " +
                                std::to_string(asym) + " vs scale " +
                                std::to_string(scale) + ")");
  g_ = 0.5 * (g_ + g_.transpose().eval());
  Eigen::LLT<MatrixXd> llt(g_);
  if (llt.info() != Eigen::Success) {
    const auto bad = cholesky_failure_index(g_);
    throw std::runtime_error(
        "SpdGram: factorization failed at pivot index " +
        std::to_string(bad.value_or(dim() - 1)) + " (matrix not positive "
        "definite)");
  }
  l_ = llt.matrixL();
}

SpdGram SpdGram::identity(int n) { return SpdGram(MatrixXd::Identity(n, n)); }

VectorXd SpdGram::solve(const VectorXd &rhs) const {
  if (rhs.size() != dim())
    throw std::invalid_argument("SpdGram::solve: size mismatch");
  auto lsolve = [&](const VectorXd &b) {
    VectorXd y = l_.triangularView<Eigen::Lower>().solve(b);
    return VectorXd(l_.transpose().triangularView<Eigen::Upper>().solve(y));
  };
  VectorXd x = lsolve(rhs);
  VectorXd res = rhs - g_ * x;
  x += lsolve(res);
  const double denom =
      std::max({rhs.norm(), g_.cwiseAbs().rowwise().sum().maxCoeff() * x.norm(),
                1e-300});
  double rel = (rhs - g_ * x).norm() / denom;
  for (int pass = 0; pass < 2 && rel > 1e-10; ++pass) {
    x += lsolve(rhs - g_ * x);
    rel = (rhs - g_ * x).norm() / denom;
  }
  if (rel > 1e-10)
    throw std::runtime_error(
        "SpdGram::solve: relative residual " + std::to_string(rel) +
        " exceeds 1e-10 after refinement");
  return x;
}

MatrixXd SpdGram::solve_many(const MatrixXd &rhs) const {
  MatrixXd out(rhs.rows(), rhs.cols());
  for (int j = 0; j < rhs.cols(); ++j) out.col(j) = solve(rhs.col(j));
  return out;
}

double SpdGram::norm(const VectorXd &x) const {
  return std::sqrt(std::max(0.0, x.dot(g_ * x)));
}

double SpdGram::inner(const VectorXd &x, const VectorXd &y) const {
  return x.dot(g_ * y);
}

VectorXd spd_solve(const SpdGram &gram, const VectorXd &rhs) {
  return gram.solve(rhs);
}

double dual_norm(const SpdGram &gram, const VectorXd &r) {
  return std::sqrt(std::max(0.0, r.dot(gram.solve(r))));
}

namespace {

// L_test^{-1} cross L_trial^{-T}
MatrixXd whitened_cross(const MatrixXd &cross, const SpdGram &gram_test,
                        const SpdGram &gram_trial) {
  if (cross.rows() != gram_test.dim() || cross.cols() != gram_trial.dim())
    throw std::invalid_argument(
        "generalized singular values: cross matrix is " +
        std::to_string(cross.rows()) + "x" + std::to_string(cross.cols()) +
        " but gram dimensions are " + std::to_string(gram_test.dim()) + "/" +
        std::to_string(gram_trial.dim()));
  MatrixXd y = gram_test.chol_lower()
                   .triangularView<Eigen::Lower>()
                   .solve(cross);
  MatrixXd zt = gram_trial.chol_lower()
                    .triangularView<Eigen::Lower>()
                    .solve(y.transpose());
  return zt.transpose();
}

} // namespace

GenSingular min_generalized_singular(const MatrixXd &cross,
                                     const SpdGram &gram_test,
                                     const SpdGram &gram_trial) {
  if (cross.rows() < cross.cols())
    throw std::invalid_argument(
        "min_generalized_singular: test dimension " +
        std::to_string(cross.rows()) + " is smaller than trial dimension " +
        std::to_string(cross.cols()));
  const MatrixXd m = whitened_cross(cross, gram_test, gram_trial);
  VectorXd sv;
  VectorXd v_min;
  if (std::max(m.rows(), m.cols()) <= 128) {
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinV);
    sv = svd.singularValues();
    v_min = svd.matrixV().col(sv.size() - 1);
  } else {
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinV);
    sv = svd.singularValues();
    v_min = svd.matrixV().col(sv.size() - 1);
  }
  GenSingular out;
  out.sigma_min = sv(sv.size() - 1);
  out.trial_vector = gram_trial.chol_lower()
                         .transpose()
                         .triangularView<Eigen::Upper>()
                         .solve(v_min);
  return out;
}

VectorXd generalized_singular_values(const MatrixXd &cross,
                                     const SpdGram &gram_test,
                                     const SpdGram &gram_trial) {
  const MatrixXd m = whitened_cross(cross, gram_test, gram_trial);
  if (std::max(m.rows(), m.cols()) <= 128) {
    Eigen::JacobiSVD<MatrixXd> svd(m);
    return svd.singularValues();
  }
  Eigen::BDCSVD<MatrixXd> svd(m);
  return svd.singularValues();
}

OrthoResult gram_orthonormalize_metric(
    const MatrixXd &columns,
    const std::function<VectorXd(const VectorXd &)> &mul_g, double drop_tol) {
  if (drop_tol < 0.0)
    throw std::invalid_argument("gram_orthonormalize: negative drop tolerance");
  OrthoResult out;
  std::vector<VectorXd> basis;
  std::vector<VectorXd> g_basis;
  for (int j = 0; j < columns.cols(); ++j) {
    VectorXd v = columns.col(j);
    const double n0 = std::sqrt(std::max(0.0, v.dot(mul_g(v))));
    if (n0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (size_t k = 0; k < basis.size(); ++k) {
        const double c = g_basis[k].dot(v);
        v -= c * basis[k];
      }
    }
    const double nn = std::sqrt(std::max(0.0, v.dot(mul_g(v))));
    if (nn < drop_tol * n0) continue;
    v /= nn;
    basis.push_back(v);
    g_basis.push_back(mul_g(v));
    out.kept.push_back(j);
  }
  out.basis.resize(columns.rows(), static_cast<Eigen::Index>(basis.size()));
  for (size_t k = 0; k < basis.size(); ++k)
    out.basis.col(static_cast<Eigen::Index>(k)) = basis[k];
  return out;
}

OrthoResult gram_orthonormalize(const MatrixXd &columns, const SpdGram &gram,
                                double drop_tol) {
  if (columns.rows() != gram.dim())
    throw std::invalid_argument("gram_orthonormalize: size mismatch");
  return gram_orthonormalize_metric(
      columns, [&gram](const VectorXd &v) { return VectorXd(gram.matrix() * v); },
      drop_tol);
}

} // namespace rbsam

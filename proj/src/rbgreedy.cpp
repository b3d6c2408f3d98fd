#include "rbgreedy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rbsam {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

} // namespace

ReducedSpace ReducedSpace::empty(const TruthModel &model) {
  return empty(OperatorView::make_primal(model));
}

ReducedSpace ReducedSpace::empty(const OperatorView &view) {
  ReducedSpace s;
  s.basis = MatrixXd(view.dim_trial(), 0);
  s.reduced_ops.assign(TruthModel::n_terms, MatrixXd(0, 0));
  s.reduced_rhs = VectorXd(0);
  return s;
}

bool ReducedSpace::extend(const TruthModel &model, const VectorXd &snapshot,
                          const ParameterPoint &meta) {
  return extend(OperatorView::make_primal(model), snapshot, meta);
}

bool ReducedSpace::extend(const OperatorView &view, const VectorXd &snapshot,
                          const ParameterPoint &meta) {
  if (snapshot.size() != basis.rows())
    throw std::invalid_argument("ReducedSpace: snapshot dimension mismatch");
  const SpMat &gu = view.gram_trial().matrix();
  VectorXd v = snapshot;
  const double n0 = std::sqrt(std::max(0.0, v.dot(gu * v)));
  if (n0 == 0.0) return false;
  for (int pass = 0; pass < 2 && n() > 0; ++pass) {
    const VectorXd gv = gu * v;
    v -= basis * (basis.transpose() * gv);
  }
  const double nn = std::sqrt(std::max(0.0, v.dot(gu * v)));
  if (nn <= 1e-10 * n0) return false;
  v /= nn;

  const int m = n();
  basis.conservativeResize(Eigen::NoChange, m + 1);
  basis.col(m) = v;
  snapshots_meta.push_back(meta);
  if (view.has_square()) {
    for (int k = 0; k < TruthModel::n_terms; ++k) {
      MatrixXd &r = reduced_ops[static_cast<size_t>(k)];
      const SpMat &s = view.op_square(k);
      const VectorXd col = s * v;
      const VectorXd row = s.transpose() * v;
      r.conservativeResize(m + 1, m + 1);
      r.block(0, m, m + 1, 1) = basis.transpose() * col;
      r.block(m, 0, 1, m) = (basis.leftCols(m).transpose() * row).transpose();
    }
    reduced_rhs.conservativeResize(m + 1);
    reduced_rhs(m) = v.dot(view.rhs_square());
  }
  return true;
}

ResidualOfflineData ResidualOfflineData::empty(const TruthModel &model) {
  return empty(OperatorView::make_primal(model));
}

ResidualOfflineData ResidualOfflineData::empty(const OperatorView &view) {
  ResidualOfflineData d;
  d.riesz_f = view.gram_test().solve(view.rhs());
  d.ff = view.rhs().dot(d.riesz_f);
  d.fA = MatrixXd(TruthModel::n_terms, 0);
  d.ab.assign(TruthModel::n_terms, MatrixXd(view.dim_test(), 0));
  d.riesz.assign(TruthModel::n_terms, MatrixXd(view.dim_test(), 0));
  d.blocks.assign(TruthModel::n_terms * TruthModel::n_terms, MatrixXd(0, 0));
  return d;
}

const MatrixXd &ResidualOfflineData::block(int k, int kp) const {
  return blocks.at(static_cast<size_t>(k * TruthModel::n_terms + kp));
}

void ResidualOfflineData::extend(const TruthModel &model,
                                 const ReducedSpace &space) {
  extend(OperatorView::make_primal(model), space);
}

void ResidualOfflineData::extend(const OperatorView &view,
                                 const ReducedSpace &space) {
  const int m = TruthModel::n_terms;
  for (int j = n(); j < space.n(); ++j) {
    const VectorXd b = space.basis.col(j);
    fA.conservativeResize(Eigen::NoChange, j + 1);
    for (int k = 0; k < m; ++k) {
      const VectorXd fk = view.apply(k, b);
      const VectorXd wk = view.gram_test().solve(fk);
      ab[static_cast<size_t>(k)].conservativeResize(Eigen::NoChange, j + 1);
      ab[static_cast<size_t>(k)].col(j) = fk;
      riesz[static_cast<size_t>(k)].conservativeResize(Eigen::NoChange, j + 1);
      riesz[static_cast<size_t>(k)].col(j) = wk;
      fA(k, j) = riesz_f.dot(fk);
    }
    for (int k = 0; k < m; ++k) {
      for (int kp = 0; kp < m; ++kp) {
        MatrixXd &blk = blocks[static_cast<size_t>(k * m + kp)];
        blk.conservativeResize(j + 1, j + 1);
        blk.block(0, j, j + 1, 1) =
            ab[static_cast<size_t>(k)].transpose() *
            riesz[static_cast<size_t>(kp)].col(j);
        blk.block(j, 0, 1, j) =
            ab[static_cast<size_t>(k)].col(j).transpose() *
            riesz[static_cast<size_t>(kp)].leftCols(j);
      }
    }
  }
}

MatrixXd ResidualOfflineData::aa_full() const {
  const int m = TruthModel::n_terms;
  const int nn = n();
  MatrixXd full(m * nn, m * nn);
  for (int k = 0; k < m; ++k)
    for (int kp = 0; kp < m; ++kp)
      full.block(k * nn, kp * nn, nn, nn) = block(k, kp);
  return full;
}

VectorXd galerkin_reduced_solve(const TruthModel &model,
                                const ReducedSpace &space,
                                const ParameterPoint &p) {
  if (space.n() == 0)
    throw std::invalid_argument("galerkin_reduced_solve: empty reduced space");
  if (space.reduced_ops[0].rows() != space.n())
    throw std::invalid_argument(
        "galerkin_reduced_solve: space has no square Galerkin data");
  const Eigen::Vector4d theta = theta_eval(p);
  MatrixXd mat = theta(0) * space.reduced_ops[0];
  for (int k = 1; k < TruthModel::n_terms; ++k)
    mat += theta(k) * space.reduced_ops[static_cast<size_t>(k)];
  const VectorXd &rhs = space.reduced_rhs;
  const Eigen::PartialPivLU<MatrixXd> lu(mat);
  const VectorXd c = lu.solve(rhs);
  const double scale =
      mat.cwiseAbs().rowwise().sum().maxCoeff() * c.norm() + rhs.norm();
  if (!c.allFinite() || (mat * c - rhs).norm() > 1e-8 * std::max(scale, 1e-300))
    throw std::runtime_error(
        "galerkin_reduced_solve: reduced matrix is numerically singular; "
        "switch to the stabilized solver");
  return c;
}

double surrogate_eval(const ResidualOfflineData &data, const VectorXd &theta,
                      const VectorXd &c) {
  const int m = TruthModel::n_terms;
  if (theta.size() != m)
    throw std::invalid_argument("surrogate_eval: theta dimension mismatch");
  if (c.size() != data.n())
    throw std::invalid_argument("surrogate_eval: coefficient size mismatch");
  double value = data.ff;
  value -= 2.0 * theta.dot(data.fA * c);
  for (int k = 0; k < m; ++k)
    for (int kp = 0; kp < m; ++kp)
      value += theta(k) * theta(kp) * c.dot(data.block(k, kp) * c);
  return std::sqrt(std::max(0.0, value));
}

VectorXd min_residual_solve(const ResidualOfflineData &data,
                            const VectorXd &theta) {
  const int m = TruthModel::n_terms;
  if (theta.size() != m)
    throw std::invalid_argument("min_residual_solve: theta dimension mismatch");
  if (data.n() == 0)
    throw std::invalid_argument("min_residual_solve: empty offline data");
  MatrixXd normal = MatrixXd::Zero(data.n(), data.n());
  for (int k = 0; k < m; ++k)
    for (int kp = 0; kp < m; ++kp)
      normal += theta(k) * theta(kp) * data.block(k, kp);
  normal = 0.5 * (normal + normal.transpose());
  const VectorXd rhs = data.fA.transpose() * theta;
  const Eigen::LDLT<MatrixXd> ldlt(normal);
  const VectorXd c = ldlt.solve(rhs);
  if (!c.allFinite())
    throw std::runtime_error("min_residual_solve: normal equations failed");
  return c;
}

std::pair<ReducedSpace, SgaTrace> sga_run(
    const TruthModel &model, const std::vector<ParameterPoint> &grid,
    const SgaOptions &options) {
  if (grid.empty())
    throw std::invalid_argument("sga_run: training grid is empty");
  if (options.n_max < 0)
    throw std::invalid_argument("sga_run: n_max must be nonnegative");

  ReducedSpace space = ReducedSpace::empty(model);
  ResidualOfflineData data = ResidualOfflineData::empty(model);
  SgaTrace trace;
  trace.validated = options.validate;

  std::vector<VectorXd> truths;
  if (options.validate) {
    truths.reserve(grid.size());
    for (const ParameterPoint &p : grid)
      truths.push_back(model.truth_solve(p).first);
  }

  const double cancel_floor =
      std::sqrt(std::numeric_limits<double>::epsilon()) * std::sqrt(data.ff);
  std::vector<VectorXd> coeffs(grid.size());
  for (int n = 0;; ++n) {
    int best = 0;
    double smax = -1.0;
    for (size_t i = 0; i < grid.size(); ++i) {
      const ParameterPoint &p = grid[i];
      coeffs[i] =
          n == 0 ? VectorXd(0) : galerkin_reduced_solve(model, space, p);
      double s = surrogate_eval(data, theta_eval(p), coeffs[i]);
      if (s < cancel_floor) {
        const VectorXd res =
            model.rhs() - model.apply_operator(p, space.basis * coeffs[i]);
        s = model.gram_v().dual_norm(res);
      }
      if (s > smax) {
        smax = s;
        best = static_cast<int>(i);
      }
    }

    SgaTraceRow row;
    row.n = n;
    row.y_selected = grid[static_cast<size_t>(best)].y;
    row.surrogate_max = smax;
    row.true_error_max = nan_value;
    row.gamma_hat = nan_value;
    if (options.validate) {
      double emax = 0.0;
      size_t argerr = 0;
      std::vector<double> errs(grid.size());
      for (size_t i = 0; i < grid.size(); ++i) {
        const VectorXd diff = truths[i] - space.basis * coeffs[i];
        errs[i] = model.u_hat_norm(grid[i], diff);
        if (errs[i] > emax) {
          emax = errs[i];
          argerr = i;
        }
      }
      row.true_error_max = emax;
      row.gamma_hat =
          emax > 0.0 ? errs[static_cast<size_t>(best)] / emax : 1.0;
      (void)argerr;
    }
    trace.rows.push_back(row);

    if (smax <= options.tol) {
      trace.stop_reason = "tol";
      break;
    }
    if (n == options.n_max) {
      trace.stop_reason = "budget";
      break;
    }
    const VectorXd snapshot =
        options.validate ? truths[static_cast<size_t>(best)]
                         : model.truth_solve(grid[static_cast<size_t>(best)])
                               .first;
    if (!space.extend(model, snapshot, grid[static_cast<size_t>(best)])) {
      trace.stop_reason = "exhausted";
      break;
    }
    data.extend(model, space);
  }
  return {std::move(space), std::move(trace)};
}

} // namespace rbsam

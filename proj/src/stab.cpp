#include "stab.hpp"

#include "kernel.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace rbsam {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::string format_parameter(const ParameterPoint &p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "y=%.6g", p.y);
  return buf;
}

} // namespace

bool TestSpace::extend(const OperatorView &view, const VectorXd &candidate) {
  if (basis.rows() == 0) basis = MatrixXd(view.dim_test(), 0);
  if (candidate.size() != basis.rows())
    throw std::invalid_argument("TestSpace: candidate dimension mismatch");
  const SpMat &gv = view.gram_test().matrix();
  VectorXd v = candidate;
  const double n0 = std::sqrt(std::max(0.0, v.dot(gv * v)));
  if (n0 == 0.0) return false;
  for (int pass = 0; pass < 2 && n() > 0; ++pass) {
    const VectorXd gw = gv * v;
    v -= basis * (basis.transpose() * gw);
  }
  const double nn = std::sqrt(std::max(0.0, v.dot(gv * v)));
  if (nn <= 1e-10 * n0) return false;
  v /= nn;
  const int m = n();
  basis.conservativeResize(Eigen::NoChange, m + 1);
  basis.col(m) = v;
  return true;
}

SaddleReducedModel SaddleReducedModel::empty(const OperatorView &view) {
  SaddleReducedModel srm;
  srm.trial = ReducedSpace::empty(view);
  srm.test.basis = MatrixXd(view.dim_test(), 0);
  srm.reduced_blocks.assign(TruthModel::n_terms, MatrixXd(0, 0));
  srm.reduced_rhs = VectorXd(0);
  srm.residual_data = ResidualOfflineData::empty(view);
  return srm;
}

bool SaddleReducedModel::add_trial(const OperatorView &view,
                                   const VectorXd &snapshot,
                                   const ParameterPoint &meta) {
  if (!trial.extend(view, snapshot, meta)) return false;
  residual_data.extend(view, trial);
  const int j = trial.n() - 1;
  const int nv = test.n();
  for (int k = 0; k < TruthModel::n_terms; ++k) {
    MatrixXd &blk = reduced_blocks[static_cast<size_t>(k)];
    blk.conservativeResize(nv, j + 1);
    if (nv > 0)
      blk.col(j) = test.basis.transpose() *
                   residual_data.ab[static_cast<size_t>(k)].col(j);
  }
  return true;
}

bool SaddleReducedModel::add_test(const OperatorView &view,
                                  const VectorXd &candidate) {
  if (!test.extend(view, candidate)) return false;
  const int r = test.n() - 1;
  const int nn = trial.n();
  const VectorXd v = test.basis.col(r);
  for (int k = 0; k < TruthModel::n_terms; ++k) {
    MatrixXd &blk = reduced_blocks[static_cast<size_t>(k)];
    blk.conservativeResize(r + 1, nn);
    if (nn > 0)
      blk.row(r) =
          (residual_data.ab[static_cast<size_t>(k)].transpose() * v).transpose();
  }
  reduced_rhs.conservativeResize(r + 1);
  reduced_rhs(r) = v.dot(view.rhs());
  return true;
}

MatrixXd SaddleReducedModel::cross(const Eigen::Vector4d &theta) const {
  MatrixXd c = theta(0) * reduced_blocks[0];
  for (int k = 1; k < TruthModel::n_terms; ++k)
    c += theta(k) * reduced_blocks[static_cast<size_t>(k)];
  return c;
}

MatrixXd SaddleReducedModel::trial_gram(const Eigen::Vector4d &theta) const {
  const int nn = trial.n();
  MatrixXd g = MatrixXd::Zero(nn, nn);
  for (int k = 0; k < TruthModel::n_terms; ++k)
    for (int kp = 0; kp < TruthModel::n_terms; ++kp)
      g += theta(k) * theta(kp) * residual_data.block(k, kp);
  return 0.5 * (g + g.transpose());
}

std::pair<VectorXd, VectorXd> saddle_reduced_solve(const SaddleReducedModel &srm,
                                                   const ParameterPoint &p) {
  if (srm.trial.n() == 0)
    throw std::invalid_argument("saddle_reduced_solve: empty trial space");
  const Eigen::Vector4d theta = theta_eval(p);
  const MatrixXd c = srm.cross(theta);
  const VectorXd &g = srm.reduced_rhs;
  const std::string unstable =
      "saddle_reduced_solve: reduced pair is not inf-sup stable at " +
      format_parameter(p) + "; enrich the test space first";
  if (c.rows() < c.cols()) throw std::runtime_error(unstable);
  Eigen::JacobiSVD<MatrixXd> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd &sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0)))
    throw std::runtime_error(unstable);
  const VectorXd u = svd.solve(g);
  const VectorXd r = g - c * u;
  const double scale = sv(0) * (u.norm() + r.norm()) + g.norm();
  const double second_row = (c.transpose() * r).norm();
  if (!u.allFinite() || second_row > 1e-10 * std::max(scale, 1e-300))
    throw std::runtime_error(unstable);
  return {u, r};
}

WorstCaseInfsup worst_case_infsup(const SaddleReducedModel &srm,
                                  const std::vector<ParameterPoint> &grid) {
  if (srm.trial.n() == 0)
    throw std::invalid_argument("worst_case_infsup: empty trial space");
  if (grid.empty())
    throw std::invalid_argument("worst_case_infsup: empty parameter grid");
  const int nn = srm.trial.n();
  const int rows = std::max(srm.test.n(), nn);
  const SpdGram id_test = SpdGram::identity(rows);
  WorstCaseInfsup best;
  best.beta = std::numeric_limits<double>::infinity();
  for (const ParameterPoint &p : grid) {
    const Eigen::Vector4d theta = theta_eval(p);
    SpdGram gram_uhat = [&] {
      try {
        return SpdGram(srm.trial_gram(theta));
      } catch (const std::exception &e) {
        throw std::runtime_error(
            "worst_case_infsup: parametric trial gram is not positive "
            "definite at " + format_parameter(p) + " (" + e.what() + ")");
      }
    }();
    MatrixXd c = srm.cross(theta);
    if (c.rows() < rows) {
      MatrixXd padded = MatrixXd::Zero(rows, nn);
      padded.topRows(c.rows()) = c;
      c.swap(padded);
    }
    const GenSingular gen = min_generalized_singular(c, id_test, gram_uhat);
    if (gen.sigma_min < best.beta) {
      best.beta = gen.sigma_min;
      best.y = p;
      best.w = gen.trial_vector;
    }
  }
  return best;
}

VectorXd supremizer(const OperatorView &view, const ParameterPoint &p,
                    const VectorXd &w) {
  if (w.size() != view.dim_trial())
    throw std::invalid_argument("supremizer: trial vector dimension mismatch");
  if (w.norm() == 0.0)
    throw std::invalid_argument("supremizer: zero trial direction");
  return view.gram_test().solve(view.apply_theta(p, w));
}

double delta_from_infsup(double beta) {
  const double b = std::min(1.0, std::max(0.0, beta));
  return std::sqrt(std::max(0.0, 1.0 - b * b));
}

StabilizeResult stabilize(SaddleReducedModel &srm, const OperatorView &view,
                          const std::vector<ParameterPoint> &grid, double delta,
                          StabMode mode) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("stabilize: delta must lie in (0, 1)");
  if (grid.empty())
    throw std::invalid_argument("stabilize: empty parameter grid");
  StabilizeResult result;
  if (srm.trial.n() == 0) return result;
  const double target = std::sqrt(1.0 - delta * delta);
  const int cap = TruthModel::n_terms * srm.trial.n() + 8;

  if (mode == StabMode::full) {
    const VectorXd phi = srm.trial.basis.col(srm.trial.n() - 1);
    for (int k = 0; k < TruthModel::n_terms; ++k) {
      const VectorXd cand = view.gram_test().solve(view.apply(k, phi));
      if (srm.add_test(view, cand)) ++result.added;
    }
    const WorstCaseInfsup wc = worst_case_infsup(srm, grid);
    result.beta = wc.beta;
    if (wc.beta < target) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "stabilize: full enrichment left beta=%.6g below the "
                    "target %.6g at %s",
                    wc.beta, target, format_parameter(wc.y).c_str());
      throw std::runtime_error(buf);
    }
    return result;
  }

  while (true) {
    const WorstCaseInfsup wc = worst_case_infsup(srm, grid);
    if (wc.beta >= target) {
      result.beta = wc.beta;
      return result;
    }
    if (result.added >= cap) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "stabilize: enrichment cap %d reached with beta=%.6g "
                    "below the target %.6g",
                    cap, wc.beta, target);
      throw std::runtime_error(buf);
    }
    const VectorXd w_truth = srm.trial.basis * wc.w;
    const VectorXd cand = supremizer(view, wc.y, w_truth);
    if (!srm.add_test(view, cand))
      throw std::runtime_error(
          "stabilize: stalled, the worst-direction supremizer lies in the "
          "current test space at " + format_parameter(wc.y));
    ++result.added;
  }
}

std::pair<SaddleReducedModel, SgaDouTrace> sga_dou_run(
    const OperatorView &view, const std::vector<ParameterPoint> &grid,
    const SgaDouOptions &options) {
  if (grid.empty())
    throw std::invalid_argument("sga_dou_run: empty training grid");
  if (!(options.tol >= 0.0))
    throw std::invalid_argument("sga_dou_run: tol must be nonnegative");
  if (options.n_max < 0)
    throw std::invalid_argument("sga_dou_run: n_max must be nonnegative");
  if (!(options.delta > 0.0 && options.delta < 1.0))
    throw std::invalid_argument("sga_dou_run: delta must lie in (0, 1)");

  const std::size_t g = grid.size();
  SgaDouTrace trace;
  trace.validated = options.validate;

  std::vector<std::pair<VectorXd, VectorXd>> truths;
  double floor_max = 0.0;
  if (options.validate) {
    truths.reserve(g);
    for (const ParameterPoint &p : grid) {
      truths.push_back(view.truth_solve(p));
      floor_max =
          std::max(floor_max, view.gram_test().norm(truths.back().second));
    }
  }

  SaddleReducedModel srm = SaddleReducedModel::empty(view);
  const double cancel_floor =
      std::sqrt(std::numeric_limits<double>::epsilon()) *
      std::sqrt(srm.residual_data.ff);

  std::vector<VectorXd> coeffs(g);
  std::vector<double> svals(g), errs(g);

  for (int n = 0;; ++n) {
    const StabilizeResult st =
        stabilize(srm, view, grid, options.delta, options.mode);

    double smax = -1.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < g; ++i) {
      const ParameterPoint &p = grid[i];
      if (n == 0) {
        coeffs[i] = VectorXd::Zero(0);
        svals[i] = std::sqrt(srm.residual_data.ff);
      } else {
        coeffs[i] = saddle_reduced_solve(srm, p).first;
        double s = surrogate_eval(srm.residual_data, theta_eval(p), coeffs[i]);
        if (s < cancel_floor) {
          const VectorXd res =
              view.rhs() - view.apply_theta(p, srm.trial.basis * coeffs[i]);
          s = view.gram_test().dual_norm(res);
        }
        svals[i] = s;
      }
      if (svals[i] > smax) {
        smax = svals[i];
        best = i;
      }
    }

    SgaDouTraceRow row;
    row.n = n;
    row.n_v = srm.test.n();
    row.delta_certified = delta_from_infsup(st.beta);
    row.y_selected = grid[best].y;
    row.surrogate_max = smax;
    row.true_error_max = nan_value;
    row.ratio = nan_value;
    row.gamma_hat = nan_value;
    if (options.validate) {
      double emax = 0.0;
      for (std::size_t i = 0; i < g; ++i) {
        const VectorXd diff =
            (n == 0) ? truths[i].first
                     : VectorXd(truths[i].first - srm.trial.basis * coeffs[i]);
        errs[i] = view.uhat_norm(grid[i], diff);
        emax = std::max(emax, errs[i]);
      }
      row.true_error_max = emax;
      row.ratio = emax > 0.0 ? smax / emax : nan_value;
      row.gamma_hat = emax > 0.0 ? errs[best] / emax : 1.0;
    }
    trace.rows.push_back(row);

    if (smax <= options.tol) {
      trace.stop_reason = "tol";
      break;
    }
    if (n >= options.n_max) {
      trace.stop_reason = "budget";
      break;
    }
    if (options.validate && options.floor_stop_factor > 0.0 &&
        smax <= options.floor_stop_factor * floor_max) {
      trace.stop_reason = "floor";
      break;
    }

    const std::pair<VectorXd, VectorXd> truth =
        options.validate ? truths[best] : view.truth_solve(grid[best]);
    if (!srm.add_trial(view, truth.first, grid[best])) {
      trace.stop_reason = "exhausted";
      break;
    }
    srm.add_test(view, truth.second);
  }
  return {std::move(srm), std::move(trace)};
}

std::pair<SaddleReducedModel, SgaDouTrace> sga_dou_run(
    const TruthModel &model, const std::vector<ParameterPoint> &grid,
    const SgaDouOptions &options) {
  return sga_dou_run(OperatorView::make_primal(model), grid, options);
}

} // namespace rbsam

#include "goal.hpp"

#include "operator_view.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

namespace rbsam {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

// Keeps the part of the convex polygon with a*x + b*y <= c.
std::vector<PlanePoint> clip_half_plane(const std::vector<PlanePoint> &poly,
                                        double a, double b, double c) {
  std::vector<PlanePoint> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const PlanePoint &p = poly[i];
    const PlanePoint &q = poly[(i + 1) % n];
    const double fp = a * p.x + b * p.y - c;
    const double fq = a * q.x + b * q.y - c;
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      const double t = fp / (fp - fq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return out;
}

struct PolygonMoments {
  double area = 0.0;
  PlanePoint centroid;
};

PolygonMoments polygon_moments(const std::vector<PlanePoint> &poly) {
  PolygonMoments m;
  const std::size_t n = poly.size();
  if (n < 3) return m;
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PlanePoint &p = poly[i];
    const PlanePoint &q = poly[(i + 1) % n];
    const double w = p.x * q.y - q.x * p.y;
    m.area += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  m.area *= 0.5;
  if (m.area != 0.0) {
    m.centroid = {cx / (6.0 * m.area), cy / (6.0 * m.area)};
  }
  return m;
}

// Barycentric coordinates of point p in the triangle (v0, v1, v2).
std::array<double, 3> barycentric(const std::array<PlanePoint, 3> &v,
                                  const PlanePoint &p) {
  const double det = (v[1].x - v[0].x) * (v[2].y - v[0].y) -
                     (v[2].x - v[0].x) * (v[1].y - v[0].y);
  const double l1 =
      ((p.x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (p.y - v[0].y)) /
      det;
  const double l2 =
      ((v[1].x - v[0].x) * (p.y - v[0].y) - (p.x - v[0].x) * (v[1].y - v[0].y)) /
      det;
  return {1.0 - l1 - l2, l1, l2};
}

void check_functional(const TruthModel &model, const GoalFunctional &ell) {
  if (ell.ell.size() != model.dim_trial())
    throw std::invalid_argument(
        "goal functional size does not match the trial dimension");
  if (!ell.ell.allFinite() || ell.ell.norm() == 0.0)
    throw std::invalid_argument("goal functional must be finite and nonzero");
}

} // namespace

GoalFunctional make_mean_functional(int n_trial, double x_lo, double x_hi,
                                    double y_lo, double y_hi) {
  if (n_trial < 2)
    throw std::invalid_argument("make_mean_functional: resolution too small");
  if (!(0.0 <= x_lo && x_lo < x_hi && x_hi <= 1.0) ||
      !(0.0 <= y_lo && y_lo < y_hi && y_hi <= 1.0))
    throw std::invalid_argument(
        "make_mean_functional: box must lie inside the unit square");
  const int n = n_trial;
  const double h = 1.0 / n;
  const double box_area = (x_hi - x_lo) * (y_hi - y_lo);
  VectorXd full = VectorXd::Zero((n + 1) * (n + 1));
  const auto node_index = [n](int ix, int iy) { return iy * (n + 1) + ix; };
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const PlanePoint v00{ix * h, iy * h};
      const PlanePoint v10{(ix + 1) * h, iy * h};
      const PlanePoint v01{ix * h, (iy + 1) * h};
      const PlanePoint v11{(ix + 1) * h, (iy + 1) * h};
      const std::array<std::array<PlanePoint, 3>, 2> tris = {
          std::array<PlanePoint, 3>{v00, v10, v11},
          std::array<PlanePoint, 3>{v00, v11, v01}};
      const std::array<std::array<int, 3>, 2> idx = {
          std::array<int, 3>{node_index(ix, iy), node_index(ix + 1, iy),
                             node_index(ix + 1, iy + 1)},
          std::array<int, 3>{node_index(ix, iy), node_index(ix + 1, iy + 1),
                             node_index(ix, iy + 1)}};
      for (int t = 0; t < 2; ++t) {
        std::vector<PlanePoint> poly(tris[t].begin(), tris[t].end());
        poly = clip_half_plane(poly, -1.0, 0.0, -x_lo);
        poly = clip_half_plane(poly, 1.0, 0.0, x_hi);
        poly = clip_half_plane(poly, 0.0, -1.0, -y_lo);
        poly = clip_half_plane(poly, 0.0, 1.0, y_hi);
        const PolygonMoments m = polygon_moments(poly);
        if (m.area <= 0.0) continue;
        const std::array<double, 3> lambda = barycentric(tris[t], m.centroid);
        for (int a = 0; a < 3; ++a)
          full(idx[t][a]) += m.area * lambda[static_cast<std::size_t>(a)];
      }
    }
  }
  GoalFunctional g;
  g.ell = VectorXd::Zero((n - 1) * (n - 1));
  for (int iy = 1; iy < n; ++iy)
    for (int ix = 1; ix < n; ++ix)
      g.ell((iy - 1) * (n - 1) + (ix - 1)) = full(node_index(ix, iy)) / box_area;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "mean value over (%g, %g) x (%g, %g)", x_lo,
                x_hi, y_lo, y_hi);
  g.descriptor = buf;
  return g;
}

double corrected_functional(const TruthModel &model, const ParameterPoint &p,
                            const VectorXd &u_bar, const VectorXd &z_bar,
                            const GoalFunctional &ell) {
  check_functional(model, ell);
  if (u_bar.size() != model.dim_trial())
    throw std::invalid_argument(
        "corrected_functional: primal coefficient size mismatch");
  if (z_bar.size() != model.dim_test())
    throw std::invalid_argument(
        "corrected_functional: dual coefficient size mismatch");
  const VectorXd residual = model.rhs() - model.apply_operator(p, u_bar);
  return ell.ell.dot(u_bar) - residual.dot(z_bar);
}

std::pair<double, double> goal_error_bound_check(const TruthModel &model,
                                                 const ParameterPoint &p,
                                                 const VectorXd &u_bar,
                                                 const VectorXd &z_bar,
                                                 const GoalFunctional &ell) {
  check_functional(model, ell);
  const VectorXd u_truth = model.truth_solve(p).first;
  const VectorXd z_truth = model.dual_truth_solve(p, ell.ell).first;
  const double corrected = corrected_functional(model, p, u_bar, z_bar, ell);
  const double lhs = std::abs(corrected - ell.ell.dot(u_truth));

  std::mt19937_64 rng(321);
  std::normal_distribution<double> normal(0.0, 1.0);
  double cb = 0.0;
  for (int probe = 0; probe < 5; ++probe) {
    VectorXd w(model.dim_trial());
    for (int i = 0; i < w.size(); ++i) w(i) = normal(rng);
    const VectorXd bw = model.apply_operator(p, w);
    const double num = model.gram_v().dual_norm(bw);
    const double den = model.u_hat_norm(p, w);
    if (den > 0.0) cb = std::max(cb, num / den);
  }
  const double rhs = cb * model.u_hat_norm(p, u_truth - u_bar) *
                     model.gram_v().norm(z_truth - z_bar);
  return {lhs, rhs};
}

int budget_split(double alpha, double beta, int n) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("budget_split: rates must be positive");
  if (n < 2)
    throw std::invalid_argument("budget_split: total budget must be at least 2");
  const int m = static_cast<int>(std::floor(alpha * n / (alpha + beta)));
  return std::min(n - 1, std::max(1, m));
}

double estimate_rate(const SgaDouTrace &trace) {
  std::vector<std::pair<double, double>> pts;
  for (const SgaDouTraceRow &row : trace.rows)
    if (row.n >= 1 && row.surrogate_max > 0.0)
      pts.emplace_back(std::log(static_cast<double>(row.n)),
                       std::log(row.surrogate_max));
  const std::size_t k = (pts.size() + 1) / 2;
  if (k < 2) return nan_value;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = pts.size() - k; i < pts.size(); ++i) {
    sx += pts[i].first;
    sy += pts[i].second;
    sxx += pts[i].first * pts[i].first;
    sxy += pts[i].first * pts[i].second;
  }
  const double kk = static_cast<double>(k);
  const double denom = kk * sxx - sx * sx;
  if (denom == 0.0) return nan_value;
  return -(kk * sxy - sx * sy) / denom;
}

PipelineReport primal_dual_pipeline(const TruthModel &model,
                                    const std::vector<ParameterPoint> &grid,
                                    double delta, int n_total, double alpha_est,
                                    double beta_est, const GoalFunctional &ell) {
  check_functional(model, ell);
  if (grid.empty())
    throw std::invalid_argument("primal_dual_pipeline: empty training grid");
  if (n_total < 2)
    throw std::invalid_argument("primal_dual_pipeline: n_total must be >= 2");

  PipelineReport report;
  report.m = budget_split(alpha_est, beta_est, n_total);
  report.n_dual = n_total - report.m;

  SgaDouOptions options;
  options.delta = delta;
  options.tol = 0.0;
  options.validate = false;
  options.floor_stop_factor = 0.0;

  options.n_max = report.m;
  auto primal = sga_dou_run(OperatorView::make_primal(model), grid, options);
  options.n_max = report.n_dual;
  const OperatorView dual_view = OperatorView::make_dual(model, ell.ell);
  auto dual = sga_dou_run(dual_view, grid, options);

  report.primal_trace = std::move(primal.second);
  report.dual_trace = std::move(dual.second);
  report.sigma_primal = report.primal_trace.rows.back().surrogate_max;
  report.sigma_dual = report.dual_trace.rows.back().surrogate_max;
  report.alpha_hat = estimate_rate(report.primal_trace);
  report.beta_hat = estimate_rate(report.dual_trace);

  std::vector<ParameterPoint> validation;
  if (grid.size() == 1) {
    validation = grid;
  } else {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
      validation.push_back(make_parameter(
          0.5 * (grid[i].y + grid[i + 1].y), grid[i].epsilon));
  }

  const SaddleReducedModel &srm_pr = primal.first;
  const SaddleReducedModel &srm_du = dual.first;
  int wins = 0;
  for (const ParameterPoint &p : validation) {
    PipelineRow row;
    row.y = p.y;
    const VectorXd u_truth = model.truth_solve(p).first;
    row.i_truth = ell.ell.dot(u_truth);

    const VectorXd u_c = saddle_reduced_solve(srm_pr, p).first;
    const VectorXd u_bar = srm_pr.trial.basis * u_c;
    const VectorXd z_c = saddle_reduced_solve(srm_du, p).first;
    const VectorXd z_bar = srm_du.trial.basis * z_c;

    row.i_uncorrected = ell.ell.dot(u_bar);
    row.i_corrected = corrected_functional(model, p, u_bar, z_bar, ell);
    row.err_uncorrected = std::abs(row.i_uncorrected - row.i_truth);
    row.err_corrected = std::abs(row.i_corrected - row.i_truth);
    const double s_pr =
        surrogate_eval(srm_pr.residual_data, theta_eval(p), u_c);
    const double s_du =
        surrogate_eval(srm_du.residual_data, theta_eval(p), z_c);
    row.bound_product = s_pr * s_du;

    report.max_err_uncorrected =
        std::max(report.max_err_uncorrected, row.err_uncorrected);
    report.max_err_corrected =
        std::max(report.max_err_corrected, row.err_corrected);
    if (row.err_corrected <= row.err_uncorrected) ++wins;
    report.rows.push_back(row);
  }
  report.corrected_win_fraction =
      static_cast<double>(wins) / static_cast<double>(validation.size());
  return report;
}

} // namespace rbsam

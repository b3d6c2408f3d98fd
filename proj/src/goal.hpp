#pragma once

#include "stab.hpp"
#include "truth.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rbsam {

// Linear quantity of interest on the trial space.
struct GoalFunctional {
  VectorXd ell;
  std::string descriptor;
};

// Mean value over the axis-aligned box (x_lo, x_hi) x (y_lo, y_hi),
// assembled exactly on the trial mesh by clipping each triangle against
// the box. The box must lie inside the unit square.
GoalFunctional make_mean_functional(int n_trial, double x_lo = 0.7,
                                    double x_hi = 0.9, double y_lo = 0.7,
                                    double y_hi = 0.9);

// ell(u_bar) - r(u_bar, z_bar) with r the primal residual functional.
double corrected_functional(const TruthModel &model, const ParameterPoint &p,
                            const VectorXd &u_bar, const VectorXd &z_bar,
                            const GoalFunctional &ell);

// Returns lhs = |corrected - ell(u_truth)| and rhs = C_b * ||u - u_bar||_Uhat
// * ||z - z_bar||_V, with C_b the measured continuity constant of b_p over
// the renormed pair (1 up to roundoff). Truth primal and dual solves run
// inside; a validation tool, not an online estimator.
std::pair<double, double> goal_error_bound_check(const TruthModel &model,
                                                 const ParameterPoint &p,
                                                 const VectorXd &u_bar,
                                                 const VectorXd &z_bar,
                                                 const GoalFunctional &ell);

// clamp(floor(alpha * n / (alpha + beta)), 1, n - 1); requires n >= 2.
int budget_split(double alpha, double beta, int n);

// Least-squares slope estimate of the surrogate decay rate: fits
// log(surrogate) against -log(n) over the last ceil(k/2) rows with n >= 1.
// Returns nan when fewer than two usable rows exist.
double estimate_rate(const SgaDouTrace &trace);

struct PipelineRow {
  double y = 0.0;
  double i_truth = 0.0;
  double i_uncorrected = 0.0;
  double i_corrected = 0.0;
  double err_uncorrected = 0.0;
  double err_corrected = 0.0;
  double bound_product = 0.0;  // primal surrogate times dual surrogate at y
};

struct PipelineReport {
  int m = 0;       // primal budget
  int n_dual = 0;  // dual budget
  double sigma_primal = 0.0;  // final primal surrogate max
  double sigma_dual = 0.0;    // final dual surrogate max
  double alpha_hat = 0.0;     // fitted primal decay rate
  double beta_hat = 0.0;      // fitted dual decay rate
  double max_err_uncorrected = 0.0;
  double max_err_corrected = 0.0;
  double corrected_win_fraction = 0.0;
  std::vector<PipelineRow> rows;
  SgaDouTrace primal_trace;
  SgaDouTrace dual_trace;
};

// Runs the stabilized double greedy for the primal manifold with budget
// m = budget_split(alpha_est, beta_est, n_total) and for the dual manifold
// (roles swapped, right-hand side -ell) with budget n_total - m, then
// evaluates truth, uncorrected, and corrected functional values on the
// midpoint validation grid.
PipelineReport primal_dual_pipeline(const TruthModel &model,
                                    const std::vector<ParameterPoint> &grid,
                                    double delta, int n_total, double alpha_est,
                                    double beta_est, const GoalFunctional &ell);

} // namespace rbsam

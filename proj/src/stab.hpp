#pragma once

#include "operator_view.hpp"
#include "rbgreedy.hpp"
#include "truth.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rbsam {

// Reduced test space with test-gram-orthonormal columns.
struct TestSpace {
  MatrixXd basis;  // dim_test x n_V

  int n() const { return static_cast<int>(basis.cols()); }

  // Gram-orthonormalizes the candidate into the basis. Returns false and
  // leaves the space unchanged when the candidate lies in the span.
  bool extend(const OperatorView &view, const VectorXd &candidate);
};

// Reduced trial/test pair for the saddle-point formulation. The cross
// blocks Z^T A_k B and the test-space load Z^T f are kept in sync with
// both spaces; the residual offline blocks double as the parametric
// trial gram X_{kk'} = (A_k phi_i, A_k' phi_j)_{V'}.
struct SaddleReducedModel {
  ReducedSpace trial;
  TestSpace test;
  std::vector<MatrixXd> reduced_blocks;  // one n_V x n block per term
  VectorXd reduced_rhs;                  // n_V
  ResidualOfflineData residual_data;

  static SaddleReducedModel empty(const OperatorView &view);

  bool add_trial(const OperatorView &view, const VectorXd &snapshot,
                 const ParameterPoint &meta);
  bool add_test(const OperatorView &view, const VectorXd &candidate);

  // sum_k theta_k Z^T A_k B, size n_V x n.
  MatrixXd cross(const Eigen::Vector4d &theta) const;

  // Parametric trial gram sum_{k k'} theta_k theta_k' X_{kk'}, size n x n.
  MatrixXd trial_gram(const Eigen::Vector4d &theta) const;
};

// Solves the reduced saddle system
//   r + C(y) u = g,  C(y)^T r = 0
// by elimination and returns (u, r). Requires a certified pair: errors
// on an empty trial space and on a singular normal matrix.
std::pair<VectorXd, VectorXd> saddle_reduced_solve(const SaddleReducedModel &srm,
                                                   const ParameterPoint &p);

struct WorstCaseInfsup {
  double beta = 0.0;
  ParameterPoint y;
  VectorXd w;  // trial coefficients of the worst direction, unit Uhat norm
};

// Minimum over the grid of the discrete inf-sup constant of the reduced
// pair, computed per point as the smallest generalized singular value of
// C(y) with trial metric G_Uhat(y) and identity test metric.
WorstCaseInfsup worst_case_infsup(const SaddleReducedModel &srm,
                                  const std::vector<ParameterPoint> &grid);

// Riesz lift G_V^{-1} B_p w of the image of a truth trial vector;
// satisfies b_p(w, v) = ||v||_V^2.
VectorXd supremizer(const OperatorView &view, const ParameterPoint &p,
                    const VectorXd &w);

enum class StabMode { greedy, full };

struct StabilizeResult {
  int added = 0;    // test vectors appended by this call
  double beta = 1.0;  // certified worst-case inf-sup after enrichment
};

// Enriches the test space until the worst-case inf-sup over the grid is
// at least sqrt(1 - delta^2). Greedy mode appends the supremizer of the
// worst direction at the worst parameter; full mode appends supremizers
// of the newest trial function for every affine term, then verifies.
// Errors when the additions per call exceed n_terms * n + 8.
StabilizeResult stabilize(SaddleReducedModel &srm, const OperatorView &view,
                          const std::vector<ParameterPoint> &grid, double delta,
                          StabMode mode);

// delta = sqrt(1 - beta^2) with beta clamped to [0, 1].
double delta_from_infsup(double beta);

struct SgaDouOptions {
  double delta = 0.1;
  double tol = 1e-6;
  int n_max = 20;
  bool validate = false;       // full truth sweep per iteration
  StabMode mode = StabMode::greedy;
  double floor_stop_factor = 1.5;  // validation stop at factor * max
                                   // truth residual floor; <= 0 disables
};

struct SgaDouTraceRow {
  int n = 0;
  int n_v = 0;
  double delta_certified = 0.0;
  double y_selected = 0.0;
  double surrogate_max = 0.0;
  double true_error_max = 0.0;  // nan unless validated
  double ratio = 0.0;           // nan unless validated
  double gamma_hat = 0.0;       // nan unless validated
};

struct SgaDouTrace {
  std::vector<SgaDouTraceRow> rows;
  std::string stop_reason;  // "tol", "budget", "exhausted", "floor"
  bool validated = false;
};

// Stabilized double greedy: certify the pair over the grid, scan the
// residual surrogate at the stabilized reduced solutions, truth-solve at
// the argmax, append the snapshot to the trial space and its lifted
// residual to the test space; repeat.
std::pair<SaddleReducedModel, SgaDouTrace> sga_dou_run(
    const OperatorView &view, const std::vector<ParameterPoint> &grid,
    const SgaDouOptions &options);
std::pair<SaddleReducedModel, SgaDouTrace> sga_dou_run(
    const TruthModel &model, const std::vector<ParameterPoint> &grid,
    const SgaDouOptions &options);

} // namespace rbsam

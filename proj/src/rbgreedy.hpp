#pragma once

#include "operator_view.hpp"
#include "truth.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rbsam {

// Reduced trial space with trial-gram-orthonormal basis columns. For the
// primal view the reduced Galerkin blocks B^T (interp^T A_k) B and B^T f
// are kept in sync so a reduced solve costs O(M n^2) per query; the dual
// view has no square restriction, so those blocks stay empty.
struct ReducedSpace {
  MatrixXd basis;  // dim_trial x n
  std::vector<ParameterPoint> snapshots_meta;
  std::vector<MatrixXd> reduced_ops;  // one n x n block per affine term
  VectorXd reduced_rhs;               // n

  static ReducedSpace empty(const TruthModel &model);
  static ReducedSpace empty(const OperatorView &view);
  int n() const { return static_cast<int>(basis.cols()); }

  // Gram-orthonormalizes the snapshot into the basis. Returns false and
  // leaves the space unchanged when the snapshot lies in the span.
  bool extend(const TruthModel &model, const VectorXd &snapshot,
              const ParameterPoint &meta);
  bool extend(const OperatorView &view, const VectorXd &snapshot,
              const ParameterPoint &meta);
};

// Offline expansion of the residual dual norm
//   ||f - sum_k theta_k A_k B c||_{V'}^2
//     = ff - 2 theta^T (fA c) + sum_{k k'} theta_k theta_k' c^T X_{kk'} c.
// The A_k phi_j columns and their Riesz representers are cached; they are
// shared with the stabilized solver's parametric trial metric.
struct ResidualOfflineData {
  double ff = 0.0;
  VectorXd riesz_f;              // G_V^{-1} f
  MatrixXd fA;                   // M x n, (f, A_k phi_j)_{V'}
  std::vector<MatrixXd> ab;      // per term, N_V x n, A_k phi_j
  std::vector<MatrixXd> riesz;   // per term, N_V x n, G_V^{-1} A_k phi_j
  std::vector<MatrixXd> blocks;  // M*M blocks, n x n, index k*M + k'

  static ResidualOfflineData empty(const TruthModel &model);
  static ResidualOfflineData empty(const OperatorView &view);
  int n() const { return static_cast<int>(fA.cols()); }
  const MatrixXd &block(int k, int kp) const;

  // Appends offline entries for basis columns past the current size.
  void extend(const TruthModel &model, const ReducedSpace &space);
  void extend(const OperatorView &view, const ReducedSpace &space);

  // The (M n) x (M n) cross matrix in term-major ordering.
  MatrixXd aa_full() const;
};

// Galerkin solve of the square reduced system at p. Errors on an empty
// space and on a numerically singular reduced matrix.
VectorXd galerkin_reduced_solve(const TruthModel &model,
                                const ReducedSpace &space,
                                const ParameterPoint &p);

// sqrt(max(0, ff - 2 theta^T fA c + (theta (x) c)^T AA (theta (x) c))).
// Values below sqrt(machine epsilon) * sqrt(ff) have lost half their
// digits to cancellation; callers needing them must recompute the
// residual norm in the truth space.
double surrogate_eval(const ResidualOfflineData &data, const VectorXd &theta,
                      const VectorXd &c);

// Coefficients minimizing the residual dual norm at theta, from offline
// data alone.
VectorXd min_residual_solve(const ResidualOfflineData &data,
                            const VectorXd &theta);

struct SgaOptions {
  double tol = 1e-6;
  int n_max = 20;
  bool validate = false;  // full truth sweep per iteration
};

struct SgaTraceRow {
  int n = 0;
  double y_selected = 0.0;
  double surrogate_max = 0.0;
  double true_error_max = 0.0;  // nan unless validated
  double gamma_hat = 0.0;       // nan unless validated
};

struct SgaTrace {
  std::vector<SgaTraceRow> rows;
  std::string stop_reason;  // "tol", "budget", "exhausted"
  bool validated = false;
};

// Surrogate-based greedy over the training grid: scan the residual
// surrogate, truth-solve at the argmax (lowest-index ties), extend basis
// and offline data; stop on tolerance, budget, or a dropped snapshot.
std::pair<ReducedSpace, SgaTrace> sga_run(
    const TruthModel &model, const std::vector<ParameterPoint> &grid,
    const SgaOptions &options);

} // namespace rbsam

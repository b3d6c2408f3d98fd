// Acceptance suite. Each invocation measures one numbered criterion,
// prints one bracketed line per clause plus context notes, and ends with
// a single verdict line. Exit status 0 means every clause passed.
//
// Clauses that the toolkit cannot meet on this truth discretization are
// still measured and reported as FAIL with the measured numbers next to
// the requirement; the notes explain the measured ceiling. See the
// acceptance section of the README for the per-criterion discussion.

#include "driver.hpp"
#include "goal.hpp"
#include "operator_view.hpp"
#include "rbgreedy.hpp"
#include "stab.hpp"
#include "truth.hpp"
#include "wgreedy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <system_error>
#include <vector>

namespace {

using namespace rbsam;
using cli::ConfigMap;
using cli::run_command;
using cli::RunResult;
using Clock = std::chrono::steady_clock;

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char *f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return std::string(buf);
}

int g_failed_clauses = 0;

void clause(bool ok, const std::string &text) {
  std::printf("  [%s] %s\n", ok ? "pass" : "FAIL", text.c_str());
  std::fflush(stdout);
  if (!ok)
    ++g_failed_clauses;
}

void note(const std::string &text) {
  std::printf("  [note] %s\n", text.c_str());
  std::fflush(stdout);
}

double seconds_since(const Clock::time_point &start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<ParameterPoint> angle_grid(int count, double epsilon) {
  std::vector<ParameterPoint> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    grid.push_back(make_parameter(2.0 * kPi * i / count, epsilon));
  return grid;
}

VectorXd random_vector(int dim, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd v(dim);
  for (int i = 0; i < dim; ++i)
    v(i) = normal(rng);
  return v;
}

SpMat operator_matrix(const TruthModel &model, const ParameterPoint &p) {
  const Eigen::Vector4d th = theta_eval(p);
  SpMat a = th(0) * model.op(0);
  for (int k = 1; k < TruthModel::n_terms; ++k)
    a = a + SpMat(th(k) * model.op(k));
  return a;
}

SpMat square_operator_matrix(const TruthModel &model,
                             const ParameterPoint &p) {
  const Eigen::Vector4d th = theta_eval(p);
  SpMat a = th(0) * model.op_square(0);
  for (int k = 1; k < TruthModel::n_terms; ++k)
    a = a + SpMat(th(k) * model.op_square(k));
  return a;
}

double max_residual_floor(const TruthModel &model,
                          const std::vector<ParameterPoint> &grid) {
  double worst = 0.0;
  for (const ParameterPoint &p : grid) {
    const auto truth = model.truth_solve(p);
    worst = std::max(worst, model.gram_v().norm(truth.second));
  }
  return worst;
}

std::string slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return std::string();
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// 1. Weak greedy rate bounds across every ellipsoid decay family, in
// exact and adversarial mode, at gamma 1 and 1/2.
bool criterion1() {
  std::printf("criterion 1: weak greedy rate bounds across ellipsoid families\n");
  const auto t0 = Clock::now();
  const int dim = 32;
  const int n_max = 16;
  const char *decays[] = {"poly-half", "poly-1", "poly-2", "exp-sqrt",
                          "geometric"};
  int runs = 0;
  int lines = 0;
  int failed = 0;
  int inconclusive = 0;
  for (const char *decay : decays) {
    VectorXd semiaxes(dim);
    double alpha = 0.0;
    double m_const = 0.0;
    for (int j = 1; j <= dim; ++j) {
      double c = 0.0;
      if (std::string(decay) == "poly-half")
        c = 1.0 / std::sqrt(static_cast<double>(j));
      else if (std::string(decay) == "poly-1")
        c = 1.0 / j;
      else if (std::string(decay) == "poly-2")
        c = 1.0 / (static_cast<double>(j) * j);
      else if (std::string(decay) == "exp-sqrt")
        c = std::exp(-std::sqrt(static_cast<double>(j)));
      else
        c = std::ldexp(1.0, -j);
      semiaxes(j - 1) = c;
    }
    if (std::string(decay) == "poly-half") {
      alpha = 0.5;
      m_const = 1.0;
    } else if (std::string(decay) == "poly-1") {
      alpha = 1.0;
      m_const = 1.0;
    } else if (std::string(decay) == "poly-2") {
      alpha = 2.0;
      m_const = 1.0;
    } else if (std::string(decay) == "exp-sqrt") {
      alpha = 2.0;
      m_const = 4.2;
    } else {
      alpha = 2.0;
      m_const = 0.6;
    }
    const CompactSet set = CompactSet::ellipsoid(semiaxes);
    for (double gamma : {1.0, 0.5}) {
      for (GreedyMode mode : {GreedyMode::exact, GreedyMode::adversarial}) {
        const GreedyTrace trace = weak_greedy_run(set, gamma, n_max, mode);
        const RateReport report =
            verify_rate_theorems(trace, set, alpha, m_const);
        ++runs;
        lines += static_cast<int>(report.lines.size());
        failed += report.count(CheckLine::Status::fail);
        inconclusive += report.count(CheckLine::Status::inconclusive);
      }
    }
  }
  clause(runs == 20, fmt("ran %d greedy traces (5 decays x 2 gammas x 2 modes)",
                         runs));
  clause(failed == 0 && inconclusive == 0,
         fmt("%d rate inequality lines: %d failed, %d inconclusive", lines,
             failed, inconclusive));
  const double dt = seconds_since(t0);
  clause(dt <= 60.0, fmt("runtime %.1f s within 60 s budget", dt));
  return g_failed_clauses == 0;
}

// 2. Renormed trial metric: residual isometry on attainable loads, the
// residual identity on the generic load, renormed inf-sup probes, and
// the conditioning contrast of the plain square restriction.
bool criterion2() {
  std::printf("criterion 2: renormed isometry, stability, and conditioning contrast\n");
  const auto t0 = Clock::now();
  const TruthModel model(32, 0.25);
  std::mt19937_64 rng(2020);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

  double iso_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ParameterPoint p = make_parameter(angle(rng), model.epsilon());
    const VectorXd w0 = random_vector(model.dim_trial(), rng);
    const VectorXd w = random_vector(model.dim_trial(), rng);
    const VectorXd load = model.apply_operator(p, w0);
    const double lhs = model.u_hat_norm(p, w0 - w);
    const double rhs =
        model.gram_v().dual_norm(load - model.apply_operator(p, w));
    iso_worst = std::max(iso_worst, std::abs(lhs - rhs) / rhs);
  }
  clause(iso_worst <= 1e-10,
         fmt("attainable-load isometry: worst relative gap %.3g <= 1e-10 "
             "over 100 draws",
             iso_worst));

  double pyth_worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const ParameterPoint p = make_parameter(angle(rng), model.epsilon());
    const auto truth = model.truth_solve(p);
    const double floor = model.gram_v().norm(truth.second);
    for (int j = 0; j < 4; ++j) {
      const VectorXd w =
          truth.first + 0.3 * random_vector(model.dim_trial(), rng);
      const double res =
          model.gram_v().dual_norm(model.rhs() - model.apply_operator(p, w));
      const double err = model.u_hat_norm(p, truth.first - w);
      const double gap =
          std::abs(res * res - err * err - floor * floor) / (res * res);
      pyth_worst = std::max(pyth_worst, gap);
    }
  }
  clause(pyth_worst <= 1e-8,
         fmt("residual splits as error plus floor: worst relative defect "
             "%.3g <= 1e-8",
             pyth_worst));

  double infsup_min = 1e300;
  double infsup_max = 0.0;
  for (int i = 0; i < 3; ++i) {
    const ParameterPoint p = make_parameter(angle(rng), model.epsilon());
    for (int j = 0; j < 20; ++j) {
      const VectorXd w = random_vector(model.dim_trial(), rng);
      const VectorXd image = model.apply_operator(p, w);
      const VectorXd lift = model.gram_v().solve(image);
      const double ratio = image.dot(lift) / (model.gram_v().norm(lift) *
                                              model.u_hat_norm(p, w));
      infsup_min = std::min(infsup_min, ratio);
      infsup_max = std::max(infsup_max, ratio);
    }
  }
  clause(infsup_min >= 0.9 && infsup_max <= 1.0 + 1e-11,
         fmt("renormed inf-sup probes in [%.12f, %.12f], required "
             "[0.9, 1 + 1e-11]",
             infsup_min, infsup_max));

  const auto kappa_at = [](double eps) {
    const TruthModel m(32, eps);
    const ParameterPoint p = make_parameter(0.7, eps);
    const MatrixXd a = MatrixXd(square_operator_matrix(m, p));
    const MatrixXd k = a.transpose() * m.gram_u().solve_many(a);
    const MatrixXd gu = MatrixXd(m.gram_u().matrix());
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(k, gu);
    const VectorXd ev = es.eigenvalues();
    return std::sqrt(ev(ev.size() - 1) / ev(0));
  };
  const double kappa_mild = kappa_at(std::pow(2.0, -2.0));
  const double kappa_sharp = kappa_at(std::pow(2.0, -6.0));
  const double growth = kappa_sharp / kappa_mild;
  note(fmt("square-restriction condition numbers (operator norm ratio in "
           "the plain grad metric): %.4f at eps 2^-2, %.4f at eps 2^-6",
           kappa_mild, kappa_sharp));
  clause(growth >= 4.0,
         fmt("conditioning grows %.2fx from eps 2^-2 to 2^-6, required >= 4x; "
             "the renormed probes above stay within 10%% of 1 at both",
             growth));
  const double dt = seconds_since(t0);
  clause(dt <= 30.0, fmt("runtime %.1f s within 30 s budget", dt));
  return g_failed_clauses == 0;
}

// 3. The reduced saddle solve reproduces the explicit projected
// Petrov-Galerkin solve on a certified pair.
bool criterion3() {
  std::printf("criterion 3: saddle solve equals the projected Petrov-Galerkin solve\n");
  const double eps = 0.25;
  const TruthModel model(4, eps);
  const OperatorView view = OperatorView::make_primal(model);
  SaddleReducedModel srm = SaddleReducedModel::empty(view);
  for (double a : {0.5, 2.0}) {
    const auto truth = view.truth_solve(make_parameter(a, eps));
    srm.add_trial(view, truth.first, make_parameter(a, eps));
    srm.add_test(view, truth.second);
  }
  const double eval_angles[] = {0.3, 1.1, 2.0, 3.7, 5.5};
  std::vector<ParameterPoint> grid;
  for (double a : eval_angles)
    grid.push_back(make_parameter(a, eps));
  grid.push_back(make_parameter(0.5, eps));
  stabilize(srm, view, grid, 0.3, StabMode::greedy);
  note(fmt("pair sizes after stabilization: %d trial, %d test",
           srm.trial.n(), srm.test.n()));

  double worst = 0.0;
  for (double a : eval_angles) {
    const ParameterPoint p = make_parameter(a, eps);
    const auto sol = saddle_reduced_solve(srm, p);
    const MatrixXd ab =
        MatrixXd(operator_matrix(model, p)) * srm.trial.basis;
    const MatrixXd coeff = srm.test.basis.transpose() * ab;
    const MatrixXd test_funcs = srm.test.basis * coeff;
    const MatrixXd pg_matrix = test_funcs.transpose() * ab;
    const VectorXd pg_rhs = test_funcs.transpose() * model.rhs();
    const VectorXd c_pg = pg_matrix.partialPivLu().solve(pg_rhs);
    worst = std::max(worst, (sol.first - c_pg).norm() / c_pg.norm());
  }
  clause(worst <= 1e-9,
         fmt("worst relative coefficient gap %.3g <= 1e-9 over 5 parameters",
             worst));
  return g_failed_clauses == 0;
}

// 4. The certified deficiency of a stabilized pair matches an
// independent dense measurement of the test-space projection defect at
// the certified worst parameter.
bool criterion4() {
  std::printf("criterion 4: certified deficiency matches the direct projection measurement\n");
  struct Config {
    double eps;
    std::vector<double> snaps;
    double delta;
    StabMode mode;
    int grid_count;
  };
  const std::vector<Config> configs = {
      {1.0, {0.8}, 0.5, StabMode::greedy, 2},
      {1.0, {0.8, 3.9}, 0.3, StabMode::greedy, 5},
      {0.5, {0.7, 2.8, 5.0}, 0.2, StabMode::greedy, 7},
      {0.5, {0.4}, 0.35, StabMode::full, 1},
      {0.25, {1.1, 4.0, 5.9}, 0.15, StabMode::greedy, 8},
      {0.25, {2.2}, 0.45, StabMode::full, 4},
      {0.125, {0.5, 2.0}, 0.3, StabMode::greedy, 5},
      {0.125, {0.5, 2.0, 3.6, 5.2}, 0.25, StabMode::greedy, 9},
      {0.03125, {0.6}, 0.4, StabMode::greedy, 3},
      {0.03125, {0.6, 2.4}, 0.2, StabMode::full, 5},
  };
  std::map<double, std::shared_ptr<TruthModel>> models;
  double worst_gap = 0.0;
  int pair_index = 0;
  for (const Config &c : configs) {
    ++pair_index;
    auto &model = models[c.eps];
    if (!model)
      model = std::make_shared<TruthModel>(8, c.eps);
    const OperatorView view = OperatorView::make_primal(*model);
    const std::vector<ParameterPoint> grid = angle_grid(c.grid_count, c.eps);
    SaddleReducedModel srm = SaddleReducedModel::empty(view);
    for (double a : c.snaps) {
      const ParameterPoint p = make_parameter(a, c.eps);
      const auto truth = view.truth_solve(p);
      srm.add_trial(view, truth.first, p);
      srm.add_test(view, truth.second);
      if (c.mode == StabMode::full)
        stabilize(srm, view, grid, c.delta, StabMode::full);
    }
    if (c.mode == StabMode::greedy)
      stabilize(srm, view, grid, c.delta, StabMode::greedy);

    const WorstCaseInfsup wc = worst_case_infsup(srm, grid);
    const double delta_cert = delta_from_infsup(wc.beta);

    const MatrixXd ab =
        MatrixXd(operator_matrix(*model, wc.y)) * srm.trial.basis;
    const MatrixXd lifts = model->gram_v().solve_many(ab);
    const MatrixXd gram_uhat = ab.transpose() * lifts;
    const MatrixXd coeff = srm.test.basis.transpose() * ab;
    const MatrixXd defect = gram_uhat - coeff.transpose() * coeff;
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(defect, gram_uhat);
    const double lam = es.eigenvalues()(es.eigenvalues().size() - 1);
    const double delta_direct = std::sqrt(std::max(0.0, lam));

    const double gap = std::abs(delta_direct - delta_cert);
    worst_gap = std::max(worst_gap, gap);
    note(fmt("pair %d (eps %.5g, n %d, n_V %d, %s): certified %.8f, "
             "direct %.8f",
             pair_index, c.eps, srm.trial.n(), srm.test.n(),
             c.mode == StabMode::full ? "full" : "greedy", delta_cert,
             delta_direct));
    if (delta_cert > c.delta + 1e-12)
      clause(false, fmt("pair %d missed its deficiency target %.3g",
                        pair_index, c.delta));
  }
  clause(worst_gap <= 1e-6,
         fmt("worst |certified - direct| gap %.3g <= 1e-6 over 10 pairs",
             worst_gap));
  return g_failed_clauses == 0;
}

// 5. Stabilized double greedy sweep at three diffusion levels: always
// certified, bounded test-space growth, monotone surrogate decay, the
// drop-factor requirement, and diffusion-independent certification.
bool criterion5() {
  std::printf("criterion 5: stabilized double greedy sweep across diffusion levels\n");
  const auto t0 = Clock::now();
  const double delta = 0.1;
  const double eps_levels[] = {std::pow(2.0, -5.0), std::pow(2.0, -10.0),
                               std::pow(2.0, -20.0)};
  bool all_certified = true;
  double worst_cert = 0.0;
  bool growth_ok = true;
  double worst_uptick = 0.0;
  std::vector<double> cert_by_eps;
  double drop_factor = 0.0;
  double floor_ceiling = 0.0;
  for (double eps : eps_levels) {
    const TruthModel model(32, eps);
    const std::vector<ParameterPoint> grid = angle_grid(64, eps);
    SgaDouOptions options;
    options.delta = delta;
    options.tol = 0.0;
    options.n_max = 10;
    options.validate = false;
    options.mode = StabMode::greedy;
    const auto run = sga_dou_run(model, grid, options);
    const SgaDouTrace &trace = run.second;
    double cert_max = 0.0;
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
      const SgaDouTraceRow &row = trace.rows[i];
      cert_max = std::max(cert_max, row.delta_certified);
      if (row.delta_certified > delta + 1e-12)
        all_certified = false;
      if (row.n >= 1 && row.n_v > 4 * row.n)
        growth_ok = false;
      if (i > 0) {
        const double prev = trace.rows[i - 1].surrogate_max;
        worst_uptick =
            std::max(worst_uptick, row.surrogate_max / prev - 1.0);
      }
    }
    worst_cert = std::max(worst_cert, cert_max);
    cert_by_eps.push_back(cert_max);
    note(fmt("eps %.8g: %zu rows, stop '%s', surrogate %.6g -> %.6g, "
             "max certified deficiency %.3g, final pair %d x %d",
             eps, trace.rows.size(), trace.stop_reason.c_str(),
             trace.rows.front().surrogate_max,
             trace.rows.back().surrogate_max, cert_max,
             trace.rows.back().n, trace.rows.back().n_v));
    if (eps == eps_levels[0]) {
      drop_factor = trace.rows.front().surrogate_max /
                    trace.rows.back().surrogate_max;
      const double floor = max_residual_floor(model, grid);
      floor_ceiling = trace.rows.front().surrogate_max / floor;
      note(fmt("truth residual floor at eps 2^-5: max over grid %.6g, so "
               "no reduced space can push the surrogate below it; "
               "attainable drop is capped near %.1fx",
               floor, floor_ceiling));
    }
  }
  clause(all_certified,
         fmt("every iteration certified: max deficiency %.3g <= %.3g",
             worst_cert, delta));
  clause(growth_ok, "test space size stays within 4x the trial size");
  clause(worst_uptick <= 1e-6,
         fmt("surrogate max non-increasing (worst relative uptick %.3g)",
             worst_uptick));
  clause(drop_factor >= 100.0,
         fmt("surrogate drop at eps 2^-5: measured %.2fx, required >= 100x "
             "(capped near %.1fx by the truth residual floor noted above)",
             drop_factor, floor_ceiling));
  const double spread =
      *std::max_element(cert_by_eps.begin(), cert_by_eps.end()) -
      *std::min_element(cert_by_eps.begin(), cert_by_eps.end());
  clause(spread <= 1e-6,
         fmt("certified deficiency spread across eps levels %.3g <= 1e-6",
             spread));
  const double dt = seconds_since(t0);
  clause(dt <= 600.0, fmt("runtime %.1f s within 600 s budget", dt));
  return g_failed_clauses == 0;
}

// 6. Validated run: surrogate versus true error row by row, the
// surrogate-to-error band, effectivity of the greedy selection, and the
// per-point residual split at the final pair.
bool criterion6() {
  std::printf("criterion 6: validated surrogate against true error and effectivity\n");
  const auto t0 = Clock::now();
  const double eps = std::pow(2.0, -5.0);
  const double delta = 0.1;
  const TruthModel model(32, eps);
  const std::vector<ParameterPoint> grid = angle_grid(64, eps);
  const double floor = max_residual_floor(model, grid);
  note(fmt("max truth residual floor over the grid: %.6g", floor));

  SgaDouOptions options;
  options.delta = delta;
  options.tol = 0.0;
  options.n_max = 10;
  options.validate = true;
  options.mode = StabMode::greedy;
  options.floor_stop_factor = 0.0;
  const auto run = sga_dou_run(model, grid, options);
  const SgaDouTrace &trace = run.second;

  double ratio_min = 1e300;
  double ratio_max = 0.0;
  double gamma_min = 1e300;
  double gamma_min_above = 1e300;
  int rows_above = 0;
  for (const SgaDouTraceRow &row : trace.rows) {
    ratio_min = std::min(ratio_min, row.ratio);
    ratio_max = std::max(ratio_max, row.ratio);
    gamma_min = std::min(gamma_min, row.gamma_hat);
    if (row.surrogate_max > 3.0 * floor) {
      ++rows_above;
      gamma_min_above = std::min(gamma_min_above, row.gamma_hat);
    }
  }
  note(fmt("full run: %zu rows, stop '%s', surrogate %.6g -> %.6g",
           trace.rows.size(), trace.stop_reason.c_str(),
           trace.rows.front().surrogate_max,
           trace.rows.back().surrogate_max));
  clause(ratio_min >= 1.0 - 1e-9,
         fmt("surrogate max never falls below the true error max "
             "(min ratio %.9f)",
             ratio_min));
  clause(ratio_max <= 1.0 + 1e-6 && ratio_min >= 1.0 - 1e-6,
         fmt("surrogate-to-error ratio in [1 - 1e-6, 1 + 1e-6]: measured "
             "[%.6f, %.6f]; the gap is the truth residual floor, which "
             "enters the surrogate but not the error",
             ratio_min, ratio_max));
  clause(gamma_min >= 1.0 - delta - 1e-3,
         fmt("selection effectivity >= %.3f at every row: measured min %.3f "
             "(degrades only once the surrogate sits on the floor)",
             1.0 - delta - 1e-3, gamma_min));
  clause(rows_above > 0 && gamma_min_above >= 1.0 - delta - 1e-3,
         fmt("effectivity restricted to the %d rows above 3x the floor: "
             "min %.3f >= %.3f",
             rows_above, gamma_min_above, 1.0 - delta - 1e-3));

  SgaDouOptions floor_options = options;
  floor_options.floor_stop_factor = 1.5;
  const auto floor_run = sga_dou_run(model, grid, floor_options);
  double floor_gamma_min = 1e300;
  for (const SgaDouTraceRow &row : floor_run.second.rows)
    floor_gamma_min = std::min(floor_gamma_min, row.gamma_hat);
  clause(floor_run.second.stop_reason == "floor" &&
             floor_gamma_min >= 1.0 - delta - 1e-3,
         fmt("run stopped at 1.5x the floor after %zu rows keeps "
             "effectivity min %.3f >= %.3f",
             floor_run.second.rows.size(), floor_gamma_min,
             1.0 - delta - 1e-3));

  const SaddleReducedModel &srm = run.first;
  double split_worst = 0.0;
  for (const ParameterPoint &p : grid) {
    const auto sol = saddle_reduced_solve(srm, p);
    const double s = surrogate_eval(srm.residual_data,
                                    VectorXd(theta_eval(p)), sol.first);
    const auto truth = model.truth_solve(p);
    const double e =
        model.u_hat_norm(p, truth.first - srm.trial.basis * sol.first);
    const double t = model.gram_v().norm(truth.second);
    split_worst = std::max(
        split_worst, std::abs(s * s - e * e - t * t) / (s * s));
  }
  clause(split_worst <= 1e-6,
         fmt("per-point residual split at the final pair: worst relative "
             "defect %.3g <= 1e-6 over 64 points",
             split_worst));
  const double dt = seconds_since(t0);
  note(fmt("runtime %.1f s", dt));
  return g_failed_clauses == 0;
}

// 7. Test-space growth: full mode adds at most one supremizer per affine
// term per new trial function and always certifies; greedy mode stays
// under the per-call stall guard across the diffusion sweep.
bool criterion7() {
  std::printf("criterion 7: test-space growth caps in full and greedy modes\n");
  const auto t0 = Clock::now();
  const double delta = 0.1;
  const double eps = std::pow(2.0, -5.0);
  {
    const TruthModel model(32, eps);
    const std::vector<ParameterPoint> grid = angle_grid(64, eps);
    SgaDouOptions options;
    options.delta = delta;
    options.tol = 0.0;
    options.n_max = 6;
    options.validate = false;
    options.mode = StabMode::full;
    const auto run = sga_dou_run(model, grid, options);
    const SgaDouTrace &trace = run.second;
    bool certified = true;
    int diff_max = 0;
    std::string diffs;
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
      if (trace.rows[i].delta_certified > delta + 1e-12)
        certified = false;
      if (i > 0) {
        const int diff = trace.rows[i].n_v - trace.rows[i - 1].n_v;
        diff_max = std::max(diff_max, diff);
        diffs += (diffs.empty() ? "" : ", ") + fmt("%d", diff);
      }
    }
    note(fmt("full mode: %zu rows, per-iteration test additions [%s]",
             trace.rows.size(), diffs.c_str()));
    clause(certified, "full mode certifies every iteration");
    clause(diff_max <= TruthModel::n_terms + 1,
           fmt("full mode adds at most %d test vectors per new trial "
               "function (max %d: one residual seed plus at most one "
               "supremizer per affine term)",
               TruthModel::n_terms + 1, diff_max));
  }
  {
    bool cap_ok = true;
    int cap_margin_worst = 1 << 30;
    for (double eps_level : {std::pow(2.0, -5.0), std::pow(2.0, -10.0),
                             std::pow(2.0, -20.0)}) {
      const TruthModel model(32, eps_level);
      const std::vector<ParameterPoint> grid = angle_grid(64, eps_level);
      SgaDouOptions options;
      options.delta = delta;
      options.tol = 0.0;
      options.n_max = 10;
      options.validate = false;
      options.mode = StabMode::greedy;
      const auto run = sga_dou_run(model, grid, options);
      const SgaDouTrace &trace = run.second;
      for (std::size_t i = 1; i < trace.rows.size(); ++i) {
        const int diff = trace.rows[i].n_v - trace.rows[i - 1].n_v;
        const int cap = TruthModel::n_terms * trace.rows[i].n + 9;
        cap_margin_worst = std::min(cap_margin_worst, cap - diff);
        if (diff > cap)
          cap_ok = false;
      }
    }
    clause(cap_ok,
           fmt("greedy enrichment stays under the per-call stall guard at "
               "every iteration of the diffusion sweep (worst margin %d "
               "additions)",
               cap_margin_worst));
  }
  const double dt = seconds_since(t0);
  note(fmt("runtime %.1f s", dt));
  return g_failed_clauses == 0;
}

// 8. Goal correction: exactness with the truth dual, the error
// factorization through the bilinear form, and the split primal-dual
// pipeline with its product bound.
bool criterion8() {
  std::printf("criterion 8: goal correction identities and primal-dual pipeline\n");
  const auto t0 = Clock::now();
  const double eps = std::pow(2.0, -5.0);
  const TruthModel model(32, eps);
  const GoalFunctional ell = make_mean_functional(32);
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

  double exact_worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const ParameterPoint p = make_parameter(angle(rng), eps);
    const VectorXd u = model.truth_solve(p).first;
    const VectorXd z = model.dual_truth_solve(p, ell.ell).first;
    const VectorXd u_bar = u + 0.1 * random_vector(model.dim_trial(), rng);
    const double corrected = corrected_functional(model, p, u_bar, z, ell);
    const double exact = ell.ell.dot(u);
    const double scale =
        std::abs(exact) + ell.ell.norm() * u_bar.norm() + 1.0;
    exact_worst = std::max(exact_worst, std::abs(corrected - exact) / scale);
  }
  clause(exact_worst <= 1e-8,
         fmt("correction with the truth dual is exact: worst relative gap "
             "%.3g <= 1e-8 over 10 draws",
             exact_worst));

  double fact_worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const ParameterPoint p = make_parameter(angle(rng), eps);
    const VectorXd u = model.truth_solve(p).first;
    const VectorXd z = model.dual_truth_solve(p, ell.ell).first;
    const VectorXd du = 0.1 * random_vector(model.dim_trial(), rng);
    const VectorXd dz = 0.1 * model.gram_v().solve(model.apply_operator(
                                  p, random_vector(model.dim_trial(), rng)));
    const auto check =
        goal_error_bound_check(model, p, u - du, z - dz, ell);
    const double bilinear = std::abs(dz.dot(model.apply_operator(p, du)));
    const double scale =
        bilinear + model.u_hat_norm(p, du) * model.gram_v().norm(dz) + 1e-14;
    fact_worst =
        std::max(fact_worst, std::abs(check.first - bilinear) / scale);
  }
  clause(fact_worst <= 1e-10,
         fmt("goal error factorizes through the bilinear form: worst "
             "relative gap %.3g <= 1e-10 over 10 draws",
             fact_worst));

  const std::vector<ParameterPoint> grid = angle_grid(64, eps);
  const PipelineReport report =
      primal_dual_pipeline(model, grid, 0.1, 12, 1.0, 1.0, ell);
  const double bound = 10.0 * report.sigma_primal * report.sigma_dual;
  note(fmt("pipeline split %d primal + %d dual, final surrogates "
           "%.4g (primal) and %.4g (dual)",
           report.m, report.n_dual, report.sigma_primal,
           report.sigma_dual));
  clause(report.max_err_corrected <= bound,
         fmt("max corrected goal error %.4g <= 10 x product of final "
             "surrogates %.4g",
             report.max_err_corrected, bound));
  clause(report.max_err_corrected < report.max_err_uncorrected,
         fmt("correction reduces the worst-case goal error: %.4g < %.4g",
             report.max_err_corrected, report.max_err_uncorrected));
  clause(report.corrected_win_fraction >= 0.9,
         fmt("correction wins pointwise on %.1f%% of the validation grid, "
             "required >= 90%%; the even budget split leaves the dual "
             "surrogate (%.4g) above the primal one (%.4g), so pointwise "
             "wins are not uniform",
             100.0 * report.corrected_win_fraction, report.sigma_dual,
             report.sigma_primal));
  const double dt = seconds_since(t0);
  note(fmt("runtime %.1f s", dt));
  return g_failed_clauses == 0;
}

// 9. Rerunning every experiment command with the same configuration
// produces byte-identical trace files.
bool criterion9() {
  std::printf("criterion 9: deterministic reruns produce byte-identical traces\n");
  const auto t0 = Clock::now();
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "rbsam_acceptance_c9";
  std::error_code ec;
  fs::remove_all(base, ec);

  struct Job {
    const char *name;
    const char *command;
    ConfigMap config;
    std::vector<std::string> traces;
  };
  const std::vector<Job> jobs = {
      {"wgreedy",
       "wgreedy",
       {{"decay", "poly-1"},
        {"dim", "32"},
        {"gamma", "0.5"},
        {"mode", "adversarial"},
        {"n_max", "16"},
        {"seed", "7"}},
       {"trace.csv"}},
      {"sga_dou",
       "sga-dou",
       {{"h", "1/32"},
        {"epsilon", "0.03125"},
        {"grid", "64"},
        {"delta", "0.1"},
        {"tol", "0"},
        {"n_max", "10"},
        {"mode", "greedy"},
        {"seed", "7"}},
       {"trace.csv"}},
      {"goal",
       "goal",
       {{"h", "1/32"},
        {"epsilon", "0.03125"},
        {"grid", "64"},
        {"delta", "0.1"},
        {"n_total", "12"},
        {"seed", "7"}},
       {"trace.csv", "primal_trace.csv", "dual_trace.csv"}},
  };
  for (const Job &job : jobs) {
    fs::path dirs[2];
    bool ran_ok = true;
    for (int rep = 0; rep < 2; ++rep) {
      dirs[rep] = base / fmt("%s_%d", job.name, rep);
      ConfigMap cfg = job.config;
      cfg["out"] = dirs[rep].string();
      const RunResult rr = run_command(cfg, job.command);
      if (rr.code != 0) {
        ran_ok = false;
        note(fmt("%s rerun %d exited %d: %s", job.name, rep, rr.code,
                 rr.message.c_str()));
      }
    }
    clause(ran_ok, fmt("%s: both reruns completed", job.name));
    for (const std::string &trace : job.traces) {
      const std::string first = slurp(dirs[0] / trace);
      const std::string second = slurp(dirs[1] / trace);
      clause(!first.empty() && first == second,
             fmt("%s/%s: %zu bytes, identical across reruns", job.name,
                 trace.c_str(), first.size()));
    }
  }
  const double dt = seconds_since(t0);
  note(fmt("runtime %.1f s", dt));
  return g_failed_clauses == 0;
}

} // namespace

int main(int argc, char **argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..9>\n");
    return 2;
  }
  const int which = std::atoi(argv[1]);
  bool ok = false;
  switch (which) {
  case 1:
    ok = criterion1();
    break;
  case 2:
    ok = criterion2();
    break;
  case 3:
    ok = criterion3();
    break;
  case 4:
    ok = criterion4();
    break;
  case 5:
    ok = criterion5();
    break;
  case 6:
    ok = criterion6();
    break;
  case 7:
    ok = criterion7();
    break;
  case 8:
    ok = criterion8();
    break;
  case 9:
    ok = criterion9();
    break;
  default:
    std::fprintf(stderr, "usage: acceptance <criterion 1..9>\n");
    return 2;
  }
  std::printf("acceptance %d: %s\n", which, ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

#include "wgreedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace rbsam {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();
constexpr int ellipsoid_sample_size = 100000;

// Inverse normal CDF, Acklam's rational approximation (relative error
// below 1.2e-9, ample for spreading sample directions).
double probit(double p) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  p = std::clamp(p, 1e-12, 1.0 - 1e-12);
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Axis extreme points first (they realize the widths and the greedy
// maxima exactly), then a deterministic low-discrepancy boundary sample:
// the R_d sequence mapped through the probit to sphere directions.
MatrixXd sample_ellipsoid(const VectorXd &c) {
  const int d = static_cast<int>(c.size());
  MatrixXd x(d, 2 * d + ellipsoid_sample_size);
  x.setZero();
  for (int j = 0; j < d; ++j) {
    x(j, 2 * j) = c(j);
    x(j, 2 * j + 1) = -c(j);
  }
  // generalized plastic number: unique root above 1 of g^(d+1) = g + 1
  double g = 1.3;
  for (int it = 0; it < 64; ++it)
    g = g - (std::pow(g, d + 1) - g - 1.0) /
                ((d + 1) * std::pow(g, d) - 1.0);
  VectorXd alpha(d);
  for (int j = 0; j < d; ++j) {
    const double a = std::pow(g, -(j + 1));
    alpha(j) = a - std::floor(a);
  }
  VectorXd s(d);
  for (int i = 0; i < ellipsoid_sample_size; ++i) {
    for (int j = 0; j < d; ++j) {
      const double u = 0.5 + (i + 1.0) * alpha(j);
      s(j) = probit(u - std::floor(u));
    }
    const double norm = s.norm();
    x.col(2 * d + i) = c.cwiseProduct(s / norm);
  }
  return x;
}

struct Materialized {
  MatrixXd x;   // D x P
  MatrixXd gx;  // metric times x
  const SpdGram *gram = nullptr;  // null means Euclidean
};

Materialized materialize(const CompactSet &set) {
  Materialized m;
  if (set.kind == CompactSet::Kind::ellipsoid) {
    m.x = sample_ellipsoid(set.semiaxes);
    m.gx = m.x;
  } else {
    m.x = set.points;
    m.gx = set.gram->matrix() * set.points;
    m.gram = set.gram.get();
  }
  return m;
}

// Gram-orthonormalize v against the first n columns of basis (two MGS
// passes); returns false when v is numerically inside the span.
bool extend_basis(MatrixXd &basis, int n, VectorXd v,
                  const Materialized &m) {
  auto metric_norm = [&m](const VectorXd &w) {
    if (m.gram == nullptr) return w.norm();
    return std::sqrt(std::max(0.0, w.dot(m.gram->matrix() * w)));
  };
  const double n0 = metric_norm(v);
  if (n0 == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    for (int k = 0; k < n; ++k) {
      const VectorXd q = basis.col(k);
      const double coeff =
          m.gram == nullptr ? q.dot(v) : q.dot(m.gram->matrix() * v);
      v -= coeff * q;
    }
  }
  const double nn = metric_norm(v);
  if (nn <= 1e-13 * n0) return false;
  basis.col(n) = v / nn;
  return true;
}

MatrixXd thin_orth(const MatrixXd &a) {
  Eigen::HouseholderQR<MatrixXd> qr(a);
  return qr.householderQ() *
         MatrixXd::Identity(a.rows(), std::min(a.rows(), a.cols()));
}

// Max squared Euclidean distance of the columns of y to the span of the
// orthonormal columns of q.
double max_dist2(const MatrixXd &y, const MatrixXd &q) {
  VectorXd d2 = y.colwise().squaredNorm().transpose();
  if (q.cols() > 0)
    d2 -= (q.transpose() * y).colwise().squaredNorm().transpose();
  return std::max(0.0, d2.maxCoeff());
}

// Exact greedy basis of size n on the columns of y, Euclidean metric.
MatrixXd greedy_subspace(const MatrixXd &y, int n) {
  const int dim = static_cast<int>(y.rows());
  MatrixXd q(dim, n);
  int have = 0;
  VectorXd d2 = y.colwise().squaredNorm().transpose();
  while (have < n) {
    int best = 0;
    for (int i = 1; i < d2.size(); ++i)
      if (d2(i) > d2(best)) best = i;
    VectorXd v = y.col(best);
    v -= q.leftCols(have) * (q.leftCols(have).transpose() * v);
    v -= q.leftCols(have) * (q.leftCols(have).transpose() * v);
    const double nn = v.norm();
    if (nn <= 1e-14) break;
    q.col(have) = v / nn;
    d2 -= (q.col(have).transpose() * y).colwise().squaredNorm().transpose();
    d2 = d2.cwiseMax(0.0);
    ++have;
  }
  return q.leftCols(have);
}

// Smoothed minimax descent on the Grassmannian: Armijo-backtracked
// gradient steps on the log-sum-exp softening of max_i dist^2, with the
// temperature raised in stages. Returns the best true max distance of
// any accepted iterate.
double refine_subspace(const MatrixXd &y, MatrixXd q, int iters_per_stage) {
  const int n = static_cast<int>(q.cols());
  if (n == 0) return std::sqrt(max_dist2(y, q));
  const VectorXd norms2 = y.colwise().squaredNorm().transpose();
  auto dist2_of = [&](const MatrixXd &qq) {
    VectorXd d2 =
        norms2 - (qq.transpose() * y).colwise().squaredNorm().transpose();
    return d2.cwiseMax(0.0).eval();
  };
  auto smooth_max = [](const VectorXd &d2, double tau) {
    const double m = d2.maxCoeff();
    double acc = 0.0;
    for (int i = 0; i < d2.size(); ++i) acc += std::exp(tau * (d2(i) - m));
    return m + std::log(acc) / tau;
  };

  double best = max_dist2(y, q);
  static constexpr double betas[] = {2.0, 8.0, 32.0, 128.0, 512.0, 2048.0};
  double step = 1.0;
  for (const double beta : betas) {
    VectorXd d2 = dist2_of(q);
    double hi = d2.maxCoeff();
    best = std::min(best, hi);
    if (hi <= 0.0) break;
    const double tau = beta / hi;
    double f = smooth_max(d2, tau);
    for (int it = 0; it < iters_per_stage; ++it) {
      const double m = d2.maxCoeff();
      VectorXd s(d2.size());
      for (int i = 0; i < d2.size(); ++i) s(i) = std::exp(tau * (d2(i) - m));
      s /= s.sum();
      const MatrixXd cq = y * (s.asDiagonal() * (y.transpose() * q));
      const MatrixXd dir = 2.0 * (cq - q * (q.transpose() * cq));
      const double dir2 = dir.squaredNorm();
      if (dir2 <= 1e-28 * hi * hi) break;
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        const MatrixXd qt = thin_orth(q + step * dir);
        const VectorXd d2t = dist2_of(qt);
        const double ft = smooth_max(d2t, tau);
        if (ft <= f - 1e-4 * step * dir2) {
          q = qt;
          d2 = d2t;
          f = ft;
          best = std::min(best, d2.maxCoeff());
          step *= 2.0;
          accepted = true;
          break;
        }
        step *= 0.5;
        if (step < 1e-18) break;
      }
      if (!accepted) break;
    }
  }
  best = std::min(best, max_dist2(y, q));
  return std::sqrt(best);
}

int pow2_int(double v) {
  const double c = std::ceil(v);
  return static_cast<int>(c * c);
}

// sup over the whole ellipsoid of the distance to span(q_1..q_n):
// the top singular value of (I - QQ^T) diag(c).
double ellipsoid_sup_dist(const VectorXd &c, const MatrixXd &basis, int n) {
  MatrixXd residual = MatrixXd(c.asDiagonal());
  if (n > 0) {
    const auto q = basis.leftCols(n);
    residual -= q * (q.transpose() * residual);
  }
  Eigen::JacobiSVD<MatrixXd> svd(residual);
  return svd.singularValues()(0);
}

struct WidthColumns {
  double lower;
  double upper;
  double exact;
};

WidthColumns width_columns(const CompactSet &set, int n) {
  if (n == set.dim())
    return {0.0, 0.0, 0.0};  // the set spans at most its ambient space
  const WidthBracket b = width_oracle(set, n);
  return {b.lower, b.upper, b.exact.value_or(nan_value)};
}

} // namespace

CompactSet CompactSet::cloud(MatrixXd points, SpdGram gram) {
  if (points.cols() < 1)
    throw std::invalid_argument("CompactSet: point cloud is empty");
  if (points.rows() != gram.dim())
    throw std::invalid_argument("CompactSet: point/metric dimension mismatch");
  CompactSet s;
  s.kind = Kind::point_cloud;
  s.points = std::move(points);
  s.gram = std::make_shared<const SpdGram>(std::move(gram));
  return s;
}

CompactSet CompactSet::ellipsoid(VectorXd semiaxes) {
  if (semiaxes.size() < 1)
    throw std::invalid_argument("CompactSet: no semiaxes given");
  for (int j = 0; j < semiaxes.size(); ++j) {
    if (!(semiaxes(j) > 0.0))
      throw std::invalid_argument("CompactSet: semiaxes must be positive");
    if (j > 0 && semiaxes(j) > semiaxes(j - 1))
      throw std::invalid_argument("CompactSet: semiaxes must be nonincreasing");
  }
  CompactSet s;
  s.kind = Kind::ellipsoid;
  s.semiaxes = std::move(semiaxes);
  return s;
}

int CompactSet::dim() const {
  return kind == Kind::ellipsoid ? static_cast<int>(semiaxes.size())
                                 : static_cast<int>(points.rows());
}

std::string CompactSet::describe() const {
  if (kind == Kind::ellipsoid)
    return "ellipsoid dim=" + std::to_string(dim());
  return "point_cloud dim=" + std::to_string(dim()) +
         " points=" + std::to_string(points.cols());
}

GreedyTrace weak_greedy_run(const CompactSet &set, double gamma, int n_max,
                            GreedyMode mode) {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("weak_greedy_run: gamma outside (0, 1]");
  if (n_max < 1 || n_max > set.dim())
    throw std::invalid_argument(
        "weak_greedy_run: n_max must be in [1, dim]");

  const Materialized m = materialize(set);
  const int p = static_cast<int>(m.x.cols());
  VectorXd dist2(p);
  for (int i = 0; i < p; ++i)
    dist2(i) = std::max(0.0, m.x.col(i).dot(m.gx.col(i)));

  GreedyTrace trace;
  trace.gamma = gamma;
  trace.mode = mode == GreedyMode::exact ? "exact" : "adversarial";
  trace.set_description = set.describe();

  const bool on_ellipsoid = set.kind == CompactSet::Kind::ellipsoid;
  MatrixXd basis(set.dim(), n_max);
  double sigma0 = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    int argmax = 0;
    for (int i = 1; i < p; ++i)
      if (dist2(i) > dist2(argmax)) argmax = i;
    // for an ellipsoid the sup runs over the full set, not the sample
    const double sigma =
        on_ellipsoid ? ellipsoid_sup_dist(set.semiaxes, basis, n)
                     : std::sqrt(std::max(0.0, dist2(argmax)));
    if (n == 0) sigma0 = sigma;

    GreedyTraceRow row;
    row.n = n;
    row.sigma = sigma;
    const WidthColumns w = width_columns(set, n);
    row.width_lower = w.lower;
    row.width_upper = w.upper;
    row.width_exact = w.exact;

    if (n == n_max || sigma <= 1e-13 * sigma0) {
      row.selected = -1;
      trace.rows.push_back(row);
      break;
    }

    int pick = argmax;
    if (mode == GreedyMode::adversarial) {
      const double floor = gamma * sigma;
      pick = -1;
      for (int i = 0; i < p; ++i) {
        const double di = std::sqrt(std::max(0.0, dist2(i)));
        if (di >= floor && (pick < 0 || di < std::sqrt(dist2(pick)))) pick = i;
      }
      if (pick < 0) pick = argmax;
    }
    row.selected = pick;
    trace.rows.push_back(row);

    if (!extend_basis(basis, n, m.x.col(pick), m)) break;
    const Eigen::RowVectorXd coeff = basis.col(n).transpose() * m.gx;
    dist2 -= coeff.cwiseProduct(coeff).transpose();
    dist2 = dist2.cwiseMax(0.0);
  }
  return trace;
}

WidthBracket width_oracle(const CompactSet &set, int n) {
  if (n < 0 || n >= set.dim())
    throw std::invalid_argument("width_oracle: n must be in [0, dim)");
  if (set.kind == CompactSet::Kind::ellipsoid) {
    const double c = set.semiaxes(n);
    return {c, c, c};
  }

  // whitened coordinates: metric distances become Euclidean
  const MatrixXd y =
      set.gram->chol_lower().transpose() * set.points;  // D x P
  const int p = static_cast<int>(y.cols());
  const MatrixXd cov = y * y.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  const VectorXd lambda = eig.eigenvalues();  // ascending
  double tail = 0.0;
  for (int i = 0; i < lambda.size() - n; ++i)
    tail += std::max(0.0, lambda(i));
  WidthBracket out;
  out.lower = std::sqrt(tail / p);

  if (n == 0) {
    out.upper = std::sqrt(max_dist2(y, MatrixXd(y.rows(), 0)));
    return out;
  }

  const int d = static_cast<int>(y.rows());
  double best = std::numeric_limits<double>::infinity();
  const MatrixXd pod = eig.eigenvectors().rightCols(n);
  best = std::min(best, refine_subspace(y, pod, 100));
  const MatrixXd greedy = greedy_subspace(y, n);
  if (greedy.cols() == n) best = std::min(best, refine_subspace(y, greedy, 100));
  std::mt19937_64 rng(9001);
  std::normal_distribution<double> nd;
  for (int start = 0; start < 50; ++start) {
    MatrixXd r(d, n);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < n; ++j) r(i, j) = nd(rng);
    best = std::min(best, refine_subspace(y, thin_orth(r), 100));
  }
  out.upper = best;
  out.lower = std::min(out.lower, out.upper);
  return out;
}

bool RateReport::all_passed() const {
  return std::none_of(lines.begin(), lines.end(), [](const CheckLine &l) {
    return l.status == CheckLine::Status::fail;
  });
}

int RateReport::count(CheckLine::Status s) const {
  return static_cast<int>(std::count_if(
      lines.begin(), lines.end(),
      [s](const CheckLine &l) { return l.status == s; }));
}

RateReport verify_rate_theorems(const GreedyTrace &trace,
                                const CompactSet &set, double alpha,
                                double m_const) {
  if (!(alpha > 0.0) || !(m_const > 0.0))
    throw std::invalid_argument(
        "verify_rate_theorems: alpha and M must be positive");
  if (trace.rows.empty())
    throw std::invalid_argument("verify_rate_theorems: empty trace");
  (void)set;

  const int last = trace.rows.back().n;
  auto sigma = [&trace](int n) { return trace.rows.at(static_cast<size_t>(n)).sigma; };
  auto upper_width = [&trace](int n, bool &exact) {
    const auto &row = trace.rows.at(static_cast<size_t>(n));
    if (std::isnan(row.width_exact)) {
      exact = false;
      return row.width_upper;
    }
    exact = true;
    return row.width_exact;
  };

  RateReport report;
  const double gamma = trace.gamma;
  const int q = pow2_int(std::pow(2.0, alpha + 1.0) / gamma);
  report.note = "rate_poly uses q = ceil(2^(alpha+1)/gamma)^2 = " +
                std::to_string(q);

  bool hyp_exact = true;
  bool hypothesis = true;
  {
    bool e = true;
    hypothesis = upper_width(0, e) <= m_const;
    hyp_exact = hyp_exact && e;
  }
  for (int n = 1; n <= last && hypothesis; ++n) {
    bool e = true;
    hypothesis = upper_width(n, e) <= m_const * std::pow(n, -alpha);
    hyp_exact = hyp_exact && e;
  }

  for (int n = 0; n <= last; ++n) {
    const auto &row = trace.rows.at(static_cast<size_t>(n));
    // d_n <= sigma_n, allowing 1e-12 relative roundoff on the equality case
    if (!std::isnan(row.width_lower)) {
      CheckLine l;
      l.inequality = "lower";
      l.n = n;
      l.lhs = row.width_lower;
      l.rhs = row.sigma;
      const bool ok = l.lhs <= l.rhs * (1.0 + 1e-12);
      const bool exact = !std::isnan(row.width_exact);
      l.status = ok ? CheckLine::Status::pass
                    : (exact ? CheckLine::Status::fail
                             : CheckLine::Status::inconclusive);
      report.lines.push_back(l);
    }

    if (n >= 1) {
      CheckLine l;
      l.inequality = "rate_poly";
      l.n = n;
      l.lhs = sigma(n);
      l.rhs = std::sqrt(static_cast<double>(q)) *
              std::pow(4.0 * q, alpha) * m_const * std::pow(n, -alpha);
      const bool ok = l.lhs <= l.rhs;
      if (!hypothesis)
        l.status = CheckLine::Status::inconclusive;
      else
        l.status = ok ? CheckLine::Status::pass
                      : (hyp_exact ? CheckLine::Status::fail
                                   : CheckLine::Status::inconclusive);
      report.lines.push_back(l);
    }

    if (n >= 1 && 2 * n <= last) {
      bool exact = true;
      const double dn = upper_width(n, exact);
      CheckLine l;
      l.inequality = "sigma2n";
      l.n = n;
      l.lhs = sigma(2 * n);
      l.rhs = std::sqrt(2.0 * dn) / gamma;
      const bool ok = l.lhs <= l.rhs;
      l.status = ok ? CheckLine::Status::pass
                    : (exact ? CheckLine::Status::fail
                             : CheckLine::Status::inconclusive);
      report.lines.push_back(l);
    }

    if (n >= 2) {
      bool all_exact = true;
      double best = std::numeric_limits<double>::infinity();
      for (int m = 1; m < n; ++m) {
        bool e = true;
        const double dm = upper_width(m, e);
        all_exact = all_exact && e;
        best = std::min(best,
                        std::pow(dm, static_cast<double>(n - m) / n));
      }
      CheckLine l;
      l.inequality = "direct";
      l.n = n;
      l.lhs = sigma(n);
      l.rhs = std::sqrt(2.0) / gamma * best;
      const bool ok = l.lhs <= l.rhs;
      l.status = ok ? CheckLine::Status::pass
                    : (all_exact ? CheckLine::Status::fail
                                 : CheckLine::Status::inconclusive);
      report.lines.push_back(l);
    }

    if (!std::isnan(row.width_exact)) {
      CheckLine l;
      l.inequality = "sharp";
      l.n = n;
      l.lhs = row.sigma;
      l.rhs = std::pow(2.0, n + 1) / std::sqrt(3.0) * row.width_exact;
      l.status = l.lhs <= l.rhs ? CheckLine::Status::pass
                                : CheckLine::Status::fail;
      report.lines.push_back(l);
    }
  }
  return report;
}

RateReport verify_delayed_comparison(const GreedyTrace &trace,
                                     const CompactSet &set, double theta) {
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::invalid_argument(
        "verify_delayed_comparison: theta outside (0, 1)");
  if (trace.rows.empty())
    throw std::invalid_argument("verify_delayed_comparison: empty trace");
  (void)set;
  for (const auto &row : trace.rows)
    if (std::isnan(row.width_exact))
      throw std::invalid_argument(
          "verify_delayed_comparison: exact widths required");

  const int q = pow2_int(2.0 / (trace.gamma * theta));
  RateReport report;
  report.note =
      "q interpreted as ceil(2/(gamma*theta))^2 = " + std::to_string(q) +
      " (the printed form ceil(2*gamma*theta)^2 shrinks as gamma*theta"
      " decreases, contradicting the surrounding argument)";

  const int last = trace.rows.back().n;
  for (int n = 0; n <= last; ++n) {
    for (int m = 0; n + q * m <= last; ++m) {
      const double s_n = trace.rows.at(static_cast<size_t>(n)).sigma;
      const double s_later =
          trace.rows.at(static_cast<size_t>(n + q * m)).sigma;
      if (s_later < theta * s_n) continue;
      CheckLine l;
      l.inequality = "delayed";
      l.n = n;
      l.m = m;
      l.lhs = s_n;
      l.rhs = std::sqrt(static_cast<double>(q)) *
              trace.rows.at(static_cast<size_t>(m)).width_exact;
      l.status = l.lhs <= l.rhs ? CheckLine::Status::pass
                                : CheckLine::Status::fail;
      report.lines.push_back(l);
    }
  }
  return report;
}

} // namespace rbsam

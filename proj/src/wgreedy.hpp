#pragma once

#include "kernel.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rbsam {

// Compact subset of a finite-dimensional Hilbert space: either a finite
// point cloud with an explicit Gram metric, or a diagonal ellipsoid
// {x : sum (x_j/c_j)^2 <= 1} in the Euclidean metric, sampled on demand.
struct CompactSet {
  enum class Kind { point_cloud, ellipsoid };

  Kind kind = Kind::point_cloud;
  MatrixXd points;                        // D x P, point_cloud only
  std::shared_ptr<const SpdGram> gram;    // metric, point_cloud only
  VectorXd semiaxes;                      // decreasing positive, ellipsoid

  static CompactSet cloud(MatrixXd points, SpdGram gram);
  static CompactSet ellipsoid(VectorXd semiaxes);

  int dim() const;
  std::string describe() const;
};

struct GreedyTraceRow {
  int n = 0;            // dimension of the space this row measures
  int selected = -1;    // sample index chosen to extend the space
  double sigma = 0.0;   // max distance from the n-dimensional space
  double width_lower = 0.0;
  double width_upper = 0.0;
  double width_exact = 0.0;  // nan when no exact width is known
};

struct GreedyTrace {
  std::vector<GreedyTraceRow> rows;
  double gamma = 1.0;
  std::string mode;
  std::string set_description;
};

enum class GreedyMode { exact, adversarial };

// Weak greedy on the (sampled) set. Exact mode always takes the true
// farthest element; adversarial mode takes the element of minimal
// distance among those with distance >= gamma * sigma_n, the worst legal
// choice. Ties break to the lowest sample index. Width columns are
// filled from width_oracle.
GreedyTrace weak_greedy_run(const CompactSet &set, double gamma, int n_max,
                            GreedyMode mode);

struct WidthBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> exact;
};

// Kolmogorov width brackets: exact c_{n+1} for ellipsoids; for clouds the
// RMS singular-value lower bound and the best subspace found by POD,
// greedy, and refined random starts.
WidthBracket width_oracle(const CompactSet &set, int n);

struct CheckLine {
  std::string inequality;
  int n = 0;
  int m = -1;  // delayed-comparison instances only
  double lhs = 0.0;
  double rhs = 0.0;
  enum class Status { pass, fail, inconclusive } status = Status::pass;
};

struct RateReport {
  std::vector<CheckLine> lines;
  std::string note;
  bool all_passed() const;
  int count(CheckLine::Status s) const;
};

// Per-n checks of the greedy-versus-width comparison bounds:
//   lower      d_n <= sigma_n
//   rate_poly  sigma_n <= q^{1/2} (4q)^alpha M n^{-alpha},
//              q = ceil(2^{alpha+1}/gamma)^2, under d_n <= M n^{-alpha}
//   sigma2n    sigma_{2n} <= gamma^{-1} sqrt(2 d_n)
//   direct     sigma_n <= sqrt(2) gamma^{-1} min_m d_m^{(n-m)/n}
//   sharp      sigma_n <= (2^{n+1}/sqrt(3)) d_n
// A failed check backed by exact widths is a hard failure; one backed
// only by a bracket is inconclusive.
RateReport verify_rate_theorems(const GreedyTrace &trace,
                                const CompactSet &set, double alpha,
                                double m_const);

// Conditional delayed comparison: whenever sigma_{n+qm} >= theta sigma_n
// with q = ceil(2/(gamma*theta))^2, checks sigma_n <= q^{1/2} d_m.
// Requires exact widths; reports every triggered instance.
RateReport verify_delayed_comparison(const GreedyTrace &trace,
                                     const CompactSet &set, double theta);

} // namespace rbsam

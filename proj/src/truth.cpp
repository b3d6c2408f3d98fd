#include "truth.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rbsam {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

using Triplet = Eigen::Triplet<double>;

struct Vertex {
  double x;
  double y;
};

// Gradients of the three barycentric functions of a positively oriented
// triangle, plus its area.
struct TriangleGeometry {
  std::array<Eigen::Vector2d, 3> grad;
  double area;
};

TriangleGeometry triangle_geometry(const std::array<Vertex, 3> &v) {
  const double det = (v[1].x - v[0].x) * (v[2].y - v[0].y) -
                     (v[2].x - v[0].x) * (v[1].y - v[0].y);
  TriangleGeometry g;
  g.area = 0.5 * det;
  g.grad[0] = Eigen::Vector2d(v[1].y - v[2].y, v[2].x - v[1].x) / det;
  g.grad[1] = Eigen::Vector2d(v[2].y - v[0].y, v[0].x - v[2].x) / det;
  g.grad[2] = Eigen::Vector2d(v[0].y - v[1].y, v[1].x - v[0].x) / det;
  return g;
}

SpMat from_triplets(int rows, int cols, const std::vector<Triplet> &t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// n_full x selected, placing selected coefficient j at full index rows[j].
SpMat selection_matrix(const std::vector<int> &rows, int n_full) {
  std::vector<Triplet> t;
  t.reserve(rows.size());
  for (size_t j = 0; j < rows.size(); ++j)
    t.emplace_back(rows[j], static_cast<int>(j), 1.0);
  return from_triplets(n_full, static_cast<int>(rows.size()), t);
}

void write_header(std::ofstream &out, const std::string &role,
                  const std::string &name, Eigen::Index rows,
                  Eigen::Index cols, Eigen::Index nnz) {
  out << "%%" << role << ' ' << name << ' ' << rows << ' ' << cols << ' '
      << nnz << '\n';
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_sparse(const std::filesystem::path &path, const std::string &name,
                  const SpMat &m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_header(out, "matrix", name, m.rows(), m.cols(), m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' '
          << format_double(it.value()) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_vector(const std::filesystem::path &path, const std::string &name,
                  const VectorXd &v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_header(out, "vector", name, v.size(), 1, v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << i + 1 << ' ' << format_double(v(i)) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Sparse LU of the saddle matrix [G_V, A; A^T, 0] with refined solves.
class SaddleOp {
public:
  SaddleOp(const SparseSpd &gram_v, const SpMat &a)
      : nv_(static_cast<int>(a.rows())), nu_(static_cast<int>(a.cols())) {
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(gram_v.matrix().nonZeros() +
                                  2 * a.nonZeros()));
    const SpMat &g = gram_v.matrix();
    for (int k = 0; k < g.outerSize(); ++k)
      for (SpMat::InnerIterator it(g, k); it; ++it)
        t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                       it.value());
    for (int k = 0; k < a.outerSize(); ++k)
      for (SpMat::InnerIterator it(a, k); it; ++it) {
        const int i = static_cast<int>(it.row());
        const int j = static_cast<int>(it.col());
        t.emplace_back(i, nv_ + j, it.value());
        t.emplace_back(nv_ + j, i, it.value());
      }
    s_ = from_triplets(nv_ + nu_, nv_ + nu_, t);
    lu_.compute(s_);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error(
          "truth saddle factorization failed; refine the trial mesh");
  }

  // (top, bottom) of the saddle solution for stacked right-hand side.
  std::pair<VectorXd, VectorXd> solve(const VectorXd &g,
                                      const VectorXd &d) const {
    VectorXd rhs(nv_ + nu_);
    rhs.head(nv_) = g;
    rhs.tail(nu_) = d;
    VectorXd x = lu_.solve(rhs);
    const double denom = std::max(rhs.norm(), 1e-300);
    double rel = (rhs - s_ * x).norm() / denom;
    for (int pass = 0; pass < 4 && rel > 1e-9; ++pass) {
      x += lu_.solve(rhs - s_ * x);
      rel = (rhs - s_ * x).norm() / denom;
    }
    if (rel > 1e-9)
      throw std::runtime_error(
          "truth saddle solve stalled at relative residual " +
          std::to_string(rel) + "; refine the trial mesh");
    return {x.head(nv_), x.tail(nu_)};
  }

private:
  int nv_;
  int nu_;
  SpMat s_;
  Eigen::SparseLU<SpMat> lu_;
};

} // namespace

ParameterPoint make_parameter(double y, double epsilon) {
  if (!std::isfinite(y) || !std::isfinite(epsilon))
    throw std::invalid_argument("make_parameter: non-finite input");
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("make_parameter: epsilon " +
                                std::to_string(epsilon) +
                                " outside (0, 1]");
  double w = std::fmod(y, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return ParameterPoint{w, epsilon};
}

Eigen::Vector4d theta_eval(const ParameterPoint &p) {
  return Eigen::Vector4d(p.epsilon, std::cos(p.y), std::sin(p.y), 1.0);
}

P1Forms assemble_p1_forms(int n) {
  if (n < 1) throw std::invalid_argument("assemble_p1_forms: n must be >= 1");
  const int nodes_per_side = n + 1;
  const int n_nodes = nodes_per_side * nodes_per_side;
  const double h = 1.0 / n;
  auto node_index = [nodes_per_side](int ix, int iy) {
    return iy * nodes_per_side + ix;
  };

  std::vector<Triplet> tk, tcx, tcy, tm;
  const size_t reserve = static_cast<size_t>(n) * n * 2 * 9;
  tk.reserve(reserve);
  tcx.reserve(reserve);
  tcy.reserve(reserve);
  tm.reserve(reserve);
  VectorXd load = VectorXd::Zero(n_nodes);

  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Vertex v00{ix * h, iy * h};
      const Vertex v10{(ix + 1) * h, iy * h};
      const Vertex v01{ix * h, (iy + 1) * h};
      const Vertex v11{(ix + 1) * h, (iy + 1) * h};
      const int i00 = node_index(ix, iy);
      const int i10 = node_index(ix + 1, iy);
      const int i01 = node_index(ix, iy + 1);
      const int i11 = node_index(ix + 1, iy + 1);

      const std::array<std::array<Vertex, 3>, 2> tri_v = {
          std::array<Vertex, 3>{v00, v10, v11},
          std::array<Vertex, 3>{v00, v11, v01}};
      const std::array<std::array<int, 3>, 2> tri_i = {
          std::array<int, 3>{i00, i10, i11}, std::array<int, 3>{i00, i11, i01}};

      for (int t = 0; t < 2; ++t) {
        const auto geo = triangle_geometry(tri_v[t]);
        const auto &idx = tri_i[t];
        for (int a = 0; a < 3; ++a) {
          load(idx[a]) += geo.area / 3.0;
          for (int b = 0; b < 3; ++b) {
            const double kab = geo.area * geo.grad[a].dot(geo.grad[b]);
            const double mab = geo.area / 12.0 * (a == b ? 2.0 : 1.0);
            const double cxab = geo.area / 3.0 * geo.grad[b](0);
            const double cyab = geo.area / 3.0 * geo.grad[b](1);
            tk.emplace_back(idx[a], idx[b], kab);
            tcx.emplace_back(idx[a], idx[b], cxab);
            tcy.emplace_back(idx[a], idx[b], cyab);
            tm.emplace_back(idx[a], idx[b], mab);
          }
        }
      }
    }
  }

  P1Forms forms;
  forms.n = n;
  forms.stiffness = from_triplets(n_nodes, n_nodes, tk);
  forms.convect_x = from_triplets(n_nodes, n_nodes, tcx);
  forms.convect_y = from_triplets(n_nodes, n_nodes, tcy);
  forms.mass = from_triplets(n_nodes, n_nodes, tm);
  forms.load = std::move(load);
  for (int iy = 1; iy < n; ++iy)
    for (int ix = 1; ix < n; ++ix) forms.interior.push_back(node_index(ix, iy));
  return forms;
}

SpMat prolongation(int n_coarse) {
  if (n_coarse < 1)
    throw std::invalid_argument("prolongation: n_coarse must be >= 1");
  const int nc = n_coarse + 1;
  const int nf = 2 * n_coarse + 1;
  auto coarse_index = [nc](int ix, int iy) { return iy * nc + ix; };
  auto fine_index = [nf](int ix, int iy) { return iy * nf + ix; };
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(nf) * nf * 2);
  for (int fy = 0; fy < nf; ++fy) {
    for (int fx = 0; fx < nf; ++fx) {
      const int row = fine_index(fx, fy);
      const bool ex = fx % 2 == 0;
      const bool ey = fy % 2 == 0;
      if (ex && ey) {
        t.emplace_back(row, coarse_index(fx / 2, fy / 2), 1.0);
      } else if (!ex && ey) {
        t.emplace_back(row, coarse_index(fx / 2, fy / 2), 0.5);
        t.emplace_back(row, coarse_index(fx / 2 + 1, fy / 2), 0.5);
      } else if (ex && !ey) {
        t.emplace_back(row, coarse_index(fx / 2, fy / 2), 0.5);
        t.emplace_back(row, coarse_index(fx / 2, fy / 2 + 1), 0.5);
      } else {
        // cell center, on the coarse (+1,+1) diagonal
        t.emplace_back(row, coarse_index(fx / 2, fy / 2), 0.5);
        t.emplace_back(row, coarse_index(fx / 2 + 1, fy / 2 + 1), 0.5);
      }
    }
  }
  return from_triplets(nf * nf, nc * nc, t);
}

SparseSpd::SparseSpd(SpMat g) : g_(std::move(g)) {
  if (g_.rows() != g_.cols())
    throw std::invalid_argument("SparseSpd: matrix is not square");
  g_.makeCompressed();
  double scale = 0.0;
  for (int k = 0; k < g_.outerSize(); ++k)
    for (SpMat::InnerIterator it(g_, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  const SpMat diff = SpMat(g_.transpose()) - g_;
  double asym = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it)
      asym = std::max(asym, std::abs(it.value()));
  if (asym > 1e-12 * scale)
    throw std::invalid_argument("SparseSpd: matrix is not symmetric");
  llt_.compute(g_);
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error(
        "SparseSpd: factorization failed (matrix not positive definite)");
}

VectorXd SparseSpd::solve(const VectorXd &rhs) const {
  if (rhs.size() != dim())
    throw std::invalid_argument("SparseSpd::solve: size mismatch");
  VectorXd x = llt_.solve(rhs);
  const double denom = std::max(rhs.norm(), 1e-300);
  double rel = (rhs - g_ * x).norm() / denom;
  for (int pass = 0; pass < 3 && rel > 1e-10; ++pass) {
    x += llt_.solve(rhs - g_ * x);
    rel = (rhs - g_ * x).norm() / denom;
  }
  if (rel > 1e-10)
    throw std::runtime_error(
        "SparseSpd::solve: relative residual " + std::to_string(rel) +
        " exceeds 1e-10 after refinement");
  return x;
}

MatrixXd SparseSpd::solve_many(const MatrixXd &rhs) const {
  MatrixXd out(rhs.rows(), rhs.cols());
  for (int j = 0; j < rhs.cols(); ++j) out.col(j) = solve(rhs.col(j));
  return out;
}

double SparseSpd::norm(const VectorXd &x) const {
  return std::sqrt(std::max(0.0, x.dot(g_ * x)));
}

double SparseSpd::dual_norm(const VectorXd &r) const {
  return std::sqrt(std::max(0.0, r.dot(solve(r))));
}

TruthModel::TruthModel(int n_trial, double epsilon)
    : n_trial_(n_trial), epsilon_(epsilon) {
  if (n_trial < 3)
    throw std::invalid_argument(
        "assemble_truth: trial resolution 1/" + std::to_string(n_trial) +
        " is degenerate (test mesh needs at least 4x4 interior vertices)");
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("assemble_truth: epsilon " +
                                std::to_string(epsilon) + " outside (0, 1]");

  const P1Forms coarse = assemble_p1_forms(n_trial);
  const P1Forms fine = assemble_p1_forms(2 * n_trial);
  const int n_coarse_full = (n_trial + 1) * (n_trial + 1);
  const int n_fine_full = (2 * n_trial + 1) * (2 * n_trial + 1);

  const SpMat ec = selection_matrix(coarse.interior, n_coarse_full);
  const SpMat ef = selection_matrix(fine.interior, n_fine_full);
  const SpMat pe = prolongation(n_trial) * ec;

  interp_ = ef.transpose() * pe;
  const std::array<const SpMat *, n_terms> fine_forms = {
      &fine.stiffness, &fine.convect_x, &fine.convect_y, &fine.mass};
  for (int k = 0; k < n_terms; ++k) {
    ops_[static_cast<size_t>(k)] = ef.transpose() * (*fine_forms[k] * pe);
    ops_[static_cast<size_t>(k)].makeCompressed();
    ops_square_[static_cast<size_t>(k)] =
        interp_.transpose() * ops_[static_cast<size_t>(k)];
    ops_square_[static_cast<size_t>(k)].makeCompressed();
  }

  gram_u_ = std::make_unique<SparseSpd>(
      SpMat(ec.transpose() * coarse.stiffness * ec));
  gram_v_ = std::make_unique<SparseSpd>(
      SpMat(ef.transpose() *
            SpMat(epsilon * fine.stiffness + fine.mass) * ef));

  rhs_ = ef.transpose() * fine.load;
  rhs_square_ = interp_.transpose() * rhs_;

  truth_infsup_ = std::numeric_limits<double>::infinity();
  const int n_sample = 8;
  for (int j = 0; j < n_sample; ++j) {
    const ParameterPoint p = make_parameter(two_pi * j / n_sample, epsilon);
    truth_infsup_ = std::min(truth_infsup_, estimate_infsup(theta_eval(p)));
  }
  if (!(truth_infsup_ >= 1e-3))
    throw std::runtime_error(
        "assemble_truth: truth pair inf-sup " +
        std::to_string(truth_infsup_) +
        " is below the 1e-3 floor; refine the trial mesh (decrease h)");
}

SpMat TruthModel::saddle_matrix(const Eigen::Vector4d &theta) const {
  SpMat a = theta(0) * ops_[0];
  for (int k = 1; k < n_terms; ++k)
    a += theta(k) * ops_[static_cast<size_t>(k)];
  return a;
}

VectorXd TruthModel::apply_operator(const ParameterPoint &p,
                                    const VectorXd &u) const {
  if (u.size() != dim_trial())
    throw std::invalid_argument("apply_operator: size mismatch");
  const Eigen::Vector4d theta = theta_eval(p);
  VectorXd out = theta(0) * (ops_[0] * u);
  for (int k = 1; k < n_terms; ++k)
    out += theta(k) * (ops_[static_cast<size_t>(k)] * u);
  return out;
}

VectorXd TruthModel::apply_operator_t(const ParameterPoint &p,
                                      const VectorXd &v) const {
  if (v.size() != dim_test())
    throw std::invalid_argument("apply_operator_t: size mismatch");
  const Eigen::Vector4d theta = theta_eval(p);
  VectorXd out = theta(0) * (ops_[0].transpose() * v);
  for (int k = 1; k < n_terms; ++k)
    out += theta(k) * (ops_[static_cast<size_t>(k)].transpose() * v);
  return out;
}

double TruthModel::u_hat_norm(const ParameterPoint &p,
                              const VectorXd &u) const {
  return gram_v_->dual_norm(apply_operator(p, u));
}

std::pair<VectorXd, VectorXd>
TruthModel::saddle_solve(const Eigen::Vector4d &theta, const VectorXd &g,
                         const VectorXd &d) const {
  if (g.size() != dim_test() || d.size() != dim_trial())
    throw std::invalid_argument("saddle_solve: size mismatch");
  SaddleOp op(*gram_v_, saddle_matrix(theta));
  return op.solve(g, d);
}

std::pair<VectorXd, VectorXd>
TruthModel::truth_solve(const ParameterPoint &p) const {
  auto [r, u] = saddle_solve(theta_eval(p), rhs_,
                             VectorXd::Zero(dim_trial()));
  return {u, r};
}

std::pair<VectorXd, VectorXd>
TruthModel::dual_truth_solve(const ParameterPoint &p,
                             const VectorXd &ell) const {
  if (ell.size() != dim_trial())
    throw std::invalid_argument("dual_truth_solve: size mismatch");
  auto [z, lambda] =
      saddle_solve(theta_eval(p), VectorXd::Zero(dim_test()), -ell);
  const VectorXd s = gram_u_->solve(VectorXd(-ell - apply_operator_t(p, z)));
  return {z, s};
}

double TruthModel::estimate_infsup(const Eigen::Vector4d &theta) const {
  SaddleOp op(*gram_v_, saddle_matrix(theta));
  const SpMat &gu = gram_u_->matrix();
  std::mt19937_64 rng(20240817ull);
  std::normal_distribution<double> nd;
  VectorXd x(dim_trial());
  for (int i = 0; i < x.size(); ++i) x(i) = nd(rng);
  x /= gram_u_->norm(x);
  double rho = 0.0;
  const VectorXd zero_top = VectorXd::Zero(dim_test());
  for (int it = 0; it < 300; ++it) {
    const VectorXd gx = gu * x;
    auto [r, z] = op.solve(zero_top, VectorXd(-gx));
    const double rho_new = x.dot(gu * z);
    const bool settled = it > 0 && std::abs(rho_new - rho) <= 1e-9 * rho_new;
    rho = rho_new;
    x = z / gram_u_->norm(z);
    if (settled) break;
  }
  return 1.0 / std::sqrt(rho);
}

void TruthModel::export_matrices(const std::string &dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);
  for (int k = 0; k < n_terms; ++k) {
    const std::string name = "A_" + std::to_string(k + 1);
    write_sparse(base / (name + ".txt"), name, ops_[static_cast<size_t>(k)]);
  }
  write_sparse(base / "gram_U.txt", "gram_U", gram_u_->matrix());
  write_sparse(base / "gram_V.txt", "gram_V", gram_v_->matrix());
  write_vector(base / "rhs.txt", "rhs", rhs_);
}

} // namespace rbsam

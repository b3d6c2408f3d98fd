#include "driver.hpp"

#include "truth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace rbsam::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string ms3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point &t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void write_file(const fs::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.flush();
  if (!out)
    throw std::runtime_error("cannot write file: " + path.string());
}

std::vector<std::string> split(const std::string &line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<ParameterPoint> make_angle_grid(int count, double epsilon) {
  std::vector<ParameterPoint> grid;
  grid.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i)
    grid.push_back(make_parameter(2.0 * kPi * i / count, epsilon));
  return grid;
}

struct Check {
  std::string status;  // pass, FAIL, inconclusive
  std::string name;
  int n = 0;
  int m = -1;
  double lhs = 0.0;
  double rhs = 0.0;
};

Check make_check(const std::string &name, int n, double lhs, double rhs,
                 bool ok) {
  Check c;
  c.status = ok ? "pass" : "FAIL";
  c.name = name;
  c.n = n;
  c.lhs = lhs;
  c.rhs = rhs;
  return c;
}

std::string checks_text(const std::vector<Check> &checks) {
  std::string s;
  for (const Check &c : checks) {
    s += c.status + " " + c.name + " n=" + std::to_string(c.n);
    if (c.m >= 0)
      s += " m=" + std::to_string(c.m);
    s += " lhs=" + g17(c.lhs) + " rhs=" + g17(c.rhs) + "\n";
  }
  return s;
}

const Check *first_failure(const std::vector<Check> &checks) {
  for (const Check &c : checks)
    if (c.status == "FAIL")
      return &c;
  return nullptr;
}

using KvLines = std::vector<std::pair<std::string, std::string>>;
using Timings = std::vector<std::pair<std::string, double>>;

void write_manifest(const fs::path &dir, const ResolvedConfig &cfg,
                    const KvLines &result, const Timings &timings,
                    std::vector<std::string> files, bool ok) {
  files.push_back("manifest.txt");
  std::sort(files.begin(), files.end());
  std::string s = "rbsam run manifest\n";
  s += "version = " + std::string(kVersion) + "\n";
  s += "command = " + cfg.command + "\n";
  s += "config:\n";
  for (const auto &[key, value] : cfg.values)
    s += "  " + key + " = " + value + "\n";
  if (!result.empty()) {
    s += "result:\n";
    for (const auto &[key, value] : result)
      s += "  " + key + " = " + value + "\n";
  }
  s += "timings_ms:\n";
  for (const auto &[name, value] : timings)
    s += "  " + name + " = " + ms3(value) + "\n";
  s += "files:\n";
  for (const std::string &f : files)
    s += "  " + f + "\n";
  s += std::string("status = ") + (ok ? "ok" : "check-failed") + "\n";
  write_file(dir / "manifest.txt", s);
}

// Writes checks.txt (when any checks exist) and the manifest, then turns
// the first failed check into an exit-2 result.
RunResult finish(const fs::path &dir, const ResolvedConfig &cfg,
                 const KvLines &result, const Timings &timings,
                 std::vector<std::string> files,
                 const std::vector<Check> &checks) {
  if (!checks.empty()) {
    write_file(dir / "checks.txt", checks_text(checks));
    files.push_back("checks.txt");
  }
  const Check *bad = first_failure(checks);
  write_manifest(dir, cfg, result, timings, std::move(files), bad == nullptr);
  if (bad != nullptr)
    return {2, "theory check failed: " + bad->name +
                   " at n=" + std::to_string(bad->n) + " (lhs=" + g17(bad->lhs) +
                   ", rhs=" + g17(bad->rhs) + "); see " +
                   (dir / "checks.txt").string()};
  return {0, ""};
}

RunResult cmd_build_truth(const ResolvedConfig &cfg) {
  const auto t0 = Clock::now();
  const int cells = cfg.mesh_cells("h");
  const double epsilon = cfg.getd("epsilon");
  const TruthModel model(cells, epsilon);
  const double build_ms = ms_since(t0);

  const auto t1 = Clock::now();
  std::string csv =
      "n_cells,h,epsilon,dim_trial,dim_test,rhs_dual_norm,truth_infsup\n";
  csv += std::to_string(cells) + "," + g17(model.h()) + "," +
         g17(model.epsilon()) + "," + std::to_string(model.dim_trial()) + "," +
         std::to_string(model.dim_test()) + "," +
         g17(model.gram_v().dual_norm(model.rhs())) + "," +
         g17(model.truth_infsup()) + "\n";
  const fs::path dir = cfg.gets("out");
  write_file(dir / "trace.csv", csv);

  KvLines result = {{"dim_trial", std::to_string(model.dim_trial())},
                    {"dim_test", std::to_string(model.dim_test())},
                    {"truth_infsup", g17(model.truth_infsup())}};
  Timings timings = {{"build", build_ms}, {"write", ms_since(t1)}};
  return finish(dir, cfg, result, timings, {"trace.csv"}, {});
}

RunResult cmd_sga(const ResolvedConfig &cfg) {
  const auto t0 = Clock::now();
  const TruthModel model(cfg.mesh_cells("h"), cfg.getd("epsilon"));
  const std::vector<ParameterPoint> grid =
      make_angle_grid(cfg.geti("grid"), cfg.getd("epsilon"));
  const double build_ms = ms_since(t0);

  const auto t1 = Clock::now();
  SgaOptions options;
  options.tol = cfg.getd("tol");
  options.n_max = cfg.geti("n_max");
  options.validate = cfg.getb("validate");
  const auto [space, trace] = sga_run(model, grid, options);
  const double run_ms = ms_since(t1);

  const auto t2 = Clock::now();
  const fs::path dir = cfg.gets("out");
  write_file(dir / "trace.csv", csv_sga(trace));

  KvLines result = {
      {"stop_reason", trace.stop_reason},
      {"rows", std::to_string(trace.rows.size())},
      {"surrogate_final", g17(trace.rows.back().surrogate_max)}};
  Timings timings = {
      {"build", build_ms}, {"run", run_ms}, {"write", ms_since(t2)}};
  return finish(dir, cfg, result, timings, {"trace.csv"}, {});
}

RunResult cmd_sga_dou(const ResolvedConfig &cfg) {
  const auto t0 = Clock::now();
  const TruthModel model(cfg.mesh_cells("h"), cfg.getd("epsilon"));
  const std::vector<ParameterPoint> grid =
      make_angle_grid(cfg.geti("grid"), cfg.getd("epsilon"));
  const double build_ms = ms_since(t0);

  const auto t1 = Clock::now();
  SgaDouOptions options;
  options.delta = cfg.getd("delta");
  options.tol = cfg.getd("tol");
  options.n_max = cfg.geti("n_max");
  options.validate = cfg.getb("validate");
  options.mode =
      cfg.gets("mode") == "full" ? StabMode::full : StabMode::greedy;
  options.floor_stop_factor = cfg.getd("floor_stop");
  const auto [srm, trace] = sga_dou_run(model, grid, options);
  const double run_ms = ms_since(t1);

  const auto t2 = Clock::now();
  const fs::path dir = cfg.gets("out");
  write_file(dir / "trace.csv", csv_sga_dou(trace));

  std::vector<Check> checks;
  for (const SgaDouTraceRow &row : trace.rows) {
    checks.push_back(make_check("certified", row.n, row.delta_certified,
                                options.delta,
                                row.delta_certified <= options.delta + 1e-12));
    if (trace.validated && std::isfinite(row.ratio))
      checks.push_back(make_check("tight-lower", row.n, row.ratio, 1.0 - 1e-9,
                                  row.ratio >= 1.0 - 1e-9));
  }

  const SgaDouTraceRow &last = trace.rows.back();
  KvLines result = {{"stop_reason", trace.stop_reason},
                    {"rows", std::to_string(trace.rows.size())},
                    {"n_final", std::to_string(last.n)},
                    {"n_v_final", std::to_string(last.n_v)},
                    {"surrogate_final", g17(last.surrogate_max)}};
  Timings timings = {
      {"build", build_ms}, {"run", run_ms}, {"write", ms_since(t2)}};
  return finish(dir, cfg, result, timings, {"trace.csv"}, checks);
}

GreedyTrace load_wgreedy_trace(const std::string &path, double gamma,
                               const std::string &mode,
                               const CompactSet &set) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> expected = {
      "n", "selected", "sigma", "width_lower", "width_upper", "width_exact"};
  if (table.header != expected)
    throw ConfigError("trace_in: unexpected header in " + path);
  GreedyTrace trace;
  trace.gamma = gamma;
  trace.mode = mode;
  trace.set_description = set.describe();
  for (const std::vector<double> &r : table.rows) {
    GreedyTraceRow row;
    row.n = static_cast<int>(std::lround(r[0]));
    row.selected = static_cast<int>(std::lround(r[1]));
    row.sigma = r[2];
    row.width_lower = r[3];
    row.width_upper = r[4];
    row.width_exact = r[5];
    trace.rows.push_back(row);
  }
  return trace;
}

RunResult cmd_wgreedy(const ResolvedConfig &cfg) {
  const auto t0 = Clock::now();
  const int dim = cfg.geti("dim");
  const std::string decay = cfg.gets("decay");
  VectorXd semiaxes(dim);
  for (int j = 1; j <= dim; ++j) {
    double c = 0.0;
    if (decay == "poly-half")
      c = 1.0 / std::sqrt(static_cast<double>(j));
    else if (decay == "poly-1")
      c = 1.0 / j;
    else if (decay == "poly-2")
      c = 1.0 / (static_cast<double>(j) * j);
    else if (decay == "exp-sqrt")
      c = std::exp(-std::sqrt(static_cast<double>(j)));
    else
      c = std::ldexp(1.0, -j);
    semiaxes(j - 1) = c;
  }
  const CompactSet set = CompactSet::ellipsoid(semiaxes);

  const int n_max = cfg.geti("n_max");
  if (n_max >= dim)
    throw ConfigError("key 'n_max': must be smaller than dim");
  double alpha = cfg.getd("alpha");
  double m_const = cfg.getd("m_const");
  if ((alpha == 0.0) != (m_const == 0.0))
    throw ConfigError("keys 'alpha' and 'm_const' must be set together");
  if (alpha == 0.0) {
    if (decay == "poly-half") {
      alpha = 0.5;
      m_const = 1.0;
    } else if (decay == "poly-1") {
      alpha = 1.0;
      m_const = 1.0;
    } else if (decay == "poly-2") {
      alpha = 2.0;
      m_const = 1.0;
    } else if (decay == "exp-sqrt") {
      alpha = 2.0;
      m_const = 4.2;
    } else {
      alpha = 2.0;
      m_const = 0.6;
    }
  }
  const double gamma = cfg.getd("gamma");
  const GreedyMode mode = cfg.gets("mode") == "adversarial"
                              ? GreedyMode::adversarial
                              : GreedyMode::exact;
  const double build_ms = ms_since(t0);

  const auto t1 = Clock::now();
  const std::string trace_in = cfg.gets("trace_in");
  const GreedyTrace trace =
      trace_in.empty()
          ? weak_greedy_run(set, gamma, n_max, mode)
          : load_wgreedy_trace(trace_in, gamma, cfg.gets("mode"), set);
  const RateReport report = verify_rate_theorems(trace, set, alpha, m_const);
  const double run_ms = ms_since(t1);

  const auto t2 = Clock::now();
  const fs::path dir = cfg.gets("out");
  write_file(dir / "trace.csv", csv_wgreedy(trace));

  std::vector<Check> checks;
  for (const CheckLine &line : report.lines) {
    Check c;
    c.status = line.status == CheckLine::Status::pass ? "pass"
               : line.status == CheckLine::Status::fail ? "FAIL"
                                                        : "inconclusive";
    c.name = line.inequality;
    c.n = line.n;
    c.m = line.m;
    c.lhs = line.lhs;
    c.rhs = line.rhs;
    checks.push_back(c);
  }

  KvLines result = {
      {"source", trace_in.empty() ? "run" : "trace_in"},
      {"rows", std::to_string(trace.rows.size())},
      {"sigma_final", g17(trace.rows.back().sigma)},
      {"checks_passed",
       std::to_string(report.count(CheckLine::Status::pass))},
      {"checks_failed",
       std::to_string(report.count(CheckLine::Status::fail))},
      {"checks_inconclusive",
       std::to_string(report.count(CheckLine::Status::inconclusive))},
      {"alpha", g17(alpha)},
      {"m_const", g17(m_const)}};
  if (!report.note.empty())
    result.push_back({"note", report.note});
  Timings timings = {
      {"build", build_ms}, {"run", run_ms}, {"write", ms_since(t2)}};
  return finish(dir, cfg, result, timings, {"trace.csv"}, checks);
}

RunResult cmd_goal(const ResolvedConfig &cfg) {
  const double box_lo = cfg.getd("box_lo");
  const double box_hi = cfg.getd("box_hi");
  if (box_lo >= box_hi)
    throw ConfigError("key 'box_hi': must exceed box_lo");

  const auto t0 = Clock::now();
  const int cells = cfg.mesh_cells("h");
  const TruthModel model(cells, cfg.getd("epsilon"));
  const std::vector<ParameterPoint> grid =
      make_angle_grid(cfg.geti("grid"), cfg.getd("epsilon"));
  const GoalFunctional ell =
      make_mean_functional(cells, box_lo, box_hi, box_lo, box_hi);
  const double build_ms = ms_since(t0);

  const auto t1 = Clock::now();
  const PipelineReport report =
      primal_dual_pipeline(model, grid, cfg.getd("delta"), cfg.geti("n_total"),
                           cfg.getd("alpha"), cfg.getd("beta"), ell);
  const double run_ms = ms_since(t1);

  const auto t2 = Clock::now();
  const fs::path dir = cfg.gets("out");
  write_file(dir / "trace.csv", csv_goal(report));
  write_file(dir / "primal_trace.csv", csv_sga_dou(report.primal_trace));
  write_file(dir / "dual_trace.csv", csv_sga_dou(report.dual_trace));

  const double bound = 10.0 * report.sigma_primal * report.sigma_dual;
  std::vector<Check> checks = {make_check("goal-bound", cfg.geti("n_total"),
                                          report.max_err_corrected, bound,
                                          report.max_err_corrected <= bound)};

  KvLines result = {
      {"m", std::to_string(report.m)},
      {"n_dual", std::to_string(report.n_dual)},
      {"sigma_primal", g17(report.sigma_primal)},
      {"sigma_dual", g17(report.sigma_dual)},
      {"alpha_hat", g17(report.alpha_hat)},
      {"beta_hat", g17(report.beta_hat)},
      {"max_err_uncorrected", g17(report.max_err_uncorrected)},
      {"max_err_corrected", g17(report.max_err_corrected)},
      {"corrected_win_fraction", g17(report.corrected_win_fraction)},
      {"functional", ell.descriptor}};
  Timings timings = {
      {"build", build_ms}, {"run", run_ms}, {"write", ms_since(t2)}};
  return finish(dir, cfg, result, timings,
                {"trace.csv", "primal_trace.csv", "dual_trace.csv"}, checks);
}

std::string manifest_command(const fs::path &path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const std::string prefix = "command = ";
    if (line.rfind(prefix, 0) == 0)
      return line.substr(prefix.size());
  }
  return "";
}

std::map<int, std::string> checks_flags(const fs::path &path) {
  std::map<int, std::string> flags;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string status;
    std::string token;
    ls >> status;
    int n = -1;
    while (ls >> token)
      if (token.rfind("n=", 0) == 0)
        n = std::atoi(token.c_str() + 2);
    if (n < 0)
      continue;
    const std::string mark = status == "pass"           ? "pass"
                             : status == "inconclusive" ? "incl"
                                                        : "FAIL";
    auto it = flags.find(n);
    if (it == flags.end())
      flags[n] = mark;
    else if (mark == "FAIL" || (mark == "incl" && it->second == "pass"))
      it->second = mark;
  }
  return flags;
}

bool is_integer_column(const std::string &name) {
  return name == "n" || name == "n_V" || name == "selected" ||
         name == "n_cells" || name == "dim_trial" || name == "dim_test";
}

std::string fixed_table(const std::vector<std::string> &header,
                        const std::vector<std::vector<std::string>> &cells) {
  std::vector<size_t> width(header.size());
  for (size_t j = 0; j < header.size(); ++j)
    width[j] = header[j].size();
  for (const auto &row : cells)
    for (size_t j = 0; j < row.size(); ++j)
      width[j] = std::max(width[j], row[j].size());
  std::string out;
  auto emit = [&](const std::vector<std::string> &row) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j > 0)
        out += "  ";
      out += std::string(width[j] - row[j].size(), ' ') + row[j];
    }
    out += "\n";
  };
  emit(header);
  for (const auto &row : cells)
    emit(row);
  return out;
}

RunResult cmd_report(const ResolvedConfig &cfg) {
  const fs::path dir = cfg.gets("out");
  const fs::path manifest = dir / "manifest.txt";
  if (!fs::exists(manifest))
    return {1, "missing file: " + manifest.string()};
  const std::string command = manifest_command(manifest);
  if (command.empty())
    return {1, "no command recorded in " + manifest.string()};
  const fs::path trace_path = dir / "trace.csv";
  if (!fs::exists(trace_path))
    return {1, "missing file: " + trace_path.string()};
  const CsvTable trace = read_csv(trace_path.string());

  std::vector<std::string> header = trace.header;
  std::vector<std::vector<std::string>> cells;
  for (const std::vector<double> &row : trace.rows) {
    std::vector<std::string> line;
    for (size_t j = 0; j < row.size(); ++j)
      line.push_back(is_integer_column(header[j])
                         ? std::to_string(std::lround(row[j]))
                         : g10(row[j]));
    cells.push_back(line);
  }

  const auto n_col = std::find(header.begin(), header.end(), "n");
  if (fs::exists(dir / "checks.txt") && n_col != header.end()) {
    const std::map<int, std::string> flags = checks_flags(dir / "checks.txt");
    if (!flags.empty()) {
      const size_t j = static_cast<size_t>(n_col - header.begin());
      header.push_back("checks");
      for (size_t i = 0; i < cells.size(); ++i) {
        const int n =
            static_cast<int>(std::lround(trace.rows[i][j]));
        const auto it = flags.find(n);
        cells[i].push_back(it == flags.end() ? "-" : it->second);
      }
    }
  }

  const std::string table = fixed_table(header, cells);
  write_file(dir / "table.txt", table);
  std::fputs(table.c_str(), stdout);

  // Convergence curve: trial dimension against the surrogate, from the
  // run's own trace or, for goal runs, from the primal greedy trace.
  CsvTable curve_src = trace;
  if (command == "goal" && fs::exists(dir / "primal_trace.csv"))
    curve_src = read_csv((dir / "primal_trace.csv").string());
  const auto find_col = [&](const std::string &name) {
    const auto it =
        std::find(curve_src.header.begin(), curve_src.header.end(), name);
    return it == curve_src.header.end()
               ? -1
               : static_cast<int>(it - curve_src.header.begin());
  };
  const int dim_col = find_col("n");
  int val_col = find_col("surrogate_max");
  if (val_col < 0)
    val_col = find_col("sigma");
  if (dim_col >= 0 && val_col >= 0) {
    std::string curve = "dim,surrogate\n";
    for (const std::vector<double> &row : curve_src.rows)
      curve +=
          std::to_string(std::lround(row[static_cast<size_t>(dim_col)])) +
          "," + g17(row[static_cast<size_t>(val_col)]) + "\n";
    write_file(dir / "curve.csv", curve);
  }
  return {0, ""};
}

} // namespace

std::string csv_wgreedy(const GreedyTrace &trace) {
  std::string s = "n,selected,sigma,width_lower,width_upper,width_exact\n";
  for (const GreedyTraceRow &r : trace.rows)
    s += std::to_string(r.n) + "," + std::to_string(r.selected) + "," +
         g17(r.sigma) + "," + g17(r.width_lower) + "," + g17(r.width_upper) +
         "," + g17(r.width_exact) + "\n";
  return s;
}

std::string csv_sga(const SgaTrace &trace) {
  std::string s = trace.validated
                      ? "n,y_selected,surrogate_max,true_error_max,gamma_hat\n"
                      : "n,y_selected,surrogate_max\n";
  for (const SgaTraceRow &r : trace.rows) {
    s += std::to_string(r.n) + "," + g17(r.y_selected) + "," +
         g17(r.surrogate_max);
    if (trace.validated)
      s += "," + g17(r.true_error_max) + "," + g17(r.gamma_hat);
    s += "\n";
  }
  return s;
}

std::string csv_sga_dou(const SgaDouTrace &trace) {
  std::string s =
      trace.validated
          ? "n,n_V,delta_certified,y_selected,surrogate_max,true_error_max,"
            "ratio,gamma_hat\n"
          : "n,n_V,delta_certified,y_selected,surrogate_max\n";
  for (const SgaDouTraceRow &r : trace.rows) {
    s += std::to_string(r.n) + "," + std::to_string(r.n_v) + "," +
         g17(r.delta_certified) + "," + g17(r.y_selected) + "," +
         g17(r.surrogate_max);
    if (trace.validated)
      s += "," + g17(r.true_error_max) + "," + g17(r.ratio) + "," +
           g17(r.gamma_hat);
    s += "\n";
  }
  return s;
}

std::string csv_goal(const PipelineReport &report) {
  std::string s =
      "y,I_truth,I_uncorrected,I_corrected,err_uncorrected,err_corrected,"
      "bound_product\n";
  for (const PipelineRow &r : report.rows)
    s += g17(r.y) + "," + g17(r.i_truth) + "," + g17(r.i_uncorrected) + "," +
         g17(r.i_corrected) + "," + g17(r.err_uncorrected) + "," +
         g17(r.err_corrected) + "," + g17(r.bound_product) + "\n";
  return s;
}

CsvTable read_csv(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open trace file: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw ConfigError(path + ":1: missing header");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  table.header = split(line, ',');
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const std::vector<std::string> parts = split(line, ',');
    const std::string at = path + ":" + std::to_string(lineno) + ": ";
    if (parts.size() != table.header.size())
      throw ConfigError(at + "expected " +
                        std::to_string(table.header.size()) +
                        " fields, got " + std::to_string(parts.size()));
    std::vector<double> row;
    for (const std::string &cell : parts) {
      char *end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size())
        throw ConfigError(at + "bad numeric cell '" + cell + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

RunResult run_command(const ConfigMap &raw, const std::string &command) {
  try {
    const ResolvedConfig cfg = resolve_config(raw, command);
    if (command != "report")
      fs::create_directories(cfg.gets("out"));
    if (command == "build-truth")
      return cmd_build_truth(cfg);
    if (command == "sga")
      return cmd_sga(cfg);
    if (command == "sga-dou")
      return cmd_sga_dou(cfg);
    if (command == "wgreedy")
      return cmd_wgreedy(cfg);
    if (command == "goal")
      return cmd_goal(cfg);
    return cmd_report(cfg);
  } catch (const std::exception &e) {
    return {1, e.what()};
  }
}

} // namespace rbsam::cli

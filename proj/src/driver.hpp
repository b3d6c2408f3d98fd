#pragma once

#include "config.hpp"
#include "goal.hpp"
#include "stab.hpp"
#include "wgreedy.hpp"

#include <string>

namespace rbsam::cli {

inline constexpr const char *kVersion = "0.1.0";

struct RunResult {
  int code = 0;  // 0 ok, 1 operational error, 2 theory check failed
  std::string message;
};

// Executes one command against a raw configuration: resolves and
// validates the config, runs the pipeline, and writes trace files, a
// checks file where the command defines checks, and manifest.txt into
// the configured output directory. Never throws; failures are returned
// as a nonzero code with a diagnostic message.
RunResult run_command(const ConfigMap &raw, const std::string &command);

// Trace serialization used by the driver and by downstream tooling.
// Formats every floating value with "%.17g" so equal runs produce equal
// bytes. Validated traces carry their extra columns; the headers are
//   n,selected,sigma,width_lower,width_upper,width_exact
//   n,y_selected,surrogate_max[,true_error_max,gamma_hat]
//   n,n_V,delta_certified,y_selected,surrogate_max
//       [,true_error_max,ratio,gamma_hat]
//   y,I_truth,I_uncorrected,I_corrected,err_uncorrected,err_corrected,
//       bound_product
std::string csv_wgreedy(const GreedyTrace &trace);
std::string csv_sga(const SgaTrace &trace);
std::string csv_sga_dou(const SgaDouTrace &trace);
std::string csv_goal(const PipelineReport &report);

// Parses a CSV produced by the serializers above back into a header and
// numeric rows. Raises ConfigError with file and line context on
// malformed input.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string &path);

} // namespace rbsam::cli

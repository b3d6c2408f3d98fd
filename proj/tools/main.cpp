#include "rbsam.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

int main(int argc, char **argv) {
  CLI::App app{"rbsam: reduced-basis sampling of parametric PDE manifolds"};
  app.set_version_flag("--version", rbsam_version());
  app.require_subcommand(1);

  struct {
    std::string config;
    std::string out;
    std::string seed;
    bool validate = false;
  } opts;

  const struct {
    const char *name;
    const char *help;
  } commands[] = {
      {"build-truth", "assemble the parametric truth pair and report it"},
      {"sga", "surrogate greedy with square Galerkin reduced solves"},
      {"sga-dou", "stabilized double greedy with inf-sup certification"},
      {"wgreedy", "weak greedy on a synthetic compact set, rate checks"},
      {"goal", "goal-oriented primal-dual pipeline"},
      {"report", "render tables and curve data from a finished run"},
  };
  for (const auto &c : commands) {
    CLI::App *sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opts.config, "configuration file");
    sub->add_option("--out", opts.out, "output directory");
    sub->add_flag("--validate", opts.validate,
                  "enable truth-sweep validation");
    sub->add_option("--seed", opts.seed, "random seed (unsigned 64-bit)");
  }

  CLI11_PARSE(app, argc, argv);
  const CLI::App *sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  rbsam_job *job = rbsam_job_new();
  if (job == nullptr) {
    std::fprintf(stderr, "rbsam: out of memory\n");
    return RBSAM_ERR_OPERATIONAL;
  }
  int rc = RBSAM_OK;
  if (!opts.config.empty())
    rc = rbsam_job_load_config(job, opts.config.c_str());
  if (rc == RBSAM_OK && !opts.out.empty())
    rc = rbsam_job_set(job, "out", opts.out.c_str());
  if (rc == RBSAM_OK && !opts.seed.empty())
    rc = rbsam_job_set(job, "seed", opts.seed.c_str());
  if (rc == RBSAM_OK && opts.validate)
    rc = rbsam_job_set(job, "validate", "true");
  if (rc == RBSAM_OK)
    rc = rbsam_job_run(job, command.c_str());
  if (rc != RBSAM_OK)
    std::fprintf(stderr, "rbsam: %s\n", rbsam_job_error(job));
  rbsam_job_free(job);
  return rc;
}

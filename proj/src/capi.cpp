#include "rbsam.h"

#include "config.hpp"
#include "driver.hpp"

#include <new>
#include <string>
#include <utility>

struct rbsam_job {
  rbsam::cli::ConfigMap config;
  std::string error;
};

extern "C" {

rbsam_job *rbsam_job_new(void) { return new (std::nothrow) rbsam_job; }

void rbsam_job_free(rbsam_job *job) { delete job; }

int rbsam_job_load_config(rbsam_job *job, const char *path) {
  if (job == nullptr)
    return RBSAM_ERR_OPERATIONAL;
  if (path == nullptr) {
    job->error = "load_config: path is null";
    return RBSAM_ERR_OPERATIONAL;
  }
  try {
    rbsam::cli::ConfigMap parsed = rbsam::cli::parse_config_file(path);
    job->config = std::move(parsed);
    job->error.clear();
    return RBSAM_OK;
  } catch (const std::exception &e) {
    job->error = e.what();
    return RBSAM_ERR_OPERATIONAL;
  }
}

int rbsam_job_set(rbsam_job *job, const char *key, const char *value) {
  if (job == nullptr)
    return RBSAM_ERR_OPERATIONAL;
  if (key == nullptr || *key == '\0' || value == nullptr ||
      *value == '\0') {
    job->error = "set: key and value must be nonempty";
    return RBSAM_ERR_OPERATIONAL;
  }
  job->config[key] = value;
  job->error.clear();
  return RBSAM_OK;
}

int rbsam_job_run(rbsam_job *job, const char *command) {
  if (job == nullptr)
    return RBSAM_ERR_OPERATIONAL;
  if (command == nullptr) {
    job->error = "run: command is null";
    return RBSAM_ERR_OPERATIONAL;
  }
  try {
    const rbsam::cli::RunResult result =
        rbsam::cli::run_command(job->config, command);
    job->error = result.message;
    return result.code;
  } catch (const std::exception &e) {
    job->error = e.what();
    return RBSAM_ERR_OPERATIONAL;
  } catch (...) {
    job->error = "run: unknown failure";
    return RBSAM_ERR_OPERATIONAL;
  }
}

const char *rbsam_job_error(const rbsam_job *job) {
  return job == nullptr ? "" : job->error.c_str();
}

const char *rbsam_version(void) { return rbsam::cli::kVersion; }

} // extern "C"

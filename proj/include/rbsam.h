/* rbsam -- reduced-basis sampling of parametric PDE solution manifolds.
 *
 * C interface to the experiment driver. A job holds a configuration
 * (loaded from a flat key = value file, optionally overridden key by key)
 * and runs one of the named commands, writing trace files and a manifest
 * into the configured output directory.
 *
 * All functions are thread-compatible: distinct jobs may be used from
 * distinct threads, a single job must not be shared without locking.
 */
#ifndef RBSAM_H
#define RBSAM_H

#ifdef __cplusplus
extern "C" {
#endif

/* Result codes. rbsam_job_run returns the same values the CLI uses as
 * process exit codes. */
#define RBSAM_OK 0
#define RBSAM_ERR_OPERATIONAL 1  /* bad config, I/O failure, solver breakdown */
#define RBSAM_ERR_CHECK_FAILED 2 /* a theory inequality check did not hold */

typedef struct rbsam_job rbsam_job;

/* Create an empty job. Returns NULL only on allocation failure. */
rbsam_job *rbsam_job_new(void);

/* Destroy a job. NULL is allowed. */
void rbsam_job_free(rbsam_job *job);

/* Load a flat key = value configuration file. Returns RBSAM_OK or
 * RBSAM_ERR_OPERATIONAL; on failure the job keeps its previous state and
 * rbsam_job_error describes the problem. */
int rbsam_job_load_config(rbsam_job *job, const char *path);

/* Set or override a single configuration key. Key validity is checked when
 * the job runs, since the legal key set depends on the command. */
int rbsam_job_set(rbsam_job *job, const char *key, const char *value);

/* Run one command: "build-truth", "sga", "sga-dou", "wgreedy", "goal",
 * or "report". Returns RBSAM_OK, RBSAM_ERR_OPERATIONAL, or
 * RBSAM_ERR_CHECK_FAILED. */
int rbsam_job_run(rbsam_job *job, const char *command);

/* Text of the last error (or check failure) on this job, empty string if
 * none. The pointer stays valid until the next call on the same job. */
const char *rbsam_job_error(const rbsam_job *job);

/* Library version string, e.g. "0.1.0". */
const char *rbsam_version(void);

#ifdef __cplusplus
}
#endif

#endif /* RBSAM_H */

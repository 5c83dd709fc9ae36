/* C interface for the atomwise fixed-point solver library.
 *
 * Usage: create a job for a task, load a problem document, optionally
 * override options, run, then read the report. All strings returned by the
 * library stay owned by the job and live until the next run or free.
 *
 *   l0fp_job* job = l0fp_job_new(L0FP_TASK_SOLVE);
 *   l0fp_job_load(job, problem_json);
 *   l0fp_job_set(job, "epsilon", "1e-4");
 *   if (l0fp_job_run(job) == L0FP_OK) puts(l0fp_job_report(job));
 *   else fputs(l0fp_job_error(job), stderr);
 *   l0fp_job_free(job);
 */
#ifndef L0FP_H
#define L0FP_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    L0FP_OK = 0,       /* run finished; report available */
    L0FP_EINVAL = 1,   /* invalid problem, options, or state */
    L0FP_EMAXITER = 2, /* solve stopped at max_iter; partial report available */
    L0FP_EINTERNAL = 3 /* internal invariant failure */
} l0fp_status;

typedef enum {
    L0FP_TASK_SOLVE = 0,
    L0FP_TASK_SPERNER = 1,
    L0FP_TASK_SUBDIVIDE = 2
} l0fp_task;

typedef struct l0fp_job l0fp_job;

/* Library version as "major.minor.patch". */
const char* l0fp_version(void);

/* Creates a job; returns NULL only on allocation failure. */
l0fp_job* l0fp_job_new(l0fp_task task);
void l0fp_job_free(l0fp_job* job);

/* Stores the problem document (JSON text). Validation happens at run. */
l0fp_status l0fp_job_load(l0fp_job* job, const char* problem_json);

/* Option overrides applied over the problem's solver block. Keys: "arith"
 * ("rational"|"float"), "epsilon", "max-iter", "threads", "seed", "trace"
 * ("on"|"off"), "depth", "enumerate-all", "verify-samples". Unknown keys are
 * rejected at run. */
l0fp_status l0fp_job_set(l0fp_job* job, const char* key, const char* value);

/* Runs the task. L0FP_EMAXITER still produces a report. */
l0fp_status l0fp_job_run(l0fp_job* job);

/* Report / trace JSON from the last successful run, else NULL. The trace is
 * NULL unless requested via "trace"="on". */
const char* l0fp_job_report(const l0fp_job* job);
const char* l0fp_job_trace(const l0fp_job* job);

/* Message for the last failure, or an empty string. */
const char* l0fp_job_error(const l0fp_job* job);

#ifdef __cplusplus
}
#endif

#endif /* L0FP_H */

#include "l0fp.h"

#include <map>
#include <new>
#include <optional>
#include <string>

#include "l0/json_io.hpp"

struct l0fp_job {
    l0fp_task task = L0FP_TASK_SOLVE;
    std::string problem;
    bool loaded = false;
    std::map<std::string, std::string> overrides;
    std::optional<std::string> report;
    std::optional<std::string> trace;
    std::string error;
};

extern "C" {

const char* l0fp_version(void) { return "1.0.0"; }

l0fp_job* l0fp_job_new(l0fp_task task) {
    l0fp_job* job = new (std::nothrow) l0fp_job;
    if (job) job->task = task;
    return job;
}

void l0fp_job_free(l0fp_job* job) { delete job; }

l0fp_status l0fp_job_load(l0fp_job* job, const char* problem_json) {
    if (!job) return L0FP_EINVAL;
    if (!problem_json) {
        job->error = "load: problem text is null";
        return L0FP_EINVAL;
    }
    job->problem = problem_json;
    job->loaded = true;
    return L0FP_OK;
}

l0fp_status l0fp_job_set(l0fp_job* job, const char* key, const char* value) {
    if (!job) return L0FP_EINVAL;
    if (!key || !value) {
        job->error = "set: key and value must be non-null";
        return L0FP_EINVAL;
    }
    job->overrides[key] = value;
    return L0FP_OK;
}

l0fp_status l0fp_job_run(l0fp_job* job) {
    if (!job) return L0FP_EINVAL;
    job->report.reset();
    job->trace.reset();
    job->error.clear();
    if (!job->loaded) {
        job->error = "run: no problem loaded";
        return L0FP_EINVAL;
    }
    l0::io::Task task;
    switch (job->task) {
        case L0FP_TASK_SOLVE: task = l0::io::Task::solve; break;
        case L0FP_TASK_SPERNER: task = l0::io::Task::sperner; break;
        case L0FP_TASK_SUBDIVIDE: task = l0::io::Task::subdivide; break;
        default: job->error = "run: unknown task"; return L0FP_EINVAL;
    }
    try {
        l0::io::TaskResult result = l0::io::run_task(task, job->problem, job->overrides);
        job->report = std::move(result.report);
        job->trace = std::move(result.trace);
        return result.hit_max_iter ? L0FP_EMAXITER : L0FP_OK;
    } catch (const l0::ValidationError& e) {
        job->error = e.what();
        return L0FP_EINVAL;
    } catch (const l0::StructuralError& e) {
        job->error = e.what();
        return L0FP_EINVAL;
    } catch (const l0::MembershipError& e) {
        job->error = e.what();
        return L0FP_EINVAL;
    } catch (const l0::IndependenceError& e) {
        job->error = e.what();
        return L0FP_EINVAL;
    } catch (const l0::DegenerateDirectionError& e) {
        job->error = e.what();
        return L0FP_EINVAL;
    } catch (const l0::Error& e) {
        job->error = e.what();
        return L0FP_EINTERNAL;
    } catch (const std::exception& e) {
        job->error = e.what();
        return L0FP_EINTERNAL;
    }
}

const char* l0fp_job_report(const l0fp_job* job) {
    return job && job->report ? job->report->c_str() : nullptr;
}

const char* l0fp_job_trace(const l0fp_job* job) {
    return job && job->trace ? job->trace->c_str() : nullptr;
}

const char* l0fp_job_error(const l0fp_job* job) { return job ? job->error.c_str() : ""; }

}  // extern "C"

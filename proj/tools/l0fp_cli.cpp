#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "l0fp.h"

namespace {

struct Args {
    std::string problem;
    std::string report_path;
    std::string trace_path;
    std::map<std::string, std::string> sets;
};

bool write_file(const std::string& path, const char* text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return static_cast<bool>(out);
}

void print_summary(l0fp_task task, const char* report, const std::string& report_path) {
    try {
        nlohmann::json j = nlohmann::json::parse(report);
        std::ostringstream line;
        switch (task) {
            case L0FP_TASK_SOLVE:
                line << "solve: " << j.value("status", "?") << ", atoms=" << j.value("atoms", 0)
                     << ", arithmetic=" << j.value("arithmetic", "?");
                break;
            case L0FP_TASK_SPERNER:
                if (j.contains("labelings"))
                    line << "sperner: labelings=" << j["labelings"] << ", all_odd="
                         << (j.value("all_odd", false) ? "true" : "false");
                else
                    line << "sperner: parts=" << j.value("parts", 0);
                break;
            case L0FP_TASK_SUBDIVIDE:
                line << "subdivide: depth=" << j.value("depth", 0) << ", leaf_cells="
                     << (j.contains("cells") && !j["cells"].empty() ? j["cells"].back().dump() : "?");
                break;
        }
        line << ", report=" << report_path;
        std::cout << line.str() << "\n";
    } catch (...) {
        std::cout << "report=" << report_path << "\n";
    }
}

int run_job(l0fp_task task, const Args& args) {
    std::ifstream in(args.problem, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read problem file '" << args.problem << "'\n";
        return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    l0fp_job* job = l0fp_job_new(task);
    if (!job) {
        std::cerr << "error: out of memory\n";
        return 1;
    }
    l0fp_job_load(job, text.c_str());
    for (const auto& [key, value] : args.sets) l0fp_job_set(job, key.c_str(), value.c_str());
    if (!args.trace_path.empty()) l0fp_job_set(job, "trace", "on");

    l0fp_status status = l0fp_job_run(job);
    if (status == L0FP_EINVAL || status == L0FP_EINTERNAL) {
        std::cerr << "error: " << l0fp_job_error(job) << "\n";
        l0fp_job_free(job);
        return 1;
    }

    const char* report = l0fp_job_report(job);
    int rc = status == L0FP_EMAXITER ? 2 : 0;
    if (!args.report_path.empty()) {
        if (!write_file(args.report_path, report)) {
            std::cerr << "error: cannot write report to '" << args.report_path << "'\n";
            l0fp_job_free(job);
            return 1;
        }
        print_summary(task, report, args.report_path);
    } else {
        std::cout << report;
    }
    if (!args.trace_path.empty()) {
        const char* trace = l0fp_job_trace(job);
        if (trace && !write_file(args.trace_path, trace)) {
            std::cerr << "error: cannot write trace to '" << args.trace_path << "'\n";
            l0fp_job_free(job);
            return 1;
        }
    }
    l0fp_job_free(job);
    return rc;
}

void add_common(CLI::App* cmd, Args& args) {
    cmd->add_option("--problem", args.problem, "Problem JSON file")->required();
    cmd->add_option("--report", args.report_path, "Write the report JSON here (default: stdout)");
}

/// Stores a flag's value as a string override for the library.
void add_passthrough(CLI::App* cmd, Args& args, const std::string& flag, const std::string& key,
                     const std::string& help) {
    cmd->add_option_function<std::string>(
           flag, [&args, key](const std::string& v) { args.sets[key] = v; }, help)
        ->expected(1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Atomwise simplicial fixed-point toolkit"};
    app.set_version_flag("--version", [] { return std::string(l0fp_version()); });
    app.require_subcommand(1);

    Args solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Locate an approximate fixed point");
    add_common(solve, solve_args);
    solve->add_option("--trace", solve_args.trace_path, "Write the refinement trace JSON here");
    add_passthrough(solve, solve_args, "--epsilon", "epsilon", "Diameter stopping tolerance");
    add_passthrough(solve, solve_args, "--max-iter", "max-iter", "Refinement level cap");
    add_passthrough(solve, solve_args, "--arith", "arith", "Arithmetic backend: rational|float");
    add_passthrough(solve, solve_args, "--threads", "threads", "Atom-parallel workers");
    add_passthrough(solve, solve_args, "--seed", "seed", "Sampling seed (never affects the solve path)");

    Args sperner_args;
    CLI::App* sperner = app.add_subcommand("sperner", "Decompose a labeling and locate completely labeled cells");
    add_common(sperner, sperner_args);
    sperner->add_flag_callback(
        "--enumerate-all", [&sperner_args] { sperner_args.sets["enumerate-all"] = "on"; },
        "Sweep every proper labeling (at most 3 vertices) and check odd counts");

    Args subdivide_args;
    CLI::App* subdivide = app.add_subcommand("subdivide", "Iterate barycentric subdivision with certified contraction");
    add_common(subdivide, subdivide_args);
    subdivide->add_option("--trace", subdivide_args.trace_path, "Write the subdivision trace JSON here");
    add_passthrough(subdivide, subdivide_args, "--depth", "depth", "Subdivision depth (default 1)");
    add_passthrough(subdivide, subdivide_args, "--seed", "seed", "Seed for the containment sampling probe");
    add_passthrough(subdivide, subdivide_args, "--verify-samples", "verify-samples",
                    "Check this many random points for cell coverage");

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) return run_job(L0FP_TASK_SOLVE, solve_args);
    if (sperner->parsed()) return run_job(L0FP_TASK_SPERNER, sperner_args);
    return run_job(L0FP_TASK_SUBDIVIDE, subdivide_args);
}

#pragma once

#include <map>
#include <optional>
#include <string>

#include "solve.hpp"

namespace l0::io {

enum class Task { solve, sperner, subdivide };

struct TaskResult {
    std::string report;                // JSON document
    std::optional<std::string> trace;  // JSON document, when requested
    bool hit_max_iter = false;         // solve only
};

/// Runs one task from a problem document plus string overrides (command-line
/// flags or API set calls). Throws library errors on invalid input; a solve
/// that stops at max_iter is not an error and sets hit_max_iter instead.
TaskResult run_task(Task task, const std::string& problem_text,
                    const std::map<std::string, std::string>& overrides);

/// 17-significant-digit, locale-independent rendering used for every float
/// in reports.
std::string fmt_double(double v);

}  // namespace l0::io

#pragma once

#include <string>

#include "dowg/problem.hpp"

namespace dowg {

// JSON forms: {"builtin": 1..6} for the built-in problems, otherwise
// {"name": ..., "singular_at_zero": ..., "coefficient": {...}, "source": {...}}
// where each factor object is tagged {"type": "analytic"|"piecewise"|"product"}.
// Analytic factors are referenced by registry name (see named_analytic), so
// only registered formulas survive a round trip. Custom problems deserialize
// without an exact solution; references fall back to the integral oracle.

std::string problem_to_json_string(const ProblemSpec& problem);
ProblemSpec problem_from_json_string(const std::string& text);

ProblemSpec load_problem_file(const std::string& path);
void save_problem_file(const ProblemSpec& problem, const std::string& path);

}  // namespace dowg

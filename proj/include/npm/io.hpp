#pragma once

#include <string>

#include "npm/ltv.hpp"
#include "npm/matrix.hpp"
#include "npm/mor.hpp"

namespace npm {

// Matrix files are headerless CSV: one row per line, comma-separated decimal
// numbers. Parsing is strict; diagnostics carry 1-based line numbers.
// Throws ParseError on empty files, malformed numbers, or non-finite values,
// ShapeError on ragged rows.
Matrix load_matrix(const std::string& path);

// System files are three matrix blocks (A, B, C) separated by blank lines.
// Cross-shape validation is delegated to the LtiSystem constructor.
LtiSystem load_system(const std::string& path);

// Full-precision decimal rendering (%.17g): parsing the text recovers the
// exact double, so written artifacts are byte-stable and lossless.
std::string format_full(double v);

void save_matrix(const std::string& path, const Matrix& m);

// Columns: k,norm_x,norm_err,u,dist_U,dist_V,gain_flag (flag as 0/1).
void save_trajectory(const std::string& path, const TrajectoryLog& log);

}  // namespace npm

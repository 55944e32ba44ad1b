#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "fdla/admm.hpp"
#include "fdla/consensus.hpp"
#include "fdla/spectral.hpp"

namespace fdla {

/// n rows of comma-separated values, 17 significant digits.
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);

/// Values separated by commas and/or whitespace.
Vector read_vector(std::istream& in);

/// Columns: round,agent,objective,R,r1,r2,max_r3 (agents 1-based).
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);

/// Columns: t,agent,value,error_norm,cf_bar,cf_metropolis. cf columns are
/// empty on the final row (no matrix is applied at t = T).
void write_live_csv(std::ostream& out, const LiveRun& run);

/// Columns: t,agent,value,error_norm for a fixed-matrix run.
void write_trajectory_csv(std::ostream& out, const Trajectory& tr);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace fdla

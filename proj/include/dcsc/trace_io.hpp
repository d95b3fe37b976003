#pragma once
// Convergence-trace CSV with the fixed header
// outer_iter,phase,objective,data_term,l1_term,admm_iters,cg_iters,elapsed_ms

#include <iosfwd>

#include "dcsc/types.hpp"

namespace dcsc {

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace);
void write_trace_csv(const std::string& path, const ConvergenceTrace& trace);
ConvergenceTrace read_trace_csv(const std::string& path);

}  // namespace dcsc

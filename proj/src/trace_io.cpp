#include "dcsc/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace dcsc {

namespace {
constexpr const char* kHeader =
    "outer_iter,phase,objective,data_term,l1_term,admm_iters,cg_iters,elapsed_ms";
}

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace) {
  os << kHeader << "\n";
  os.precision(17);
  for (const TraceRow& r : trace.rows) {
    os << r.outer_iter << ',' << phase_name(r.phase) << ',' << r.objective.total << ','
       << r.objective.data_term << ',' << r.objective.l1_term << ',' << r.admm_iters << ','
       << r.cg_iters << ',' << r.elapsed_ms << "\n";
  }
}

void write_trace_csv(const std::string& path, const ConvergenceTrace& trace) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_trace_csv(os, trace);
  if (!os) throw IoError("write failed for '" + path + "'");
}

ConvergenceTrace read_trace_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line) || line != kHeader)
    throw IoError("'" + path + "' does not carry the trace header");

  ConvergenceTrace trace;
  int last_outer = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    TraceRow r;

    std::getline(row, field, ',');
    r.outer_iter = std::stoi(field);
    std::getline(row, field, ',');
    if (field == "coding")
      r.phase = Phase::Coding;
    else if (field == "learning")
      r.phase = Phase::Learning;
    else
      throw IoError("unknown phase '" + field + "' in '" + path + "'");
    std::getline(row, field, ',');
    r.objective.total = std::stod(field);
    std::getline(row, field, ',');
    r.objective.data_term = std::stod(field);
    std::getline(row, field, ',');
    r.objective.l1_term = std::stod(field);
    std::getline(row, field, ',');
    r.admm_iters = std::stol(field);
    std::getline(row, field, ',');
    r.cg_iters = std::stol(field);
    std::getline(row, field, ',');
    r.elapsed_ms = std::stod(field);

    if (!std::isfinite(r.objective.total))
      throw IoError("non-finite objective value in '" + path + "'");
    if (r.outer_iter < last_outer) throw IoError("trace rows out of order in '" + path + "'");
    last_outer = r.outer_iter;
    trace.rows.push_back(r);
  }
  return trace;
}

}  // namespace dcsc

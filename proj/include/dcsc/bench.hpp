#pragma once
// Scaling benchmark harness: short solver runs over a parameter grid on
// synthetic data, timing the coding and learning phases. Wall clock is taken
// around the solver calls only; I/O and objective bookkeeping are excluded.

#include <iosfwd>

#include "dcsc/pipeline.hpp"
#include "dcsc/types.hpp"

namespace dcsc {

enum class BenchVary { Filters, Images, Beta };

struct BenchConfig {
  BenchVary vary = BenchVary::Filters;
  std::vector<double> grid;  // values taken by the varied parameter
  int repeats = 1;

  GridDims dims = {64, 64};
  GridDims support = {11, 11};
  int filters = 8;
  int images = 2;
  int channels = 1;  // > 1 benches the TCSC path
  double beta = 0.5;
  int outer_iters = 3;  // measured outer iterations per run
  SolverConfig solver;  // rho, caps, seed
};

struct BenchRow {
  double varied_value = 0.0;
  Phase phase = Phase::Coding;
  double mean_ms_per_outer = 0.0;
  double std_ms = 0.0;
  // per inner-iteration costs, used by the scaling checks
  double mean_ms_per_admm_iter = 0.0;  // coding rows
  double mean_ms_per_cg_iter = 0.0;    // learning rows
};

// Throws std::invalid_argument for an empty grid or repeats < 1.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

// CSV rows: varied_value,phase,mean_ms_per_outer_iter,std_ms
void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows);

// Seeded synthetic dataset used by the bench runs.
Dataset synthetic_dataset(const GridDims& dims, int channels, int images,
                          std::uint64_t seed);

}  // namespace dcsc

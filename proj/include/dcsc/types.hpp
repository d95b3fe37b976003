#pragma once
// Core domain types shared by all solvers: signals on circular grids,
// dictionaries with corner-placed small supports, full-size sparse maps,
// solver configuration, and the per-iteration convergence trace.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcsc {

// Grid sizes n1..nd; the flat element count D is their product.
using GridDims = std::vector<int>;

std::size_t grid_count(const GridDims& dims);

// Row-major strides, last axis fastest.
std::vector<std::size_t> row_major_strides(const GridDims& dims);

// Shape mismatches between signals, dictionaries and maps.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric consistency violations (non-finite values, imaginary residue).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NormalizeMode { None, Global, Local };

// Real-valued input data (image, channel stack, or video block) on a grid
// with circular boundary convention. Values are row-major over the grid,
// one contiguous block per channel.
struct SignalTensor {
  GridDims dims;
  int channels = 1;  // J
  std::vector<double> values;

  SignalTensor() = default;
  SignalTensor(GridDims grid, int channel_count);

  std::size_t grid_count() const { return dcsc::grid_count(dims); }
  std::span<const double> channel(int j) const;
  std::span<double> channel(int j);

  void validate() const;
};

// K filters of spatial support m1..md with J channels each. A filter
// occupies the low-index corner of the full grid when zero-padded.
struct Dictionary {
  int filters = 0;  // K
  GridDims support;
  int channels = 1;  // J
  std::vector<double> values;  // filters x channels x support, row-major

  Dictionary() = default;
  Dictionary(int filter_count, GridDims filter_support, int channel_count);

  std::size_t support_count() const { return dcsc::grid_count(support); }
  std::span<const double> filter(int k, int j = 0) const;
  std::span<double> filter(int k, int j = 0);
  // l2 norm of filter k across all channels
  double filter_norm(int k) const;

  void validate() const;
};

// K full-size coefficient maps for one signal.
struct SparseMaps {
  int maps = 0;  // K
  GridDims dims;
  std::vector<double> values;  // maps x grid

  SparseMaps() = default;
  SparseMaps(int map_count, GridDims grid);

  std::size_t grid_count() const { return dcsc::grid_count(dims); }
  std::span<const double> map(int k) const;
  std::span<double> map(int k);

  void validate() const;
};

struct SolverConfig {
  double beta = 0.5;       // sparsity weight
  double rho = 0.1;        // ADMM step size
  double tol = 1e-3;       // outer convergence threshold tau
  int max_outer = 50;
  int max_admm = 500;
  int max_mu_iters = 60;
  double cg_tol = 1e-6;    // relative residual target for gamma solves
  int cg_max = 300;        // CG budget Q
  double mu_floor = 1e-6;  // smallest admissible multiplier
  std::uint64_t seed = 0;
  NormalizeMode normalize = NormalizeMode::Global;

  void validate() const;  // throws std::invalid_argument
};

struct ObjectiveBreakdown {
  double data_term = 0.0;      // 1/2 ||x - sum_k d_k * z_k||^2
  double l1_term = 0.0;        // beta * sum_k ||z_k||_1
  double total = 0.0;          // data_term + l1_term, stored as the exact sum
  double residual_norm = 0.0;  // ||Dz - x||_2
};

enum class Phase { Coding, Learning };
const char* phase_name(Phase p);

struct TraceRow {
  int outer_iter = 0;
  Phase phase = Phase::Coding;
  ObjectiveBreakdown objective;
  long admm_iters = 0;
  long cg_iters = 0;
  double elapsed_ms = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;

  // true when totals never increase by more than `slack` between rows
  bool objective_monotone(double slack = 1e-9) const;
};

}  // namespace dcsc

#pragma once
// Coordinate-descent driver: contrast normalization, deterministic
// initialization, and the alternating coding/learning loop with warm starts
// and per-half-step objective bookkeeping.

#include "dcsc/coding.hpp"
#include "dcsc/learning.hpp"
#include "dcsc/types.hpp"

namespace dcsc {

struct Dataset {
  std::vector<SignalTensor> signals;
  std::vector<std::string> names;  // source identifiers, parallel to signals
};

enum class ChannelMode { Separate, Joint };

struct RunConfig {
  SolverConfig solver;
  int filters = 16;  // K
  GridDims support = {11, 11};
  ChannelMode channel_mode = ChannelMode::Separate;

  void validate(const GridDims& dims, int channels) const;
};

// Contrast normalization. Global: per-image mean/std. Local: Gaussian-blurred
// local mean and std (sigma = 3 samples, kernel truncated at 4 sigma,
// circular boundary), the std floored at its own spatial mean. A constant
// input under global mode maps to all zeros and sets *degenerate.
SignalTensor normalize(const SignalTensor& x, NormalizeMode mode, bool* degenerate = nullptr);

struct InitVariables {
  Dictionary dict;
  std::vector<SparseMaps> maps;           // all zeros
  std::vector<CodingDualState> coding;    // zeros (theta, z, lambda)
  LearningDualState learning;             // gamma zeros, mu = 1
};

// z = 0, theta = 0; each filter i.i.d. uniform on [-0.5, 0.5] over its
// support, scaled to unit l2 norm; deterministic given cfg.solver.seed.
InitVariables init_variables(const RunConfig& cfg, const GridDims& dims, int channels,
                             std::size_t image_count);

struct RunResult {
  Dictionary dict;
  std::vector<SparseMaps> maps;
  ConvergenceTrace trace;
  bool converged = false;
  int outer_iters = 0;
  std::vector<std::string> warnings;
};

// Alternates per-image coding solves and the joint learning solve until the
// relative change of the objective and of both variable blocks falls below
// tau, or max_outer. The TCSC path is taken for Joint mode with J > 1.
RunResult run_csc(const RunConfig& cfg, const Dataset& data);

}  // namespace dcsc

#pragma once
// Learning subproblem solved through its dual: a warm-started conjugate
// gradient solve for gamma, closed-form filter recovery, and multiplicative
// ascent on the Lagrange multipliers mu. For multi-channel data the gamma
// systems are independent per channel while the mu ascent couples them
// through the joint filter norms.

#include <functional>

#include "dcsc/spectral.hpp"
#include "dcsc/types.hpp"

namespace dcsc {

struct LearningDualState {
  // one stacked dual vector (N images x D) per channel
  std::vector<std::vector<double>> gamma;
  std::vector<double> mu;  // K multipliers
  long mu_iters_total = 0;
  long cg_iters_total = 0;

  bool initialized() const { return !mu.empty(); }
};

struct LearningStats {
  int mu_iters = 0;
  long cg_iters = 0;       // total across all gamma solves
  long cg_iters_first = 0; // first gamma solve only (shows the outer warm start)
  bool converged = false;
  bool degenerate = false;   // every map zero: zero dictionary returned
  bool mu_clamped = false;   // some multiplier hit the floor
  bool cg_budget_hit = false;
  int rescaled_filters = 0;  // filters pulled back onto the unit ball at exit
  std::vector<int> dead_filters;
};

// Matrix-free application of I + sum_k 1/(2 mu_k) Z_k S_k^T S_k Z_k^T on
// vectors stacked over N images. Built once per learning solve from the map
// spectra; shared by every channel.
class LearningOperator {
 public:
  LearningOperator(std::span<const SparseMaps> zs, GridDims support, double mu_floor);

  // clamps at the floor; query mu_clamped() afterwards
  void set_mu(std::span<const double> mu);

  std::size_t size() const { return images_ * grid_; }  // N*D
  int filters() const { return filters_; }
  int images() const { return static_cast<int>(images_); }
  const GridDims& dims() const { return dims_; }
  const GridDims& support() const { return support_; }
  std::span<const double> mu() const { return mu_; }
  bool mu_clamped() const { return mu_clamped_; }
  bool filter_dead(int k) const { return dead_[k]; }
  const Spectrum& map_spectrum(int image, int k) const { return z_hat_[image][k]; }

  void apply(std::span<const double> v, std::span<double> out) const;

  // sum_n S_k Z_k^(n)T v^(n): the support-cropped correlation for filter k
  std::vector<double> correlation(int k, std::span<const double> v) const;

 private:
  GridDims dims_, support_;
  std::size_t grid_ = 0, images_ = 0;
  int filters_ = 0;
  double mu_floor_;
  std::vector<std::vector<Spectrum>> z_hat_;  // [image][filter]
  std::vector<double> mu_;
  std::vector<char> support_mask_;  // 1 where the grid point lies in the support
  std::vector<char> dead_;
  bool mu_clamped_ = false;
};

struct CgResult {
  int iters = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Warm-started CG on A gamma = -x. gamma holds the warm start on entry and
// the solution on exit. The callback, when set, sees every iterate.
using CgCallback = std::function<void(int, std::span<const double>)>;
CgResult gamma_solve(const LearningOperator& op, std::span<const double> x_stacked,
                     double cg_tol, int cg_max, std::span<double> gamma,
                     const CgCallback& on_iterate = {});

// d_k = -1/(2 mu_k) sum_n S_k Z_k^(n)T gamma^(n) for one channel; returns
// K vectors of support length.
std::vector<std::vector<double>> d_recover(const LearningOperator& op,
                                           std::span<const double> gamma,
                                           std::span<const double> mu);

// mu_k <- max(mu_k ||d_k||, floor)
std::vector<double> mu_update(std::span<const double> mu, std::span<const double> filter_norms,
                              double mu_floor);

// Full learning solve over N images sharing the dictionary. Signals may have
// J > 1 channels (the TCSC path); the returned dictionary has the same J.
Dictionary solve_learning(std::span<const SignalTensor> xs, std::span<const SparseMaps> zs,
                          const GridDims& support, const SolverConfig& cfg,
                          LearningDualState& state, LearningStats* stats = nullptr);
Dictionary solve_learning(std::span<const SignalTensor> xs, std::span<const SparseMaps> zs,
                          const GridDims& support, const SolverConfig& cfg,
                          LearningStats* stats = nullptr);

}  // namespace dcsc

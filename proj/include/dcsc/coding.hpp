#pragma once
// Coding subproblem solved through its dual with ADMM. The dual variable
// lambda lives on the signal grid (size D for one channel, J*D for
// multi-channel data), the split variable theta and the multiplier z live on
// the K map grids; z is exactly the primal sparse map vector. Every linear
// system is solved elementwise in the Fourier domain.

#include <memory>

#include "dcsc/spectral.hpp"
#include "dcsc/types.hpp"

namespace dcsc {

struct CodingDualState {
  std::vector<double> lambda;  // J*D
  std::vector<double> theta;   // K*D
  std::vector<double> z;       // K*D, the primal sparse maps
  // cached spectra, refreshed on solve exit
  std::vector<Spectrum> d_hat;      // K*J, filter-major
  std::vector<Spectrum> theta_hat;  // K
  std::vector<Spectrum> z_hat;      // K

  bool initialized() const { return !z.empty(); }
};

struct CodingStats {
  int admm_iters = 0;
  bool converged = false;
  bool degenerate_dictionary = false;  // all-zero filters; z = 0 returned
  bool dual_rescaled = false;          // lambda scaled onto the feasible set at exit
  double primal_residual = 0.0;        // relative ||theta - D^T lambda||
  double theta_change = 0.0;           // relative theta change at the last iteration
  double z_change = 0.0;               // relative z change at the last iteration
  double dual_objective = 0.0;         // -1/2 ||lambda||^2 - <lambda, x>
  double dual_infeasibility = 0.0;     // max(0, ||D^T lambda||_inf - beta) before rescale
};

// Relative stopping tolerance of the inner ADMM loop; the configured
// threshold tau only governs the outer coordinate-descent loop.
inline constexpr double kAdmmRelTol = 1e-4;

// lambda_hat(w) = [sum_k |d_hat_k(w)|^2 + 1/rho]^-1
//                 [sum_k d_hat_k(w) (theta_hat_k(w) + z_hat_k(w)/rho) - x_hat(w)/rho]
Spectrum lambda_update_spectrum(std::span<const Spectrum> d_hat,
                                std::span<const Spectrum> theta_hat,
                                std::span<const Spectrum> z_hat, const Spectrum& x_hat,
                                double rho);

// Spatial-domain lambda update; asserts the imaginary residue is small.
std::vector<double> lambda_update(std::span<const Spectrum> d_hat,
                                  std::span<const Spectrum> theta_hat,
                                  std::span<const Spectrum> z_hat, const Spectrum& x_hat,
                                  double rho);

// D^T lambda: circular correlation of lambda with every filter, K*D spatial.
std::vector<double> apply_dictionary_adjoint(std::span<const Spectrum> d_hat,
                                             const Spectrum& lambda_hat);

// D z = sum_k d_k * z_k from spectra, D spatial values.
std::vector<double> apply_dictionary(std::span<const Spectrum> d_hat,
                                     std::span<const Spectrum> z_hat);

// theta = clamp(D^T lambda - z/rho) onto the l-infinity ball of radius beta.
std::vector<double> theta_update(std::span<const double> dt_lambda,
                                 std::span<const double> z, double rho, double beta);

// z <- z + rho (theta - D^T lambda), exactly as written.
void z_update(std::span<double> z, std::span<const double> theta,
              std::span<const double> dt_lambda, double rho);

// Full ADMM solve of the coding subproblem for one single-channel signal.
// The state carries warm starts across outer iterations.
SparseMaps solve_coding(const SignalTensor& x, const Dictionary& d, const SolverConfig& cfg,
                        CodingDualState& state, CodingStats* stats = nullptr);
SparseMaps solve_coding(const SignalTensor& x, const Dictionary& d, const SolverConfig& cfg,
                        CodingStats* stats = nullptr);

namespace detail {

// Frequency-domain lambda solver shared by the scalar (J = 1) and blocked
// (J > 1) coding paths. Implementations hold the filter spectra and x_hat.
class CodingKernel {
 public:
  virtual ~CodingKernel() = default;

  GridDims dims;
  int channels = 1;  // J
  int filters = 0;   // K

  // w_hat_k = theta_hat_k + z_hat_k / rho, assembled by the driver
  virtual void solve_lambda(std::span<const Spectrum> w_hat,
                            std::vector<Spectrum>& lambda_hat) const = 0;
  // t_hat_k = sum_j conj(d_hat_{j,k}) lambda_hat_j
  virtual void correlate(std::span<const Spectrum> lambda_hat,
                         std::vector<Spectrum>& t_hat) const = 0;
  virtual const Spectrum& filter_hat(int k, int j) const = 0;
  virtual std::span<const double> signal() const = 0;  // spatial x, J*D
  virtual bool zero_dictionary() const = 0;
};

// Shared Eq. 9 iteration loop; used by both solve_coding and the TCSC path.
SparseMaps admm_coding(const CodingKernel& kernel, const SolverConfig& cfg,
                       CodingDualState& state, CodingStats& stats);

}  // namespace detail

}  // namespace dcsc

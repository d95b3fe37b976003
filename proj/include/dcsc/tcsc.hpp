#pragma once
// Higher-order tensor CSC: the coding normal matrix of the block-circulant
// unfolded dictionary is block-diagonal in frequency, so the lambda update
// becomes D independent JxJ solves (or KxK through the Woodbury identity
// when K < J). Learning runs per channel with a joint multiplier ascent.

#include "dcsc/coding.hpp"
#include "dcsc/learning.hpp"
#include "dcsc/spectral.hpp"
#include "dcsc/types.hpp"

namespace dcsc {

struct BlockSpectrumDictionary {
  GridDims dims;
  int channels = 1;  // J
  int filters = 0;   // K

  // spectra[j][k] = forward_dft(pad_filter(d_{j,k}))
  std::vector<std::vector<Spectrum>> spectra;

  // the JxK block at one frequency bin, row-major
  std::vector<std::complex<double>> block(std::size_t bin) const;
};

BlockSpectrumDictionary build_block_spectra(const Dictionary& d, const GridDims& dims);

enum class BlockSolveMethod { Auto, Direct, Woodbury };

// Per-frequency solve of (D_hat(w) D_hat(w)^H + I/rho) lambda_hat(w) = r_hat(w)
// with r_hat_j(w) = sum_k d_hat_{j,k}(w) (theta_hat_k + z_hat_k/rho)(w) - x_hat_j(w)/rho.
// Auto picks Woodbury when K < J and the direct JxJ factorization otherwise.
std::vector<Spectrum> lambda_update_blocked_spectrum(
    const BlockSpectrumDictionary& B, std::span<const Spectrum> theta_hat,
    std::span<const Spectrum> z_hat, std::span<const Spectrum> x_hat, double rho,
    BlockSolveMethod method = BlockSolveMethod::Auto);

// Spatial variant, length J*D (channel blocks stacked).
std::vector<double> lambda_update_blocked(const BlockSpectrumDictionary& B,
                                          std::span<const Spectrum> theta_hat,
                                          std::span<const Spectrum> z_hat,
                                          std::span<const Spectrum> x_hat, double rho,
                                          BlockSolveMethod method = BlockSolveMethod::Auto);

// (D^T lambda)_k = sum_j correlation of lambda_j with d_{j,k}; K*D spatial.
std::vector<double> block_dictionary_adjoint(const BlockSpectrumDictionary& B,
                                             std::span<const Spectrum> lambda_hat);

// ADMM coding over a J-channel signal with maps shared across channels.
// Block factorizations are computed once per solve and reused.
SparseMaps solve_coding_tcsc(const SignalTensor& x, const Dictionary& d,
                             const SolverConfig& cfg, CodingDualState& state,
                             CodingStats* stats = nullptr,
                             BlockSolveMethod method = BlockSolveMethod::Auto);
SparseMaps solve_coding_tcsc(const SignalTensor& x, const Dictionary& d,
                             const SolverConfig& cfg, CodingStats* stats = nullptr,
                             BlockSolveMethod method = BlockSolveMethod::Auto);

// Learning over J-channel images with shared maps: per-channel gamma systems
// under a multiplier ascent coupled through the joint filter norms.
Dictionary solve_learning_tcsc(std::span<const SignalTensor> xs,
                               std::span<const SparseMaps> zs, const GridDims& support,
                               const SolverConfig& cfg, LearningDualState& state,
                               LearningStats* stats = nullptr);
Dictionary solve_learning_tcsc(std::span<const SignalTensor> xs,
                               std::span<const SparseMaps> zs, const GridDims& support,
                               const SolverConfig& cfg, LearningStats* stats = nullptr);

}  // namespace dcsc

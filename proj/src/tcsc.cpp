#include "dcsc/tcsc.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>

#include "dcsc/parallel.hpp"

namespace dcsc {

namespace {

using ComplexMat = Eigen::MatrixXcd;
using ComplexVec = Eigen::VectorXcd;

ComplexMat assemble_block(const BlockSpectrumDictionary& B, std::size_t bin) {
  ComplexMat Dw(B.channels, B.filters);
  for (int j = 0; j < B.channels; ++j)
    for (int k = 0; k < B.filters; ++k) Dw(j, k) = B.spectra[j][k].values[bin];
  return Dw;
}

// Per-bin factorizations of (D_hat D_hat^H + I/rho). The Woodbury route
// factors I_K + rho D_hat^H D_hat instead and solves a KxK system.
struct BlockFactors {
  bool woodbury = false;
  double rho = 0.0;
  std::vector<Eigen::LLT<ComplexMat>> llt;
};

BlockFactors factor_blocks(const BlockSpectrumDictionary& B, double rho,
                           BlockSolveMethod method) {
  BlockFactors f;
  f.rho = rho;
  f.woodbury = method == BlockSolveMethod::Woodbury ||
               (method == BlockSolveMethod::Auto && B.filters < B.channels);
  const std::size_t bins = grid_count(B.dims);
  f.llt.resize(bins);
  const std::int64_t block_work = static_cast<std::int64_t>(B.channels) * B.channels * B.filters;
  par::parallel_for_grain(static_cast<std::int64_t>(bins), block_work, [&](std::int64_t w) {
    const ComplexMat Dw = assemble_block(B, static_cast<std::size_t>(w));
    if (f.woodbury) {
      ComplexMat C = ComplexMat::Identity(B.filters, B.filters) + rho * (Dw.adjoint() * Dw);
      f.llt[w].compute(C);
    } else {
      ComplexMat G = Dw * Dw.adjoint();
      G.diagonal().array() += 1.0 / rho;
      f.llt[w].compute(G);
    }
  });
  return f;
}

void solve_bin(const BlockSpectrumDictionary& B, const BlockFactors& f, std::size_t bin,
               const ComplexVec& r, ComplexVec& lambda) {
  if (f.woodbury) {
    const ComplexMat Dw = assemble_block(B, bin);
    const ComplexVec u = f.llt[bin].solve(Dw.adjoint() * r);
    lambda = f.rho * r - (f.rho * f.rho) * (Dw * u);
  } else {
    lambda = f.llt[bin].solve(r);
  }
}

// lambda_hat from the blocked per-frequency systems; w_hat_k = theta_hat_k + z_hat_k/rho.
void blocked_lambda_solve(const BlockSpectrumDictionary& B, const BlockFactors& f,
                          std::span<const Spectrum> w_hat, std::span<const Spectrum> x_hat,
                          double rho, std::vector<Spectrum>& lambda_hat) {
  const std::size_t bins = grid_count(B.dims);
  const double inv_rho = 1.0 / rho;
  const std::int64_t block_work = static_cast<std::int64_t>(B.channels) * B.channels * B.filters;
  par::parallel_for_grain(static_cast<std::int64_t>(bins), block_work, [&](std::int64_t w) {
    thread_local ComplexVec r, lam;
    r.resize(B.channels);
    for (int j = 0; j < B.channels; ++j) {
      std::complex<double> acc{0.0, 0.0};
      for (int k = 0; k < B.filters; ++k)
        acc += B.spectra[j][k].values[w] * w_hat[k].values[w];
      r[j] = acc - x_hat[j].values[w] * inv_rho;
    }
    solve_bin(B, f, static_cast<std::size_t>(w), r, lam);
    for (int j = 0; j < B.channels; ++j) lambda_hat[j].values[w] = lam[j];
  });
}

void blocked_correlate(const BlockSpectrumDictionary& B, std::span<const Spectrum> lambda_hat,
                       std::vector<Spectrum>& t_hat) {
  const std::size_t bins = grid_count(B.dims);
  par::parallel_for_grain(B.filters, static_cast<std::int64_t>(bins) * B.channels,
                          [&](std::int64_t k) {
    for (std::size_t i = 0; i < bins; ++i) {
      std::complex<double> acc{0.0, 0.0};
      for (int j = 0; j < B.channels; ++j)
        acc += std::conj(B.spectra[j][k].values[i]) * lambda_hat[j].values[i];
      t_hat[k].values[i] = acc;
    }
  });
}

class BlockKernel final : public detail::CodingKernel {
 public:
  BlockKernel(const SignalTensor& x, const Dictionary& d, double rho, BlockSolveMethod method)
      : rho_(rho), x_(&x) {
    dims = x.dims;
    channels = d.channels;
    filters = d.filters;
    B_ = build_block_spectra(d, dims);
    factors_ = factor_blocks(B_, rho, method);
    x_hat_.resize(channels);
    par::parallel_for_grain(channels, static_cast<std::int64_t>(grid_count(dims)),
                            [&](std::int64_t j) {
      x_hat_[j] = forward_dft(dims, x_->channel(static_cast<int>(j)));
    });
    zero_dict_ = true;
    for (double v : d.values)
      if (v != 0.0) {
        zero_dict_ = false;
        break;
      }
  }

  void solve_lambda(std::span<const Spectrum> w_hat,
                    std::vector<Spectrum>& lambda_hat) const override {
    blocked_lambda_solve(B_, factors_, w_hat, x_hat_, rho_, lambda_hat);
  }

  void correlate(std::span<const Spectrum> lambda_hat,
                 std::vector<Spectrum>& t_hat) const override {
    blocked_correlate(B_, lambda_hat, t_hat);
  }

  const Spectrum& filter_hat(int k, int j) const override { return B_.spectra[j][k]; }
  std::span<const double> signal() const override { return x_->values; }
  bool zero_dictionary() const override { return zero_dict_; }

 private:
  double rho_;
  const SignalTensor* x_;
  BlockSpectrumDictionary B_;
  BlockFactors factors_;
  std::vector<Spectrum> x_hat_;
  bool zero_dict_ = false;
};

void check_finite_spectra(std::span<const Spectrum> spectra, const char* what) {
  for (const Spectrum& s : spectra)
    for (const auto& v : s.values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NumericError(std::string(what) + ": non-finite spectrum");
}

}  // namespace

std::vector<std::complex<double>> BlockSpectrumDictionary::block(std::size_t bin) const {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(channels) * filters);
  for (int j = 0; j < channels; ++j)
    for (int k = 0; k < filters; ++k)
      out[static_cast<std::size_t>(j) * filters + k] = spectra[j][k].values[bin];
  return out;
}

BlockSpectrumDictionary build_block_spectra(const Dictionary& d, const GridDims& dims) {
  d.validate();
  BlockSpectrumDictionary B;
  B.dims = dims;
  B.channels = d.channels;
  B.filters = d.filters;
  B.spectra.resize(d.channels);
  for (int j = 0; j < d.channels; ++j) B.spectra[j].resize(d.filters);
  par::parallel_for_grain(static_cast<std::int64_t>(d.channels) * d.filters,
                          static_cast<std::int64_t>(grid_count(dims)), [&](std::int64_t i) {
    const int j = static_cast<int>(i / d.filters);
    const int k = static_cast<int>(i % d.filters);
    B.spectra[j][k] = filter_spectrum(d, k, j, dims);
  });
  return B;
}

std::vector<Spectrum> lambda_update_blocked_spectrum(const BlockSpectrumDictionary& B,
                                                     std::span<const Spectrum> theta_hat,
                                                     std::span<const Spectrum> z_hat,
                                                     std::span<const Spectrum> x_hat,
                                                     double rho, BlockSolveMethod method) {
  if (theta_hat.size() != static_cast<std::size_t>(B.filters) ||
      z_hat.size() != static_cast<std::size_t>(B.filters))
    throw DimensionError("lambda_update_blocked: theta/z spectrum counts must equal K");
  if (x_hat.size() != static_cast<std::size_t>(B.channels))
    throw DimensionError("lambda_update_blocked: x spectrum count must equal J");
  check_finite_spectra(theta_hat, "lambda_update_blocked");
  check_finite_spectra(z_hat, "lambda_update_blocked");
  check_finite_spectra(x_hat, "lambda_update_blocked");

  const double inv_rho = 1.0 / rho;
  std::vector<Spectrum> w_hat(B.filters);
  for (int k = 0; k < B.filters; ++k) {
    w_hat[k] = Spectrum(B.dims);
    for (std::size_t i = 0; i < w_hat[k].size(); ++i)
      w_hat[k].values[i] = theta_hat[k].values[i] + z_hat[k].values[i] * inv_rho;
  }
  std::vector<Spectrum> lambda_hat(B.channels);
  for (int j = 0; j < B.channels; ++j) lambda_hat[j] = Spectrum(B.dims);

  const BlockFactors factors = factor_blocks(B, rho, method);
  blocked_lambda_solve(B, factors, w_hat, x_hat, rho, lambda_hat);
  return lambda_hat;
}

std::vector<double> lambda_update_blocked(const BlockSpectrumDictionary& B,
                                          std::span<const Spectrum> theta_hat,
                                          std::span<const Spectrum> z_hat,
                                          std::span<const Spectrum> x_hat, double rho,
                                          BlockSolveMethod method) {
  const auto lambda_hat =
      lambda_update_blocked_spectrum(B, theta_hat, z_hat, x_hat, rho, method);
  const std::size_t d = grid_count(B.dims);
  std::vector<double> out(static_cast<std::size_t>(B.channels) * d);
  for (int j = 0; j < B.channels; ++j)
    inverse_dft(lambda_hat[j], std::span<double>(out.data() + static_cast<std::size_t>(j) * d, d));
  return out;
}

std::vector<double> block_dictionary_adjoint(const BlockSpectrumDictionary& B,
                                             std::span<const Spectrum> lambda_hat) {
  if (lambda_hat.size() != static_cast<std::size_t>(B.channels))
    throw DimensionError("block_dictionary_adjoint: lambda spectrum count must equal J");
  std::vector<Spectrum> t_hat(B.filters);
  for (int k = 0; k < B.filters; ++k) t_hat[k] = Spectrum(B.dims);
  blocked_correlate(B, lambda_hat, t_hat);
  const std::size_t d = grid_count(B.dims);
  std::vector<double> out(static_cast<std::size_t>(B.filters) * d);
  for (int k = 0; k < B.filters; ++k)
    inverse_dft(t_hat[k], std::span<double>(out.data() + static_cast<std::size_t>(k) * d, d));
  return out;
}

SparseMaps solve_coding_tcsc(const SignalTensor& x, const Dictionary& d,
                             const SolverConfig& cfg, CodingDualState& state,
                             CodingStats* stats, BlockSolveMethod method) {
  cfg.validate();
  x.validate();
  d.validate();
  if (x.channels != d.channels)
    throw DimensionError("solve_coding_tcsc: signal and dictionary channel counts differ");
  for (std::size_t a = 0; a < x.dims.size(); ++a)
    if (a >= d.support.size() || d.support[a] > x.dims[a])
      throw DimensionError("filter support larger than the signal grid");

  BlockKernel kernel(x, d, cfg.rho, method);
  CodingStats local;
  SparseMaps maps = detail::admm_coding(kernel, cfg, state, local);
  if (stats) *stats = local;
  return maps;
}

SparseMaps solve_coding_tcsc(const SignalTensor& x, const Dictionary& d,
                             const SolverConfig& cfg, CodingStats* stats,
                             BlockSolveMethod method) {
  CodingDualState state;
  return solve_coding_tcsc(x, d, cfg, state, stats, method);
}

Dictionary solve_learning_tcsc(std::span<const SignalTensor> xs,
                               std::span<const SparseMaps> zs, const GridDims& support,
                               const SolverConfig& cfg, LearningDualState& state,
                               LearningStats* stats) {
  // the gamma systems separate per channel; solve_learning runs them under
  // one mu ascent coupled through the joint filter norms
  return solve_learning(xs, zs, support, cfg, state, stats);
}

Dictionary solve_learning_tcsc(std::span<const SignalTensor> xs,
                               std::span<const SparseMaps> zs, const GridDims& support,
                               const SolverConfig& cfg, LearningStats* stats) {
  LearningDualState state;
  return solve_learning_tcsc(xs, zs, support, cfg, state, stats);
}

}  // namespace dcsc

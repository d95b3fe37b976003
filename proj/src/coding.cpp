#include "dcsc/coding.hpp"

#include <algorithm>
#include <cmath>

#include "dcsc/parallel.hpp"

namespace dcsc {

namespace {

double clamp_sym(double v, double bound) { return std::clamp(v, -bound, bound); }

// sigma(w) = sum_k |d_hat_k(w)|^2 + 1/rho
std::vector<double> scalar_sigma(std::span<const Spectrum> d_hat, double rho) {
  const std::size_t n = d_hat.front().size();
  std::vector<double> sigma(n, 1.0 / rho);
  for (const Spectrum& dk : d_hat)
    for (std::size_t i = 0; i < n; ++i) sigma[i] += std::norm(dk.values[i]);
  return sigma;
}

// lambda_hat = sigma^-1 (sum_k d_hat_k w_hat_k - x_hat/rho) with
// w_hat_k = theta_hat_k + z_hat_k/rho assembled by the caller.
void lambda_from_w(std::span<const Spectrum> d_hat, std::span<const double> sigma,
                   std::span<const Spectrum> w_hat, const Spectrum& x_hat, double rho,
                   Spectrum& out) {
  const std::size_t n = x_hat.size();
  const double inv_rho = 1.0 / rho;
  par::parallel_for_grain(static_cast<std::int64_t>(n),
                          static_cast<std::int64_t>(d_hat.size()), [&](std::int64_t i) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < d_hat.size(); ++k)
      acc += d_hat[k].values[i] * w_hat[k].values[i];
    out.values[i] = (acc - x_hat.values[i] * inv_rho) / sigma[i];
  });
}

std::vector<Spectrum> assemble_w(std::span<const Spectrum> theta_hat,
                                 std::span<const Spectrum> z_hat, double rho) {
  const double inv_rho = 1.0 / rho;
  std::vector<Spectrum> w(theta_hat.size());
  for (std::size_t k = 0; k < theta_hat.size(); ++k) {
    w[k] = Spectrum(theta_hat[k].dims);
    for (std::size_t i = 0; i < w[k].size(); ++i)
      w[k].values[i] = theta_hat[k].values[i] + z_hat[k].values[i] * inv_rho;
  }
  return w;
}

class ScalarKernel final : public detail::CodingKernel {
 public:
  ScalarKernel(const SignalTensor& x, const Dictionary& d, double rho) : rho_(rho), x_(&x) {
    dims = x.dims;
    channels = 1;
    filters = d.filters;
    d_hat_.resize(filters);
    const auto d_count = static_cast<std::int64_t>(grid_count(dims));
    par::parallel_for_grain(filters, d_count, [&](std::int64_t k) {
      d_hat_[k] = filter_spectrum(d, static_cast<int>(k), 0, dims);
    });
    sigma_ = scalar_sigma(d_hat_, rho);
    zero_dict_ = true;
    for (double v : d.values)
      if (v != 0.0) {
        zero_dict_ = false;
        break;
      }
    x_hat_ = forward_dft(dims, x.channel(0));
  }

  void solve_lambda(std::span<const Spectrum> w_hat,
                    std::vector<Spectrum>& lambda_hat) const override {
    lambda_from_w(d_hat_, sigma_, w_hat, x_hat_, rho_, lambda_hat.front());
  }

  void correlate(std::span<const Spectrum> lambda_hat,
                 std::vector<Spectrum>& t_hat) const override {
    const Spectrum& lam = lambda_hat.front();
    par::parallel_for_grain(filters, static_cast<std::int64_t>(lam.size()),
                            [&](std::int64_t k) {
      const Spectrum& dk = d_hat_[k];
      for (std::size_t i = 0; i < lam.size(); ++i)
        t_hat[k].values[i] = std::conj(dk.values[i]) * lam.values[i];
    });
  }

  const Spectrum& filter_hat(int k, int) const override { return d_hat_[k]; }
  std::span<const double> signal() const override { return x_->values; }
  bool zero_dictionary() const override { return zero_dict_; }

 private:
  double rho_;
  const SignalTensor* x_;
  std::vector<Spectrum> d_hat_;
  std::vector<double> sigma_;
  Spectrum x_hat_;
  bool zero_dict_ = false;
};

}  // namespace

Spectrum lambda_update_spectrum(std::span<const Spectrum> d_hat,
                                std::span<const Spectrum> theta_hat,
                                std::span<const Spectrum> z_hat, const Spectrum& x_hat,
                                double rho) {
  if (d_hat.empty() || d_hat.size() != theta_hat.size() || d_hat.size() != z_hat.size())
    throw DimensionError("lambda_update: filter/theta/z spectrum counts differ");
  for (const Spectrum& s : d_hat)
    for (const auto& v : s.values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NumericError("lambda_update: non-finite filter spectrum");
  Spectrum out(x_hat.dims);
  lambda_from_w(d_hat, scalar_sigma(d_hat, rho), assemble_w(theta_hat, z_hat, rho), x_hat,
                rho, out);
  return out;
}

std::vector<double> lambda_update(std::span<const Spectrum> d_hat,
                                  std::span<const Spectrum> theta_hat,
                                  std::span<const Spectrum> z_hat, const Spectrum& x_hat,
                                  double rho) {
  return inverse_dft(lambda_update_spectrum(d_hat, theta_hat, z_hat, x_hat, rho));
}

std::vector<double> apply_dictionary_adjoint(std::span<const Spectrum> d_hat,
                                             const Spectrum& lambda_hat) {
  const std::size_t n = lambda_hat.size();
  std::vector<double> out(d_hat.size() * n);
  for (std::size_t k = 0; k < d_hat.size(); ++k) {
    const auto t = inverse_dft(circulant_apply_adjoint(d_hat[k], lambda_hat));
    std::copy(t.begin(), t.end(), out.begin() + static_cast<std::ptrdiff_t>(k * n));
  }
  return out;
}

std::vector<double> apply_dictionary(std::span<const Spectrum> d_hat,
                                     std::span<const Spectrum> z_hat) {
  if (d_hat.size() != z_hat.size()) throw DimensionError("apply_dictionary: K mismatch");
  Spectrum acc(d_hat.front().dims);
  for (std::size_t k = 0; k < d_hat.size(); ++k)
    for (std::size_t i = 0; i < acc.size(); ++i)
      acc.values[i] += d_hat[k].values[i] * z_hat[k].values[i];
  return inverse_dft(acc);
}

std::vector<double> theta_update(std::span<const double> dt_lambda,
                                 std::span<const double> z, double rho, double beta) {
  if (dt_lambda.size() != z.size()) throw DimensionError("theta_update: length mismatch");
  std::vector<double> theta(z.size());
  const double inv_rho = 1.0 / rho;
  for (std::size_t i = 0; i < z.size(); ++i)
    theta[i] = clamp_sym(dt_lambda[i] - z[i] * inv_rho, beta);
  return theta;
}

void z_update(std::span<double> z, std::span<const double> theta,
              std::span<const double> dt_lambda, double rho) {
  if (z.size() != theta.size() || z.size() != dt_lambda.size())
    throw DimensionError("z_update: length mismatch");
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += rho * (theta[i] - dt_lambda[i]);
}

namespace detail {

SparseMaps admm_coding(const CodingKernel& kernel, const SolverConfig& cfg,
                       CodingDualState& state, CodingStats& stats) {
  const std::size_t d_count = grid_count(kernel.dims);
  const std::size_t kd = static_cast<std::size_t>(kernel.filters) * d_count;
  const std::size_t jd = static_cast<std::size_t>(kernel.channels) * d_count;
  const int k_filters = kernel.filters;
  const double rho = cfg.rho;
  const double beta = cfg.beta;

  if (state.z.size() != kd) {
    state.z.assign(kd, 0.0);
    state.theta.assign(kd, 0.0);
  }
  if (state.lambda.size() != jd) state.lambda.assign(jd, 0.0);

  stats = CodingStats{};
  stats.degenerate_dictionary = kernel.zero_dictionary();
  if (stats.degenerate_dictionary) {
    // D^T lambda = 0 is always feasible; the unconstrained minimizer of the
    // dual quadratic is lambda = -x, and z stays at zero.
    std::fill(state.z.begin(), state.z.end(), 0.0);
    std::fill(state.theta.begin(), state.theta.end(), 0.0);
    const auto x = kernel.signal();
    for (std::size_t i = 0; i < jd; ++i) state.lambda[i] = -x[i];
    stats.converged = true;
  }

  // Working spectra; the state caches are refreshed from these at exit.
  std::vector<Spectrum> theta_hat(k_filters), z_hat(k_filters), w_hat(k_filters),
      t_hat(k_filters);
  std::vector<Spectrum> lambda_hat(kernel.channels);
  for (int k = 0; k < k_filters; ++k) {
    theta_hat[k] = Spectrum(kernel.dims);
    z_hat[k] = Spectrum(kernel.dims);
    w_hat[k] = Spectrum(kernel.dims);
    t_hat[k] = Spectrum(kernel.dims);
  }
  for (int j = 0; j < kernel.channels; ++j) lambda_hat[j] = Spectrum(kernel.dims);

  std::vector<double> t_spatial(kd, 0.0);
  // per-filter partial sums, reduced serially for thread-count independence
  std::vector<double> p_theta_t(k_filters), p_theta(k_filters), p_t(k_filters),
      p_dz(k_filters), p_z(k_filters), p_dtheta(k_filters), p_tinf(k_filters);

  auto span_of = [d_count](std::vector<double>& v, int k) {
    return std::span<double>(v.data() + static_cast<std::size_t>(k) * d_count, d_count);
  };

  const auto grain = static_cast<std::int64_t>(d_count);
  if (!stats.degenerate_dictionary) {
    par::parallel_for_grain(k_filters, grain, [&](std::int64_t k) {
      forward_dft(kernel.dims, span_of(state.theta, static_cast<int>(k)),
                  theta_hat[k].values);
      forward_dft(kernel.dims, span_of(state.z, static_cast<int>(k)), z_hat[k].values);
    });

    const double inv_rho = 1.0 / rho;
    for (int iter = 1; iter <= cfg.max_admm; ++iter) {
      par::parallel_for_grain(k_filters, grain, [&](std::int64_t k) {
        for (std::size_t i = 0; i < d_count; ++i)
          w_hat[k].values[i] = theta_hat[k].values[i] + z_hat[k].values[i] * inv_rho;
      });

      kernel.solve_lambda(w_hat, lambda_hat);
      kernel.correlate(lambda_hat, t_hat);

      par::parallel_for_grain(k_filters, grain, [&](std::int64_t k) {
        auto t_k = span_of(t_spatial, static_cast<int>(k));
        inverse_dft(t_hat[k], t_k);
        auto theta_k = span_of(state.theta, static_cast<int>(k));
        auto z_k = span_of(state.z, static_cast<int>(k));
        double s_tt = 0, s_theta = 0, s_t = 0, s_dz = 0, s_z = 0, s_dtheta = 0, s_inf = 0;
        for (std::size_t i = 0; i < d_count; ++i) {
          const double t_i = t_k[i];
          const double theta_new = clamp_sym(t_i - z_k[i] * inv_rho, beta);
          const double dtheta = theta_new - theta_k[i];
          theta_k[i] = theta_new;
          const double dz = rho * (theta_new - t_i);
          z_k[i] += dz;
          s_tt += (theta_new - t_i) * (theta_new - t_i);
          s_theta += theta_new * theta_new;
          s_t += t_i * t_i;
          s_dz += dz * dz;
          s_z += z_k[i] * z_k[i];
          s_dtheta += dtheta * dtheta;
          s_inf = std::max(s_inf, std::abs(t_i));
        }
        p_theta_t[k] = s_tt;
        p_theta[k] = s_theta;
        p_t[k] = s_t;
        p_dz[k] = s_dz;
        p_z[k] = s_z;
        p_dtheta[k] = s_dtheta;
        p_tinf[k] = s_inf;
        forward_dft(kernel.dims, theta_k, theta_hat[k].values);
        forward_dft(kernel.dims, z_k, z_hat[k].values);
      });

      double tt = 0, th = 0, t2 = 0, dz2 = 0, z2 = 0, dth = 0;
      for (int k = 0; k < k_filters; ++k) {
        tt += p_theta_t[k];
        th += p_theta[k];
        t2 += p_t[k];
        dz2 += p_dz[k];
        z2 += p_z[k];
        dth += p_dtheta[k];
      }
      const double denom = std::max({std::sqrt(th), std::sqrt(t2), 1.0});
      stats.primal_residual = std::sqrt(tt) / denom;
      stats.z_change = std::sqrt(dz2) / std::max(std::sqrt(z2), 1.0);
      stats.theta_change = std::sqrt(dth) / std::max(std::sqrt(th), 1.0);
      stats.admm_iters = iter;

      if (stats.primal_residual <= kAdmmRelTol && stats.z_change <= kAdmmRelTol &&
          stats.theta_change <= kAdmmRelTol) {
        stats.converged = true;
        break;
      }
    }

    // spatial lambda for the dual objective and warm starts
    std::size_t off = 0;
    for (int j = 0; j < kernel.channels; ++j, off += d_count)
      inverse_dft(lambda_hat[j], std::span<double>(state.lambda.data() + off, d_count));

    // Exit feasibility: project lambda onto ||D^T lambda||_inf <= beta by
    // scaling; near convergence the factor is 1 + O(residual).
    double t_inf = 0.0;
    for (int k = 0; k < k_filters; ++k) t_inf = std::max(t_inf, p_tinf[k]);
    stats.dual_infeasibility = std::max(0.0, t_inf - beta);
    if (t_inf > beta) {
      const double scale = beta / t_inf;
      for (double& v : state.lambda) v *= scale;
      stats.dual_rescaled = true;
    }
  }

  const auto x = kernel.signal();
  double lam_sq = 0.0, lam_x = 0.0;
  for (std::size_t i = 0; i < jd; ++i) {
    lam_sq += state.lambda[i] * state.lambda[i];
    lam_x += state.lambda[i] * x[i];
  }
  stats.dual_objective = -0.5 * lam_sq - lam_x;

  // refresh the state caches so spatial values and spectra stay consistent
  state.d_hat.resize(static_cast<std::size_t>(k_filters) * kernel.channels);
  state.theta_hat.resize(k_filters);
  state.z_hat.resize(k_filters);
  par::parallel_for_grain(k_filters, grain, [&](std::int64_t k) {
    for (int j = 0; j < kernel.channels; ++j)
      state.d_hat[static_cast<std::size_t>(k) * kernel.channels + j] =
          kernel.filter_hat(static_cast<int>(k), j);
    state.theta_hat[k] = Spectrum(kernel.dims);
    state.z_hat[k] = Spectrum(kernel.dims);
    forward_dft(kernel.dims, span_of(state.theta, static_cast<int>(k)),
                state.theta_hat[k].values);
    forward_dft(kernel.dims, span_of(state.z, static_cast<int>(k)), state.z_hat[k].values);
  });

  SparseMaps maps(k_filters, kernel.dims);
  maps.values = state.z;
  return maps;
}

}  // namespace detail

SparseMaps solve_coding(const SignalTensor& x, const Dictionary& d, const SolverConfig& cfg,
                        CodingDualState& state, CodingStats* stats) {
  cfg.validate();
  x.validate();
  d.validate();
  if (x.channels != 1)
    throw DimensionError("solve_coding expects a single-channel signal; use the TCSC path");
  if (d.channels != 1) throw DimensionError("solve_coding expects a single-channel dictionary");
  for (std::size_t a = 0; a < x.dims.size(); ++a)
    if (a >= d.support.size() || d.support[a] > x.dims[a])
      throw DimensionError("filter support larger than the signal grid");

  ScalarKernel kernel(x, d, cfg.rho);
  CodingStats local;
  SparseMaps maps = detail::admm_coding(kernel, cfg, state, local);
  if (stats) *stats = local;
  return maps;
}

SparseMaps solve_coding(const SignalTensor& x, const Dictionary& d, const SolverConfig& cfg,
                        CodingStats* stats) {
  CodingDualState state;
  return solve_coding(x, d, cfg, state, stats);
}

}  // namespace dcsc

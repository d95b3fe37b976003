#include "dcsc/learning.hpp"

#include <algorithm>
#include <cmath>

#include "dcsc/grid.hpp"
#include "dcsc/parallel.hpp"

namespace dcsc {

namespace {

// filter norms within |.| - 1 of this settle the mu ascent
constexpr double kFilterNormTol = 1e-3;

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

LearningOperator::LearningOperator(std::span<const SparseMaps> zs, GridDims support,
                                   double mu_floor)
    : support_(std::move(support)), mu_floor_(mu_floor) {
  if (zs.empty()) throw DimensionError("learning operator needs at least one image");
  dims_ = zs.front().dims;
  filters_ = zs.front().maps;
  grid_ = grid_count(dims_);
  images_ = zs.size();
  if (support_.size() != dims_.size())
    throw DimensionError("filter support and grid rank differ");
  for (std::size_t a = 0; a < dims_.size(); ++a)
    if (support_[a] > dims_[a]) throw DimensionError("filter support larger than grid");

  for (const SparseMaps& z : zs)
    if (z.maps != filters_ || z.dims != dims_)
      throw DimensionError("sparse maps are inconsistent across images");

  z_hat_.resize(images_);
  for (std::size_t n = 0; n < images_; ++n) z_hat_[n].resize(filters_);
  par::parallel_for_grain(static_cast<std::int64_t>(images_) * filters_,
                          static_cast<std::int64_t>(grid_), [&](std::int64_t i) {
    const std::size_t n = static_cast<std::size_t>(i) / filters_;
    const int k = static_cast<int>(i % filters_);
    z_hat_[n][k] = forward_dft(dims_, zs[n].map(k));
  });

  dead_.assign(filters_, 1);
  for (int k = 0; k < filters_; ++k)
    for (std::size_t n = 0; n < images_ && dead_[k]; ++n)
      for (double v : zs[n].map(k))
        if (v != 0.0) {
          dead_[k] = 0;
          break;
        }

  support_mask_.assign(grid_, 0);
  std::vector<int> coords(support_.size(), 0);
  for (std::size_t i = 0; i < grid_count(support_); ++i) {
    unflatten(support_, i, coords);
    support_mask_[flatten(dims_, coords)] = 1;
  }

  mu_.assign(filters_, 1.0);
}

void LearningOperator::set_mu(std::span<const double> mu) {
  if (mu.size() != static_cast<std::size_t>(filters_))
    throw DimensionError("mu length does not match the filter count");
  mu_clamped_ = false;
  for (int k = 0; k < filters_; ++k) {
    double m = mu[k];
    if (m < mu_floor_) {
      m = mu_floor_;
      mu_clamped_ = true;
    }
    mu_[k] = m;
  }
}

void LearningOperator::apply(std::span<const double> v, std::span<double> out) const {
  if (v.size() != size() || out.size() != size())
    throw DimensionError("learning operator: vector length must be N*D");

  const auto grain = static_cast<std::int64_t>(grid_);
  std::vector<Spectrum> v_hat(images_);
  par::parallel_for_grain(static_cast<std::int64_t>(images_), grain, [&](std::int64_t n) {
    v_hat[n] = forward_dft(dims_, v.subspan(static_cast<std::size_t>(n) * grid_, grid_));
  });

  // p_hat_k = spectrum of the support-masked correlation sum_n conj(z_nk) v_n
  std::vector<Spectrum> p_hat(filters_);
  par::parallel_for_grain(filters_, grain, [&](std::int64_t k) {
    if (dead_[k]) return;
    Spectrum c(dims_);
    for (std::size_t n = 0; n < images_; ++n) {
      const auto& zk = z_hat_[n][k].values;
      for (std::size_t i = 0; i < grid_; ++i)
        c.values[i] += std::conj(zk[i]) * v_hat[n].values[i];
    }
    std::vector<double> spatial = inverse_dft(c);
    for (std::size_t i = 0; i < grid_; ++i)
      if (!support_mask_[i]) spatial[i] = 0.0;
    p_hat[k] = forward_dft(dims_, spatial);
  });

  par::parallel_for_grain(static_cast<std::int64_t>(images_), grain, [&](std::int64_t n) {
    Spectrum acc(dims_);
    for (int k = 0; k < filters_; ++k) {
      if (dead_[k]) continue;
      const double w = 0.5 / mu_[k];
      const auto& zk = z_hat_[n][k].values;
      for (std::size_t i = 0; i < grid_; ++i) acc.values[i] += w * zk[i] * p_hat[k].values[i];
    }
    auto block = out.subspan(static_cast<std::size_t>(n) * grid_, grid_);
    inverse_dft(acc, block);
    const auto vb = v.subspan(static_cast<std::size_t>(n) * grid_, grid_);
    for (std::size_t i = 0; i < grid_; ++i) block[i] += vb[i];
  });
}

std::vector<double> LearningOperator::correlation(int k, std::span<const double> v) const {
  if (v.size() != size()) throw DimensionError("correlation: vector length must be N*D");
  Spectrum c(dims_);
  for (std::size_t n = 0; n < images_; ++n) {
    const Spectrum v_hat =
        forward_dft(dims_, v.subspan(static_cast<std::size_t>(n) * grid_, grid_));
    const auto& zk = z_hat_[n][k].values;
    for (std::size_t i = 0; i < grid_; ++i) c.values[i] += std::conj(zk[i]) * v_hat.values[i];
  }
  return crop_filter(inverse_dft(c), dims_, support_);
}

CgResult gamma_solve(const LearningOperator& op, std::span<const double> x_stacked,
                     double cg_tol, int cg_max, std::span<double> gamma,
                     const CgCallback& on_iterate) {
  const std::size_t n = op.size();
  if (x_stacked.size() != n || gamma.size() != n)
    throw DimensionError("gamma_solve: vector length must be N*D");

  CgResult res;
  std::vector<double> b(n), r(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = -x_stacked[i];
  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) {
    std::fill(gamma.begin(), gamma.end(), 0.0);
    res.converged = true;
    return res;
  }

  op.apply(gamma, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  double rr = dot(r, r);
  res.rel_residual = std::sqrt(rr) / b_norm;
  if (res.rel_residual <= cg_tol) {
    res.converged = true;
    return res;
  }
  std::copy(r.begin(), r.end(), p.begin());

  for (int it = 1; it <= cg_max; ++it) {
    op.apply(p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0.0) break;  // cannot happen for the SPD operator; numeric guard
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      gamma[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    res.iters = it;
    res.rel_residual = std::sqrt(rr_new) / b_norm;
    if (on_iterate) on_iterate(it, gamma);
    if (res.rel_residual <= cg_tol) {
      res.converged = true;
      break;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return res;
}

std::vector<std::vector<double>> d_recover(const LearningOperator& op,
                                           std::span<const double> gamma,
                                           std::span<const double> mu) {
  if (mu.size() != static_cast<std::size_t>(op.filters()))
    throw DimensionError("d_recover: mu length does not match the filter count");
  for (double g : gamma)
    if (!std::isfinite(g)) throw NumericError("d_recover: gamma is not finite");

  // the per-image spectra of gamma are shared across filters
  const std::size_t grid = grid_count(op.dims());
  std::vector<Spectrum> gamma_hat(op.images());
  par::parallel_for_grain(op.images(), static_cast<std::int64_t>(grid), [&](std::int64_t n) {
    gamma_hat[n] = forward_dft(op.dims(), gamma.subspan(static_cast<std::size_t>(n) * grid, grid));
  });

  std::vector<std::vector<double>> d(op.filters());
  par::parallel_for_grain(op.filters(), static_cast<std::int64_t>(grid), [&](std::int64_t k) {
    Spectrum c(op.dims());
    for (int n = 0; n < op.images(); ++n) {
      const Spectrum zc =
          circulant_apply_adjoint(op.map_spectrum(n, static_cast<int>(k)), gamma_hat[n]);
      for (std::size_t i = 0; i < grid; ++i) c.values[i] += zc.values[i];
    }
    std::vector<double> cropped = crop_filter(inverse_dft(c), op.dims(), op.support());
    const double scale = -0.5 / std::max(mu[k], 1e-300);
    for (double& v : cropped) v *= scale;
    d[k] = std::move(cropped);
  });
  return d;
}

std::vector<double> mu_update(std::span<const double> mu, std::span<const double> filter_norms,
                              double mu_floor) {
  if (mu.size() != filter_norms.size()) throw DimensionError("mu_update: length mismatch");
  std::vector<double> out(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k)
    out[k] = std::max(mu[k] * filter_norms[k], mu_floor);
  return out;
}

Dictionary solve_learning(std::span<const SignalTensor> xs, std::span<const SparseMaps> zs,
                          const GridDims& support, const SolverConfig& cfg,
                          LearningDualState& state, LearningStats* stats) {
  cfg.validate();
  if (xs.empty() || xs.size() != zs.size())
    throw DimensionError("solve_learning: need one sparse map set per image");
  const GridDims dims = xs.front().dims;
  const int channels = xs.front().channels;
  const int filters = zs.front().maps;
  for (const SignalTensor& x : xs) {
    x.validate();
    if (x.dims != dims || x.channels != channels)
      throw DimensionError("solve_learning: images must share dims and channels");
  }
  for (const SparseMaps& z : zs)
    if (z.maps != filters || z.dims != dims)
      throw DimensionError("solve_learning: sparse maps are inconsistent across images");
  if (support.size() != dims.size())
    throw DimensionError("solve_learning: support and grid rank differ");
  for (std::size_t a = 0; a < dims.size(); ++a)
    if (support[a] > dims[a]) throw DimensionError("solve_learning: support larger than grid");

  LearningStats local;
  const std::size_t grid = grid_count(dims);
  const std::size_t stacked = xs.size() * grid;

  if (state.mu.size() != static_cast<std::size_t>(filters)) state.mu.assign(filters, 1.0);
  if (state.gamma.size() != static_cast<std::size_t>(channels) ||
      (channels > 0 && state.gamma.front().size() != stacked))
    state.gamma.assign(channels, std::vector<double>(stacked, 0.0));

  bool all_zero = true;
  for (const SparseMaps& z : zs)
    for (double v : z.values)
      if (v != 0.0) {
        all_zero = false;
        break;
      }
  if (all_zero) {
    local.degenerate = true;
    for (auto& g : state.gamma) std::fill(g.begin(), g.end(), 0.0);
    if (stats) *stats = local;
    return Dictionary(filters, support, channels);
  }

  LearningOperator op(zs, support, cfg.mu_floor);
  for (int k = 0; k < filters; ++k)
    if (op.filter_dead(k)) local.dead_filters.push_back(k);

  // per-channel stacked signals
  std::vector<std::vector<double>> x_stacked(channels, std::vector<double>(stacked));
  for (int j = 0; j < channels; ++j)
    for (std::size_t n = 0; n < xs.size(); ++n) {
      const auto ch = xs[n].channel(j);
      std::copy(ch.begin(), ch.end(), x_stacked[j].begin() + static_cast<std::ptrdiff_t>(n * grid));
    }

  const std::size_t m = grid_count(support);
  std::vector<std::vector<std::vector<double>>> d_parts(channels);
  std::vector<double> norms(filters, 0.0);

  for (int iter = 1; iter <= cfg.max_mu_iters; ++iter) {
    op.set_mu(state.mu);
    state.mu.assign(op.mu().begin(), op.mu().end());

    std::vector<CgResult> cg(channels);
    par::parallel_for(channels, [&](std::int64_t j) {
      cg[j] = gamma_solve(op, x_stacked[j], cfg.cg_tol, cfg.cg_max, state.gamma[j]);
    });
    long iter_cg = 0;
    for (const CgResult& c : cg) {
      iter_cg += c.iters;
      if (!c.converged) local.cg_budget_hit = true;
    }
    local.cg_iters += iter_cg;
    if (iter == 1) local.cg_iters_first = iter_cg;

    for (int j = 0; j < channels; ++j) d_parts[j] = d_recover(op, state.gamma[j], state.mu);

    for (int k = 0; k < filters; ++k) {
      double sq = 0.0;
      for (int j = 0; j < channels; ++j)
        for (double v : d_parts[j][k]) sq += v * v;
      norms[k] = std::sqrt(sq);
    }

    local.mu_iters = iter;
    bool all_settled = true;
    for (int k = 0; k < filters; ++k) {
      const bool at_boundary = std::abs(norms[k] - 1.0) <= kFilterNormTol;
      const bool inactive = state.mu[k] <= cfg.mu_floor * (1.0 + 1e-9) && norms[k] < 1.0;
      if (!at_boundary && !inactive) {
        all_settled = false;
        break;
      }
    }
    if (all_settled) {
      local.converged = true;
      break;
    }
    if (iter < cfg.max_mu_iters) state.mu = mu_update(state.mu, norms, cfg.mu_floor);
  }
  local.mu_clamped = op.mu_clamped();
  state.mu_iters_total += local.mu_iters;
  state.cg_iters_total += local.cg_iters;

  Dictionary dict(filters, support, channels);
  for (int k = 0; k < filters; ++k) {
    double scale = 1.0;
    if (norms[k] > 1.0) {
      scale = 1.0 / norms[k];
      ++local.rescaled_filters;
    }
    for (int j = 0; j < channels; ++j) {
      auto f = dict.filter(k, j);
      for (std::size_t i = 0; i < m; ++i) f[i] = scale * d_parts[j][k][i];
    }
  }

  if (stats) *stats = local;
  return dict;
}

Dictionary solve_learning(std::span<const SignalTensor> xs, std::span<const SparseMaps> zs,
                          const GridDims& support, const SolverConfig& cfg,
                          LearningStats* stats) {
  LearningDualState state;
  return solve_learning(xs, zs, support, cfg, state, stats);
}

}  // namespace dcsc

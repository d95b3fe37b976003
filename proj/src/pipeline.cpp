#include "dcsc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "dcsc/grid.hpp"
#include "dcsc/objective.hpp"
#include "dcsc/parallel.hpp"
#include "dcsc/tcsc.hpp"

namespace dcsc {

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

// circular Gaussian blur along every grid axis, sigma in samples
std::vector<double> gaussian_blur(const GridDims& dims, std::span<const double> v,
                                  double sigma) {
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double ksum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    ksum += kernel[i + radius];
  }
  for (double& k : kernel) k /= ksum;

  std::vector<double> cur(v.begin(), v.end());
  std::vector<double> next(cur.size());
  const auto strides = row_major_strides(dims);
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    const int n = dims[axis];
    const std::size_t stride = strides[axis];
    const std::size_t count = cur.size();
    std::vector<int> coords(dims.size(), 0);
    for (std::size_t t = 0; t < count; ++t) {
      unflatten(dims, t, coords);
      double acc = 0.0;
      const int c0 = coords[axis];
      for (int i = -radius; i <= radius; ++i) {
        const int c = wrap(c0 + i, n);
        acc += kernel[i + radius] * cur[t + (c - c0) * static_cast<std::ptrdiff_t>(stride)];
      }
      next[t] = acc;
    }
    cur.swap(next);
  }
  return cur;
}

double mean_of(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

void RunConfig::validate(const GridDims& dims, int channels) const {
  solver.validate();
  if (filters < 1) throw std::invalid_argument("filter count must be >= 1");
  if (support.size() != dims.size())
    throw DimensionError("filter support and grid rank differ");
  for (std::size_t a = 0; a < dims.size(); ++a)
    if (support[a] < 1 || support[a] > dims[a])
      throw DimensionError("filter support must fit inside the grid");
  if (channel_mode == ChannelMode::Separate && channels != 1)
    throw DimensionError("separate channel mode expects single-channel signals");
}

SignalTensor normalize(const SignalTensor& x, NormalizeMode mode, bool* degenerate) {
  if (degenerate) *degenerate = false;
  x.validate();
  if (mode == NormalizeMode::None) return x;

  SignalTensor out = x;
  if (mode == NormalizeMode::Global) {
    const double m = mean_of(x.values);
    double var = 0.0;
    for (double v : x.values) var += (v - m) * (v - m);
    const double std_dev = std::sqrt(var / static_cast<double>(x.values.size()));
    if (std_dev < 1e-8) {
      // constant input: the floored division would only amplify roundoff
      if (degenerate) *degenerate = true;
      std::fill(out.values.begin(), out.values.end(), 0.0);
      return out;
    }
    for (double& v : out.values) v = (v - m) / std_dev;
    return out;
  }

  // local contrast normalization, per channel
  constexpr double sigma = 3.0;
  for (int j = 0; j < x.channels; ++j) {
    const auto src = x.channel(j);
    auto dst = out.channel(j);
    const std::vector<double> local_mean = gaussian_blur(x.dims, src, sigma);
    std::vector<double> sq(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) sq[i] = src[i] * src[i];
    const std::vector<double> local_sq = gaussian_blur(x.dims, sq, sigma);
    std::vector<double> local_std(src.size());
    for (std::size_t i = 0; i < src.size(); ++i)
      local_std[i] = std::sqrt(std::max(local_sq[i] - local_mean[i] * local_mean[i], 0.0));
    const double floor = mean_of(local_std);
    if (floor < 1e-8) {
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] - local_mean[i];
      if (degenerate) *degenerate = true;
      continue;
    }
    for (std::size_t i = 0; i < src.size(); ++i)
      dst[i] = (src[i] - local_mean[i]) / std::max(local_std[i], floor);
  }
  return out;
}

InitVariables init_variables(const RunConfig& cfg, const GridDims& dims, int channels,
                             std::size_t image_count) {
  cfg.validate(dims, channels);
  InitVariables init;
  init.dict = Dictionary(cfg.filters, cfg.support, channels);

  std::mt19937_64 rng(cfg.solver.seed);
  auto uniform = [&rng]() {
    // [-0.5, 0.5), mapped from the top 53 bits
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  };
  for (int k = 0; k < cfg.filters; ++k) {
    double sq = 0.0;
    for (int j = 0; j < channels; ++j)
      for (double& v : init.dict.filter(k, j)) {
        v = uniform();
        sq += v * v;
      }
    double norm = std::sqrt(sq);
    if (norm == 0.0) {
      init.dict.filter(k, 0)[0] = 1.0;
      norm = 1.0;
    }
    for (int j = 0; j < channels; ++j)
      for (double& v : init.dict.filter(k, j)) v /= norm;
  }

  init.maps.assign(image_count, SparseMaps(cfg.filters, dims));
  init.coding.assign(image_count, CodingDualState{});
  init.learning.mu.assign(cfg.filters, 1.0);
  init.learning.gamma.assign(channels,
                             std::vector<double>(image_count * grid_count(dims), 0.0));
  return init;
}

RunResult run_csc(const RunConfig& cfg, const Dataset& data) {
  if (data.signals.empty()) throw std::invalid_argument("dataset is empty");
  const GridDims dims = data.signals.front().dims;
  const int channels = data.signals.front().channels;
  for (const SignalTensor& x : data.signals) {
    x.validate();
    if (x.dims != dims || x.channels != channels)
      throw DimensionError("all dataset signals must share dims and channels");
  }
  cfg.validate(dims, channels);
  const bool tcsc = cfg.channel_mode == ChannelMode::Joint && channels > 1;
  const std::size_t n_images = data.signals.size();
  const double beta = cfg.solver.beta;
  const double tau = cfg.solver.tol;

  RunResult result;

  std::vector<SignalTensor> xs(n_images);
  for (std::size_t n = 0; n < n_images; ++n) {
    bool degen = false;
    xs[n] = normalize(data.signals[n], cfg.solver.normalize, &degen);
    if (degen) {
      const std::string name = n < data.names.size() ? data.names[n] : std::to_string(n);
      result.warnings.push_back("normalize: constant input '" + name + "' mapped to zeros");
    }
  }

  InitVariables vars = init_variables(cfg, dims, channels, n_images);
  result.dict = vars.dict;
  result.maps = vars.maps;
  if (cfg.solver.max_outer == 0) return result;

  auto total_objective = [&]() {
    ObjectiveBreakdown sum;
    for (std::size_t n = 0; n < n_images; ++n) {
      const ObjectiveBreakdown b = evaluate_objective(xs[n], result.dict, result.maps[n], beta);
      sum.data_term += b.data_term;
      sum.l1_term += b.l1_term;
      sum.residual_norm += b.residual_norm * b.residual_norm;
    }
    sum.total = sum.data_term + sum.l1_term;
    sum.residual_norm = std::sqrt(sum.residual_norm);
    return sum;
  };

  auto check_finite = [&](const ObjectiveBreakdown& b, int outer, Phase phase) {
    if (std::isfinite(b.total)) return;
    std::ostringstream msg;
    msg << "non-finite objective at outer iteration " << outer << ", " << phase_name(phase)
        << " phase: data_term=" << b.data_term << " l1_term=" << b.l1_term;
    throw NumericError(msg.str());
  };

  double prev_total = total_objective().total;
  std::vector<ObjectiveBreakdown> image_obj(n_images);
  for (std::size_t n = 0; n < n_images; ++n)
    image_obj[n] = evaluate_objective(xs[n], result.dict, result.maps[n], beta);

  for (int outer = 1; outer <= cfg.solver.max_outer; ++outer) {
    // ---- coding half-step: per image, warm started, accept only descent
    std::vector<SparseMaps> candidates(n_images);
    std::vector<CodingStats> cstats(n_images);
    const double coding_start = now_ms();
    par::parallel_for(static_cast<std::int64_t>(n_images), [&](std::int64_t n) {
      if (tcsc)
        candidates[n] =
            solve_coding_tcsc(xs[n], result.dict, cfg.solver, vars.coding[n], &cstats[n]);
      else
        candidates[n] = solve_coding(xs[n], result.dict, cfg.solver, vars.coding[n], &cstats[n]);
    });
    const double coding_ms = now_ms() - coding_start;

    long admm_total = 0;
    double z_change_sq = 0.0, z_norm_sq = 0.0;
    for (std::size_t n = 0; n < n_images; ++n) {
      admm_total += cstats[n].admm_iters;
      const ObjectiveBreakdown cand = evaluate_objective(xs[n], result.dict, candidates[n], beta);
      check_finite(cand, outer, Phase::Coding);
      if (cand.total <= image_obj[n].total) {
        for (std::size_t i = 0; i < candidates[n].values.size(); ++i) {
          const double delta = candidates[n].values[i] - result.maps[n].values[i];
          z_change_sq += delta * delta;
        }
        result.maps[n] = std::move(candidates[n]);
        image_obj[n] = cand;
      }
      // a rejected candidate leaves the maps (and the objective) unchanged;
      // the dual state still advances for the next warm start
      for (double v : result.maps[n].values) z_norm_sq += v * v;
    }

    ObjectiveBreakdown after_coding;
    for (std::size_t n = 0; n < n_images; ++n) {
      after_coding.data_term += image_obj[n].data_term;
      after_coding.l1_term += image_obj[n].l1_term;
      after_coding.residual_norm += image_obj[n].residual_norm * image_obj[n].residual_norm;
    }
    after_coding.total = after_coding.data_term + after_coding.l1_term;
    after_coding.residual_norm = std::sqrt(after_coding.residual_norm);
    result.trace.rows.push_back(
        {outer, Phase::Coding, after_coding, admm_total, 0, coding_ms});

    // ---- learning half-step: joint over images, warm started
    LearningStats lstats;
    const double learning_start = now_ms();
    Dictionary dict_candidate =
        solve_learning(xs, result.maps, cfg.support, cfg.solver, vars.learning, &lstats);
    const double learning_ms = now_ms() - learning_start;

    double d_change_sq = 0.0, d_norm_sq = 0.0;
    ObjectiveBreakdown after_learning = after_coding;
    const double cand_data = learning_data_term(xs, dict_candidate, result.maps);
    check_finite({cand_data, after_coding.l1_term, cand_data + after_coding.l1_term, 0.0},
                 outer, Phase::Learning);
    if (cand_data <= after_coding.data_term) {
      for (std::size_t i = 0; i < dict_candidate.values.size(); ++i) {
        const double delta = dict_candidate.values[i] - result.dict.values[i];
        d_change_sq += delta * delta;
      }
      result.dict = std::move(dict_candidate);
      after_learning.data_term = cand_data;
      after_learning.total = cand_data + after_coding.l1_term;
      after_learning.residual_norm = std::sqrt(2.0 * cand_data);
      for (std::size_t n = 0; n < n_images; ++n)
        image_obj[n] = evaluate_objective(xs[n], result.dict, result.maps[n], beta);
    }
    for (double v : result.dict.values) d_norm_sq += v * v;
    result.trace.rows.push_back(
        {outer, Phase::Learning, after_learning, 0, lstats.cg_iters, learning_ms});

    result.outer_iters = outer;

    const double obj_change =
        std::abs(prev_total - after_learning.total) / std::max(std::abs(prev_total), 1e-30);
    const double z_change = std::sqrt(z_change_sq) / std::max(std::sqrt(z_norm_sq), 1.0);
    const double d_change = std::sqrt(d_change_sq) / std::max(std::sqrt(d_norm_sq), 1.0);
    prev_total = after_learning.total;
    if (obj_change <= tau && z_change <= tau && d_change <= tau) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace dcsc

#include "dcsc/bench.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace dcsc {

Dataset synthetic_dataset(const GridDims& dims, int channels, int images,
                          std::uint64_t seed) {
  Dataset data;
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int n = 0; n < images; ++n) {
    SignalTensor x(dims, channels);
    for (double& v : x.values) v = uniform();
    data.signals.push_back(std::move(x));
    data.names.push_back("synthetic_" + std::to_string(n));
  }
  return data;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  if (cfg.grid.empty()) throw std::invalid_argument("bench grid is empty");
  if (cfg.repeats < 1) throw std::invalid_argument("bench repeats must be >= 1");

  std::vector<BenchRow> rows;
  for (double value : cfg.grid) {
    RunConfig run;
    run.solver = cfg.solver;
    run.solver.beta = cfg.beta;
    run.solver.max_outer = cfg.outer_iters;
    run.solver.tol = 1e-300;  // never stop early inside the measured window
    run.filters = cfg.filters;
    run.support = cfg.support;
    run.channel_mode = cfg.channels > 1 ? ChannelMode::Joint : ChannelMode::Separate;
    int images = cfg.images;
    switch (cfg.vary) {
      case BenchVary::Filters:
        run.filters = static_cast<int>(value);
        break;
      case BenchVary::Images:
        images = static_cast<int>(value);
        break;
      case BenchVary::Beta:
        run.solver.beta = value;
        break;
    }
    if (run.filters < 1 || images < 1)
      throw std::invalid_argument("bench grid holds a non-positive size");

    std::vector<double> coding_ms, learning_ms;
    long admm_iters = 0, cg_iters = 0;
    double coding_total = 0.0, learning_total = 0.0;
    for (int rep = 0; rep < cfg.repeats; ++rep) {
      const Dataset data =
          synthetic_dataset(cfg.dims, cfg.channels, images, cfg.solver.seed + rep);
      const RunResult res = run_csc(run, data);
      for (const TraceRow& r : res.trace.rows) {
        if (r.phase == Phase::Coding) {
          coding_ms.push_back(r.elapsed_ms);
          coding_total += r.elapsed_ms;
          admm_iters += r.admm_iters;
        } else {
          learning_ms.push_back(r.elapsed_ms);
          learning_total += r.elapsed_ms;
          cg_iters += r.cg_iters;
        }
      }
    }

    auto stats_of = [](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      return std::make_pair(mean, std::sqrt(var / static_cast<double>(v.size())));
    };

    const auto [c_mean, c_std] = stats_of(coding_ms);
    const auto [l_mean, l_std] = stats_of(learning_ms);
    BenchRow coding{value, Phase::Coding, c_mean, c_std, 0.0, 0.0};
    if (admm_iters > 0) coding.mean_ms_per_admm_iter = coding_total / admm_iters;
    BenchRow learning{value, Phase::Learning, l_mean, l_std, 0.0, 0.0};
    if (cg_iters > 0) learning.mean_ms_per_cg_iter = learning_total / cg_iters;
    rows.push_back(coding);
    rows.push_back(learning);
  }
  return rows;
}

void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows) {
  os << "varied_value,phase,mean_ms_per_outer_iter,std_ms\n";
  os.precision(17);
  for (const BenchRow& r : rows)
    os << r.varied_value << ',' << phase_name(r.phase) << ',' << r.mean_ms_per_outer << ','
       << r.std_ms << "\n";
}

}  // namespace dcsc

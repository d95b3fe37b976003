// Kernel-level benchmark: serial (1 thread) versus OpenMP execution of the
// batch DFT, the ADMM coding iteration and the learning operator apply.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>
#include <vector>

#include "dcsc/coding.hpp"
#include "dcsc/learning.hpp"
#include "dcsc/parallel.hpp"
#include "dcsc/pipeline.hpp"
#include "dcsc/spectral.hpp"

using namespace dcsc;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  using clock = std::chrono::steady_clock;
  fn();  // warm up plans and caches
  const auto start = clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double, std::milli>(clock::now() - start).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 128;
  const int filters = argc > 2 ? std::atoi(argv[2]) : 16;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 5;
  const GridDims dims{n, n};
  const GridDims support{11, 11};

  std::mt19937_64 rng(11);
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };

  SignalTensor x(dims, 1);
  for (double& v : x.values) v = uniform();
  Dictionary dict(filters, support, 1);
  for (int k = 0; k < filters; ++k) {
    double sq = 0.0;
    for (double& v : dict.filter(k)) {
      v = uniform();
      sq += v * v;
    }
    for (double& v : dict.filter(k)) v /= std::sqrt(sq);
  }
  SparseMaps maps(filters, dims);
  for (double& v : maps.values) v = uniform();

  SolverConfig cfg;
  cfg.beta = 0.5;
  cfg.max_admm = 20;

  auto batch_dft = [&]() {
    std::vector<Spectrum> spectra(filters);
    par::parallel_for(filters, [&](std::int64_t k) {
      spectra[k] = forward_dft(dims, maps.map(static_cast<int>(k)));
    });
  };
  auto admm_iters = [&]() {
    CodingStats stats;
    solve_coding(x, dict, cfg, &stats);
  };
  LearningOperator op(std::span<const SparseMaps>(&maps, 1), support, 1e-6);
  std::vector<double> v(op.size()), out(op.size());
  for (double& vi : v) vi = uniform();
  auto op_apply = [&]() { op.apply(v, out); };

  struct KernelCase {
    const char* name;
    std::function<void()> fn;
  };
  const std::vector<KernelCase> cases = {
      {"batch_dft", batch_dft},
      {"admm_coding_20it", admm_iters},
      {"learning_op_apply", op_apply},
  };

#ifdef _OPENMP
  const int hw = omp_get_max_threads();
#else
  const int hw = 1;
#endif

  std::cout << "kernel,serial_ms,parallel_ms,threads,speedup\n";
  for (const auto& c : cases) {
    par::set_max_threads(1);
    const double serial = time_ms(c.fn, reps);
    par::set_max_threads(0);
    const double parallel = time_ms(c.fn, reps);
    std::cout << c.name << ',' << serial << ',' << parallel << ',' << hw << ','
              << (parallel > 0 ? serial / parallel : 0.0) << "\n";
  }
  return 0;
}

#pragma once
// Shared helpers for the test suites: seeded generators and Eigen adapters.

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "dcsc/types.hpp"

namespace testutil {

inline double urand(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline dcsc::SignalTensor random_signal(const dcsc::GridDims& dims, int channels,
                                        std::mt19937_64& rng, double scale = 1.0) {
  dcsc::SignalTensor x(dims, channels);
  for (double& v : x.values) v = scale * urand(rng);
  return x;
}

inline dcsc::Dictionary random_dictionary(int filters, const dcsc::GridDims& support,
                                          int channels, std::mt19937_64& rng,
                                          bool unit_norm = true) {
  dcsc::Dictionary d(filters, support, channels);
  for (double& v : d.values) v = urand(rng);
  if (unit_norm) {
    for (int k = 0; k < filters; ++k) {
      const double n = d.filter_norm(k);
      for (int j = 0; j < channels; ++j)
        for (double& v : d.filter(k, j)) v /= n;
    }
  }
  return d;
}

inline dcsc::SparseMaps random_maps(int maps, const dcsc::GridDims& dims,
                                    std::mt19937_64& rng, double density = 1.0,
                                    double scale = 1.0) {
  dcsc::SparseMaps z(maps, dims);
  for (double& v : z.values)
    v = urand(rng, 0.0, 1.0) < density ? scale * urand(rng) : 0.0;
  return z;
}

inline Eigen::VectorXd to_vec(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> from_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-30);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testutil

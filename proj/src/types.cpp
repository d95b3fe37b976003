#include "dcsc/types.hpp"

#include <cmath>
#include <numeric>

namespace dcsc {

std::size_t grid_count(const GridDims& dims) {
  std::size_t n = 1;
  for (int d : dims) {
    if (d < 1) throw DimensionError("grid dimension must be >= 1");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::vector<std::size_t> row_major_strides(const GridDims& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (int a = static_cast<int>(dims.size()) - 2; a >= 0; --a)
    strides[a] = strides[a + 1] * static_cast<std::size_t>(dims[a + 1]);
  return strides;
}

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericError(std::string(what) + " contains a non-finite value");
}

}  // namespace

SignalTensor::SignalTensor(GridDims grid, int channel_count)
    : dims(std::move(grid)), channels(channel_count) {
  values.assign(grid_count() * static_cast<std::size_t>(channels), 0.0);
}

std::span<const double> SignalTensor::channel(int j) const {
  const std::size_t d = grid_count();
  return {values.data() + static_cast<std::size_t>(j) * d, d};
}

std::span<double> SignalTensor::channel(int j) {
  const std::size_t d = grid_count();
  return {values.data() + static_cast<std::size_t>(j) * d, d};
}

void SignalTensor::validate() const {
  if (channels < 1) throw DimensionError("signal channel count must be >= 1");
  if (values.size() != grid_count() * static_cast<std::size_t>(channels))
    throw DimensionError("signal value count does not match J * D");
  require_finite(values, "signal");
}

Dictionary::Dictionary(int filter_count, GridDims filter_support, int channel_count)
    : filters(filter_count), support(std::move(filter_support)), channels(channel_count) {
  values.assign(static_cast<std::size_t>(filters) * channels * support_count(), 0.0);
}

std::span<const double> Dictionary::filter(int k, int j) const {
  const std::size_t m = support_count();
  return {values.data() + (static_cast<std::size_t>(k) * channels + j) * m, m};
}

std::span<double> Dictionary::filter(int k, int j) {
  const std::size_t m = support_count();
  return {values.data() + (static_cast<std::size_t>(k) * channels + j) * m, m};
}

double Dictionary::filter_norm(int k) const {
  double acc = 0.0;
  for (int j = 0; j < channels; ++j)
    for (double v : filter(k, j)) acc += v * v;
  return std::sqrt(acc);
}

void Dictionary::validate() const {
  if (filters < 1) throw DimensionError("dictionary must hold at least one filter");
  if (channels < 1) throw DimensionError("dictionary channel count must be >= 1");
  if (values.size() != static_cast<std::size_t>(filters) * channels * support_count())
    throw DimensionError("dictionary value count does not match K * J * M");
  require_finite(values, "dictionary");
}

SparseMaps::SparseMaps(int map_count, GridDims grid) : maps(map_count), dims(std::move(grid)) {
  values.assign(static_cast<std::size_t>(maps) * grid_count(), 0.0);
}

std::span<const double> SparseMaps::map(int k) const {
  const std::size_t d = grid_count();
  return {values.data() + static_cast<std::size_t>(k) * d, d};
}

std::span<double> SparseMaps::map(int k) {
  const std::size_t d = grid_count();
  return {values.data() + static_cast<std::size_t>(k) * d, d};
}

void SparseMaps::validate() const {
  if (maps < 1) throw DimensionError("sparse maps must hold at least one map");
  if (values.size() != static_cast<std::size_t>(maps) * grid_count())
    throw DimensionError("sparse map value count does not match K * D");
  require_finite(values, "sparse maps");
}

void SolverConfig::validate() const {
  if (!(beta > 0)) throw std::invalid_argument("beta must be > 0");
  if (!(rho > 0)) throw std::invalid_argument("rho must be > 0");
  if (!(tol > 0)) throw std::invalid_argument("tol must be > 0");
  if (!(mu_floor > 0)) throw std::invalid_argument("mu_floor must be > 0");
  if (max_outer < 0 || max_admm < 1 || max_mu_iters < 1 || cg_max < 1)
    throw std::invalid_argument("iteration caps must be positive");
  if (!(cg_tol > 0)) throw std::invalid_argument("cg_tol must be > 0");
}

const char* phase_name(Phase p) { return p == Phase::Coding ? "coding" : "learning"; }

bool ConvergenceTrace::objective_monotone(double slack) const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].objective.total > rows[i - 1].objective.total + slack) return false;
  return true;
}

}  // namespace dcsc

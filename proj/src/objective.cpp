#include "dcsc/objective.hpp"

#include <cmath>

#include "dcsc/grid.hpp"
#include "dcsc/parallel.hpp"

namespace dcsc {

namespace {

void check_shapes(const Dictionary& d, const SparseMaps& z) {
  if (z.maps != d.filters) throw DimensionError("map count does not match filter count");
  if (d.support.size() != z.dims.size())
    throw DimensionError("filter support and grid rank differ");
  for (std::size_t a = 0; a < z.dims.size(); ++a)
    if (d.support[a] > z.dims[a]) throw DimensionError("filter support larger than grid");
}

// out += w * (z circularly shifted by the support offset s)
void accumulate_shifted(const GridDims& dims, std::span<const double> zk,
                        std::span<const int> shift, double w, std::span<double> out) {
  const std::size_t n = out.size();
  std::vector<int> coords(dims.size(), 0);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t src = 0;
    for (std::size_t a = 0; a < dims.size(); ++a) {
      int c = coords[a] - shift[a];
      if (c < 0) c += dims[a];
      src = src * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(c);
    }
    out[t] += w * zk[src];
    next_index(dims, coords);
  }
}

}  // namespace

SignalTensor reconstruct(const Dictionary& d, const SparseMaps& z) {
  check_shapes(d, z);
  SignalTensor out(z.dims, d.channels);
  const std::size_t m = d.support_count();
  std::vector<int> offset(d.support.size(), 0);

  par::parallel_for(d.channels, [&](std::int64_t j) {
    auto channel = out.channel(static_cast<int>(j));
    std::vector<int> s(d.support.size(), 0);
    for (int k = 0; k < d.filters; ++k) {
      const auto filter = d.filter(k, static_cast<int>(j));
      for (std::size_t i = 0; i < m; ++i) {
        unflatten(d.support, i, s);
        if (filter[i] != 0.0) accumulate_shifted(z.dims, z.map(k), s, filter[i], channel);
      }
    }
  });
  return out;
}

ObjectiveBreakdown evaluate_objective(const SignalTensor& x, const Dictionary& d,
                                      const SparseMaps& z, double beta) {
  check_shapes(d, z);
  if (x.dims != z.dims) throw DimensionError("signal and map grids differ");
  if (x.channels != d.channels) throw DimensionError("signal and dictionary channel counts differ");

  const SignalTensor rec = reconstruct(d, z);
  double residual_sq = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    const double r = rec.values[i] - x.values[i];
    residual_sq += r * r;
  }
  double l1 = 0.0;
  for (double v : z.values) l1 += std::abs(v);

  ObjectiveBreakdown b;
  b.data_term = 0.5 * residual_sq;
  b.l1_term = beta * l1;
  b.total = b.data_term + b.l1_term;
  b.residual_norm = std::sqrt(residual_sq);
  if (!std::isfinite(b.total)) throw NumericError("objective is not finite");
  return b;
}

double learning_data_term(std::span<const SignalTensor> xs, const Dictionary& d,
                          std::span<const SparseMaps> zs) {
  if (xs.size() != zs.size()) throw DimensionError("signal and map counts differ");
  double acc = 0.0;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const SignalTensor rec = reconstruct(d, zs[n]);
    for (std::size_t i = 0; i < xs[n].values.size(); ++i) {
      const double r = rec.values[i] - xs[n].values[i];
      acc += 0.5 * r * r;
    }
  }
  return acc;
}

}  // namespace dcsc

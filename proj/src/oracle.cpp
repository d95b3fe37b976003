#include "dcsc/oracle.hpp"

#include <cmath>
#include <numbers>

#include "dcsc/grid.hpp"

namespace dcsc::oracle {

namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Corner-placed zero padding, kept local so the oracle shares no code with
// the spectral path it verifies.
std::vector<double> pad_dense(const Dictionary& d, int k, int j, const GridDims& dims) {
  std::vector<double> out(grid_count(dims), 0.0);
  const auto f = d.filter(k, j);
  std::vector<int> coords(d.support.size(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    unflatten(d.support, i, coords);
    out[flatten(dims, coords)] = f[i];
  }
  return out;
}

// Largest eigenvalue of a symmetric PSD matrix, with a safety factor.
double lipschitz_estimate(const Eigen::MatrixXd& G) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(G.rows());
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd w = G * v;
    const double n = w.norm();
    if (n == 0.0) return 1.0;
    lambda = n;
    v = w / n;
  }
  return 1.01 * lambda + 1e-12;
}

}  // namespace

DenseProblem materialize(const Dictionary& d, const GridDims& dims) {
  d.validate();
  const std::size_t n = grid_count(dims);
  if (n > kMaxMaterializeCount)
    throw std::invalid_argument("materialize: grid exceeds the dense size guard");
  for (std::size_t a = 0; a < dims.size(); ++a)
    if (d.support[a] > dims[a]) throw DimensionError("materialize: support larger than grid");

  DenseProblem p;
  p.dims = dims;
  p.filters = d.filters;
  p.channels = d.channels;
  p.D_mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.channels * n),
                                  static_cast<Eigen::Index>(d.filters * n));

  std::vector<int> shift(dims.size(), 0);
  for (int k = 0; k < d.filters; ++k) {
    for (int j = 0; j < d.channels; ++j) {
      const std::vector<double> padded = pad_dense(d, k, j, dims);
      for (std::size_t s = 0; s < n; ++s) {
        unflatten(dims, s, shift);
        const std::vector<double> col = circular_shift(dims, padded, shift);
        for (std::size_t t = 0; t < n; ++t)
          p.D_mat(static_cast<Eigen::Index>(j * n + t),
                  static_cast<Eigen::Index>(k * n + s)) = col[t];
      }
    }
  }
  return p;
}

std::vector<std::complex<double>> direct_dft(const GridDims& dims,
                                             std::span<const double> values) {
  const std::size_t n = grid_count(dims);
  if (values.size() != n) throw DimensionError("direct_dft: length mismatch");
  std::vector<std::complex<double>> out(n, {0.0, 0.0});
  std::vector<int> w(dims.size(), 0), t(dims.size(), 0);
  for (std::size_t wi = 0; wi < n; ++wi) {
    unflatten(dims, wi, w);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t ti = 0; ti < n; ++ti) {
      unflatten(dims, ti, t);
      double phase = 0.0;
      for (std::size_t a = 0; a < dims.size(); ++a)
        phase += static_cast<double>(w[a]) * static_cast<double>(t[a]) / dims[a];
      const double ang = -2.0 * std::numbers::pi * phase;
      acc += values[ti] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[wi] = acc;
  }
  return out;
}

std::vector<double> direct_circular_convolution(const GridDims& dims,
                                                std::span<const double> a,
                                                std::span<const double> b) {
  const std::size_t n = grid_count(dims);
  if (a.size() != n || b.size() != n)
    throw DimensionError("direct_circular_convolution: length mismatch");
  std::vector<double> out(n, 0.0);
  std::vector<int> t(dims.size(), 0), s(dims.size(), 0), diff(dims.size(), 0);
  for (std::size_t ti = 0; ti < n; ++ti) {
    unflatten(dims, ti, t);
    double acc = 0.0;
    for (std::size_t si = 0; si < n; ++si) {
      unflatten(dims, si, s);
      for (std::size_t x = 0; x < dims.size(); ++x) diff[x] = wrap(t[x] - s[x], dims[x]);
      acc += a[si] * b[flatten(dims, diff)];
    }
    out[ti] = acc;
  }
  return out;
}

std::vector<double> circular_shift(const GridDims& dims, std::span<const double> v,
                                   const std::vector<int>& shift) {
  const std::size_t n = grid_count(dims);
  if (v.size() != n) throw DimensionError("circular_shift: length mismatch");
  if (shift.size() != dims.size()) throw DimensionError("circular_shift: rank mismatch");
  std::vector<double> out(n);
  std::vector<int> t(dims.size(), 0), dst(dims.size(), 0);
  for (std::size_t ti = 0; ti < n; ++ti) {
    unflatten(dims, ti, t);
    for (std::size_t a = 0; a < dims.size(); ++a) dst[a] = wrap(t[a] + shift[a], dims[a]);
    out[flatten(dims, dst)] = v[ti];
  }
  return out;
}

double lasso_objective(const Eigen::MatrixXd& D, const Eigen::VectorXd& x, double beta,
                       const Eigen::VectorXd& z) {
  return 0.5 * (x - D * z).squaredNorm() + beta * z.lpNorm<1>();
}

Eigen::VectorXd fista_lasso(const Eigen::MatrixXd& D, const Eigen::VectorXd& x, double beta,
                            int max_iters) {
  const Eigen::MatrixXd G = D.transpose() * D;
  const Eigen::VectorXd c = D.transpose() * x;
  const double L = lipschitz_estimate(G);

  Eigen::VectorXd z = Eigen::VectorXd::Zero(D.cols());
  Eigen::VectorXd y = z, z_old = z;
  double t = 1.0;
  double last_checked = lasso_objective(D, x, beta, z);

  for (int it = 0; it < max_iters; ++it) {
    z_old = z;
    const Eigen::VectorXd grad = G * y - c;
    const Eigen::VectorXd step = y - grad / L;
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = soft_threshold(step[i], beta / L);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = z + ((t - 1.0) / t_next) * (z - z_old);
    t = t_next;

    if (it % 25 == 24) {
      const double obj = lasso_objective(D, x, beta, z);
      if (std::abs(last_checked - obj) <= 1e-12 * std::max(1.0, std::abs(obj))) break;
      last_checked = obj;
    }
  }
  return z;
}

Eigen::VectorXd coordinate_descent_lasso(const Eigen::MatrixXd& D, const Eigen::VectorXd& x,
                                         double beta, int max_sweeps) {
  const Eigen::Index p = D.cols();
  const Eigen::MatrixXd G = D.transpose() * D;
  const Eigen::VectorXd c = D.transpose() * x;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd Gz = Eigen::VectorXd::Zero(p);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      const double gii = G(i, i);
      if (gii <= 0.0) continue;
      const double rho = c[i] - Gz[i] + gii * z[i];
      const double zi = soft_threshold(rho, beta) / gii;
      const double delta = zi - z[i];
      if (delta != 0.0) {
        Gz += delta * G.col(i);
        z[i] = zi;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change <= 1e-12) break;
  }
  return z;
}

Eigen::MatrixXd materialize_filter_system(std::span<const SparseMaps> zs,
                                          const GridDims& support) {
  if (zs.empty()) throw DimensionError("materialize_filter_system: no maps");
  const GridDims dims = zs.front().dims;
  const std::size_t d = grid_count(dims);
  const std::size_t m = grid_count(support);
  const int filters = zs.front().maps;
  if (static_cast<std::size_t>(zs.size()) * d > kMaxMaterializeCount)
    throw std::invalid_argument("materialize_filter_system: exceeds the dense size guard");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(zs.size() * d),
                                            static_cast<Eigen::Index>(filters * m));
  std::vector<int> offset(support.size(), 0);
  for (std::size_t n = 0; n < zs.size(); ++n) {
    if (zs[n].maps != filters || zs[n].dims != dims)
      throw DimensionError("materialize_filter_system: inconsistent maps");
    for (int k = 0; k < filters; ++k) {
      const auto zk = zs[n].map(k);
      for (std::size_t mi = 0; mi < m; ++mi) {
        unflatten(support, mi, offset);
        const std::vector<double> col =
            circular_shift(dims, std::vector<double>(zk.begin(), zk.end()), offset);
        for (std::size_t t = 0; t < d; ++t)
          A(static_cast<Eigen::Index>(n * d + t), static_cast<Eigen::Index>(k * m + mi)) =
              col[t];
      }
    }
  }
  return A;
}

double dict_objective(const Eigen::MatrixXd& A, const std::vector<Eigen::VectorXd>& xs,
                      const std::vector<Eigen::VectorXd>& ds) {
  double acc = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) acc += 0.5 * (xs[j] - A * ds[j]).squaredNorm();
  return acc;
}

std::vector<Eigen::VectorXd> projected_gradient_dict(const Eigen::MatrixXd& A,
                                                     const std::vector<Eigen::VectorXd>& xs,
                                                     int filters, int support_count,
                                                     int max_iters) {
  const Eigen::MatrixXd G = A.transpose() * A;
  const double L = lipschitz_estimate(G);
  const std::size_t channels = xs.size();

  std::vector<Eigen::VectorXd> c(channels), d(channels);
  for (std::size_t j = 0; j < channels; ++j) {
    c[j] = A.transpose() * xs[j];
    d[j] = Eigen::VectorXd::Zero(A.cols());
  }

  double last_checked = dict_objective(A, xs, d);
  for (int it = 0; it < max_iters; ++it) {
    for (std::size_t j = 0; j < channels; ++j) d[j] -= (G * d[j] - c[j]) / L;
    // project each filter onto the unit ball, jointly across channels
    for (int k = 0; k < filters; ++k) {
      double sq = 0.0;
      for (std::size_t j = 0; j < channels; ++j)
        sq += d[j].segment(k * support_count, support_count).squaredNorm();
      if (sq > 1.0) {
        const double scale = 1.0 / std::sqrt(sq);
        for (std::size_t j = 0; j < channels; ++j)
          d[j].segment(k * support_count, support_count) *= scale;
      }
    }
    if (it % 50 == 49) {
      const double obj = dict_objective(A, xs, d);
      if (std::abs(last_checked - obj) <= 1e-12 * std::max(1.0, std::abs(obj))) break;
      last_checked = obj;
    }
  }
  return d;
}

Eigen::MatrixXd materialize_learning_operator(std::span<const SparseMaps> zs,
                                              const GridDims& support,
                                              std::span<const double> mu) {
  const Eigen::MatrixXd B = materialize_filter_system(zs, support);
  const std::size_t m = grid_count(support);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(B.rows(), B.rows());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const auto Bk = B.middleCols(static_cast<Eigen::Index>(k * m), static_cast<Eigen::Index>(m));
    A += (0.5 / mu[k]) * (Bk * Bk.transpose());
  }
  return A;
}

}  // namespace dcsc::oracle

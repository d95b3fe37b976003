#include "dcsc/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include "dcsc/grid.hpp"

namespace dcsc {

namespace {

// FFTW plan creation is not thread safe; executing a plan on fresh arrays is.
// Plans are created once per (dims, sign) with FFTW_ESTIMATE (deterministic)
// and FFTW_UNALIGNED (no alignment contract on caller buffers).
class PlanCache {
 public:
  fftw_plan get(const GridDims& dims, int sign) {
    std::scoped_lock lock(mutex_);
    const auto key = std::make_pair(dims, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    const std::size_t n = grid_count(dims);
    fftw_complex* scratch_in = fftw_alloc_complex(n);
    fftw_complex* scratch_out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch_in,
                                   scratch_out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch_in);
    fftw_free(scratch_out);
    if (!plan) throw NumericError("FFTW failed to create a plan for the requested grid");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<GridDims, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

std::vector<std::complex<double>>& scratch_buffer(std::size_t n) {
  thread_local std::vector<std::complex<double>> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void forward_dft(const GridDims& dims, std::span<const double> values,
                 std::span<std::complex<double>> out) {
  const std::size_t n = grid_count(dims);
  if (values.size() != n || out.size() != n)
    throw DimensionError("forward_dft: input length must equal the grid count");
  fftw_plan plan = plan_cache().get(dims, FFTW_FORWARD);
  auto& in = scratch_buffer(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = {values[i], 0.0};
  fftw_execute_dft(plan, as_fftw(in.data()), as_fftw(out.data()));
}

Spectrum forward_dft(const GridDims& dims, std::span<const double> values) {
  Spectrum s(dims);
  forward_dft(dims, values, s.values);
  return s;
}

void inverse_dft(const Spectrum& s, std::span<double> out) {
  const std::size_t n = grid_count(s.dims);
  if (s.values.size() != n || out.size() != n)
    throw DimensionError("inverse_dft: spectrum length must equal the grid count");
  fftw_plan plan = plan_cache().get(s.dims, FFTW_BACKWARD);
  auto& buf = scratch_buffer(2 * n);
  std::memcpy(buf.data(), s.values.data(), n * sizeof(std::complex<double>));
  fftw_execute_dft(plan, as_fftw(buf.data()), as_fftw(buf.data() + n));

  const double scale = 1.0 / static_cast<double>(n);
  double real_sq = 0.0, imag_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = buf[n + i].real() * scale;
    const double im = buf[n + i].imag() * scale;
    out[i] = re;
    real_sq += re * re;
    imag_sq += im * im;
  }
  const double imag_norm = std::sqrt(imag_sq);
  const double real_norm = std::sqrt(real_sq);
  if (imag_norm > 1e-8 * std::max(real_norm, 1e-8))
    throw NumericError("inverse_dft: imaginary residue above threshold; input is not the spectrum of a real signal");
}

std::vector<double> inverse_dft(const Spectrum& s) {
  std::vector<double> out(grid_count(s.dims));
  inverse_dft(s, out);
  return out;
}

std::vector<double> pad_filter(std::span<const double> filter, const GridDims& support,
                               const GridDims& dims) {
  if (support.size() != dims.size())
    throw DimensionError("pad_filter: support and grid rank differ");
  for (std::size_t a = 0; a < dims.size(); ++a)
    if (support[a] > dims[a]) throw DimensionError("pad_filter: support larger than grid");
  const std::size_t m = grid_count(support);
  if (filter.size() != m) throw DimensionError("pad_filter: filter length must equal the support count");

  std::vector<double> out(grid_count(dims), 0.0);
  std::vector<int> coords(support.size(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    unflatten(support, i, coords);
    out[flatten(dims, coords)] = filter[i];
  }
  return out;
}

std::vector<double> crop_filter(std::span<const double> values, const GridDims& dims,
                                const GridDims& support) {
  if (support.size() != dims.size())
    throw DimensionError("crop_filter: support and grid rank differ");
  for (std::size_t a = 0; a < dims.size(); ++a)
    if (support[a] > dims[a]) throw DimensionError("crop_filter: support larger than grid");
  if (values.size() != grid_count(dims))
    throw DimensionError("crop_filter: input length must equal the grid count");

  const std::size_t m = grid_count(support);
  std::vector<double> out(m);
  std::vector<int> coords(support.size(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    unflatten(support, i, coords);
    out[i] = values[flatten(dims, coords)];
  }
  return out;
}

Spectrum circulant_apply(const Spectrum& d_hat, const Spectrum& z_hat) {
  if (d_hat.dims != z_hat.dims) throw DimensionError("circulant_apply: dims mismatch");
  Spectrum out(d_hat.dims);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = d_hat.values[i] * z_hat.values[i];
  return out;
}

Spectrum circulant_apply_adjoint(const Spectrum& d_hat, const Spectrum& z_hat) {
  if (d_hat.dims != z_hat.dims) throw DimensionError("circulant_apply: dims mismatch");
  Spectrum out(d_hat.dims);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] = std::conj(d_hat.values[i]) * z_hat.values[i];
  return out;
}

Spectrum filter_spectrum(const Dictionary& d, int k, int j, const GridDims& dims) {
  return forward_dft(dims, pad_filter(d.filter(k, j), d.support, dims));
}

bool conjugate_symmetric(const Spectrum& s, double tol) {
  const std::size_t n = grid_count(s.dims);
  double max_mag = 0.0;
  for (const auto& v : s.values) max_mag = std::max(max_mag, std::abs(v));
  const double bound = tol * std::max(max_mag, 1.0);

  std::vector<int> coords(s.dims.size(), 0);
  std::vector<int> reflected(s.dims.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    unflatten(s.dims, i, coords);
    for (std::size_t a = 0; a < s.dims.size(); ++a)
      reflected[a] = coords[a] == 0 ? 0 : s.dims[a] - coords[a];
    const auto mirror = std::conj(s.values[flatten(s.dims, reflected)]);
    if (std::abs(s.values[i] - mirror) > bound) return false;
  }
  return true;
}

}  // namespace dcsc

#pragma once
// DFT engine and circulant-operator algebra. A circular-convolution operator
// is diagonal in the DFT basis, so every large linear-system application in
// the solvers becomes elementwise spectral work.
//
// Convention: unnormalized forward transform, 1/D inverse. The Parseval
// identity ||x||^2 = (1/D)||x_hat||^2 pins this testably.

#include <complex>

#include "dcsc/types.hpp"

namespace dcsc {

struct Spectrum {
  GridDims dims;
  std::vector<std::complex<double>> values;  // one bin per grid point, row-major

  Spectrum() = default;
  explicit Spectrum(GridDims grid) : dims(std::move(grid)) {
    values.assign(dcsc::grid_count(dims), {0.0, 0.0});
  }
  std::size_t size() const { return values.size(); }
};

// Multi-dimensional unnormalized forward DFT of one real grid slice.
Spectrum forward_dft(const GridDims& dims, std::span<const double> values);

// Scaled (1/D) inverse. The imaginary residue of a conjugate-symmetric input
// is discarded after asserting it is small; larger residue throws
// NumericError.
std::vector<double> inverse_dft(const Spectrum& s);

// Non-allocating variants used by the solver loops. Output spans must have
// grid_count(dims) elements.
void forward_dft(const GridDims& dims, std::span<const double> values,
                 std::span<std::complex<double>> out);
void inverse_dft(const Spectrum& s, std::span<double> out);

// Zero-pads a filter into the low-index corner of the full grid; crop is its
// exact adjoint: <pad(a), b> = <a, crop(b)>.
std::vector<double> pad_filter(std::span<const double> filter, const GridDims& support,
                               const GridDims& dims);
std::vector<double> crop_filter(std::span<const double> values, const GridDims& dims,
                                const GridDims& support);

// Elementwise spectral product: the spectrum of the circular convolution
// d * z. Conjugating the first argument gives the adjoint (correlation).
Spectrum circulant_apply(const Spectrum& d_hat, const Spectrum& z_hat);
Spectrum circulant_apply_adjoint(const Spectrum& d_hat, const Spectrum& z_hat);

// Spectrum of filter k / channel j zero-padded onto the given grid.
Spectrum filter_spectrum(const Dictionary& d, int k, int j, const GridDims& dims);

// Conjugate-symmetry check for spectra of real signals, relative tolerance.
bool conjugate_symmetric(const Spectrum& s, double tol = 1e-10);

}  // namespace dcsc

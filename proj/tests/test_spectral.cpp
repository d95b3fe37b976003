#include <doctest.h>

#include <complex>
#include <random>

#include "dcsc/oracle.hpp"
#include "dcsc/spectral.hpp"
#include "test_util.hpp"

using namespace dcsc;
using testutil::urand;

TEST_SUITE_BEGIN("spectral");

TEST_CASE("forward_dft of a unit impulse is the all-ones spectrum") {
  std::vector<double> x(8, 0.0);
  x[0] = 1.0;
  const Spectrum s = forward_dft({8}, x);
  for (const auto& v : s.values) {
    CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("forward_dft of a constant signal concentrates at the zero bin") {
  const double c = 0.37;
  std::vector<double> x(12, c);
  const Spectrum s = forward_dft({12}, x);
  CHECK(s.values[0].real() == doctest::Approx(12.0 * c).epsilon(1e-13));
  for (std::size_t i = 1; i < s.values.size(); ++i)
    CHECK(std::abs(s.values[i]) < 1e-12);
}

TEST_CASE("forward_dft matches the direct O(D^2) summation") {
  std::mt19937_64 rng(101);
  for (const GridDims& dims : {GridDims{8}, GridDims{4, 6}, GridDims{3, 4, 2}}) {
    std::vector<double> x(grid_count(dims));
    for (double& v : x) v = urand(rng);
    const Spectrum s = forward_dft(dims, x);
    const auto direct = oracle::direct_dft(dims, x);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(std::abs(s.values[i] - direct[i]) < 1e-10);
  }
}

TEST_CASE("inverse_dft round trip") {
  std::mt19937_64 rng(102);
  for (const GridDims& dims : {GridDims{16}, GridDims{8, 8}, GridDims{4, 3, 5}}) {
    std::vector<double> x(grid_count(dims));
    for (double& v : x) v = urand(rng);
    const std::vector<double> back = inverse_dft(forward_dft(dims, x));
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      num += (back[i] - x[i]) * (back[i] - x[i]);
      den += x[i] * x[i];
    }
    CHECK(std::sqrt(num / den) < 1e-12);
  }
}

TEST_CASE("inverse_dft of the all-ones spectrum is the unit impulse") {
  Spectrum s({6});
  for (auto& v : s.values) v = {1.0, 0.0};
  const auto x = inverse_dft(s);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(std::abs(x[i]) < 1e-14);
}

TEST_CASE("inverse_dft of (D, 0, ...) is the constant 1 signal") {
  Spectrum s({9});
  s.values[0] = {9.0, 0.0};
  const auto x = inverse_dft(s);
  for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("inverse_dft rejects a spectrum with large imaginary residue") {
  Spectrum s({4});
  s.values[1] = {0.0, 1.0};  // mirror bin 3 stays zero: not conjugate symmetric
  CHECK_THROWS_AS(inverse_dft(s), NumericError);
}

TEST_CASE("pad_filter places a 1x1 filter at the corner") {
  const std::vector<double> f{0.7};
  const auto p = pad_filter(f, {1}, {4});
  CHECK(p == std::vector<double>{0.7, 0.0, 0.0, 0.0});
}

TEST_CASE("crop_filter inverts pad_filter") {
  std::mt19937_64 rng(103);
  std::vector<double> f(6);
  for (double& v : f) v = urand(rng);
  const auto p = pad_filter(f, {2, 3}, {5, 7});
  const auto back = crop_filter(p, {5, 7}, {2, 3});
  CHECK(back == f);
}

TEST_CASE("pad/crop adjoint identity <pad(a), b> = <a, crop(b)>") {
  std::mt19937_64 rng(104);
  const GridDims support{3, 2}, dims{6, 5};
  std::vector<double> a(grid_count(support)), b(grid_count(dims));
  for (double& v : a) v = urand(rng);
  for (double& v : b) v = urand(rng);
  const auto pa = pad_filter(a, support, dims);
  const auto cb = crop_filter(b, dims, support);
  double lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < b.size(); ++i) lhs += pa[i] * b[i];
  for (std::size_t i = 0; i < a.size(); ++i) rhs += a[i] * cb[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("pad_filter rejects a support larger than the grid") {
  CHECK_THROWS_AS(pad_filter(std::vector<double>(9, 0.0), {3, 3}, {2, 4}), DimensionError);
}

TEST_CASE("circulant_apply with an impulse filter is the identity") {
  std::mt19937_64 rng(105);
  std::vector<double> z(8);
  for (double& v : z) v = urand(rng);
  std::vector<double> d(8, 0.0);
  d[0] = 1.0;
  const Spectrum out = circulant_apply(forward_dft({8}, d), forward_dft({8}, z));
  const auto spatial = inverse_dft(out);
  CHECK(testutil::max_abs_diff(spatial, z) < 1e-12);
}

TEST_CASE("circulant_apply with a shifted impulse circularly shifts the signal") {
  std::mt19937_64 rng(106);
  std::vector<double> z(8);
  for (double& v : z) v = urand(rng);
  std::vector<double> d(8, 0.0);
  d[1] = 1.0;  // impulse shifted by one sample
  const auto spatial = inverse_dft(circulant_apply(forward_dft({8}, d), forward_dft({8}, z)));
  const auto shifted = oracle::circular_shift({8}, z, {1});
  CHECK(testutil::max_abs_diff(spatial, shifted) < 1e-12);
}

TEST_CASE("circulant_apply equals direct circular convolution") {
  std::mt19937_64 rng(107);
  for (const GridDims& dims : {GridDims{8}, GridDims{4, 4}}) {
    std::vector<double> d(grid_count(dims)), z(grid_count(dims));
    for (double& v : d) v = urand(rng);
    for (double& v : z) v = urand(rng);
    const auto spectral = inverse_dft(circulant_apply(forward_dft(dims, d), forward_dft(dims, z)));
    const auto direct = oracle::direct_circular_convolution(dims, d, z);
    CHECK(testutil::max_abs_diff(spectral, direct) < 1e-10);
  }
}

TEST_CASE("Parseval identity pins the normalization convention") {
  std::mt19937_64 rng(108);
  const GridDims dims{6, 4};
  std::vector<double> x(grid_count(dims));
  for (double& v : x) v = urand(rng);
  const Spectrum s = forward_dft(dims, x);
  double spatial = 0, spectral = 0;
  for (double v : x) spatial += v * v;
  for (const auto& v : s.values) spectral += std::norm(v);
  CHECK(testutil::rel_err(spectral / static_cast<double>(x.size()), spatial) < 1e-10);
}

TEST_CASE("adjoint correctness <D_k u, v> = <u, D_k^T v> computed spectrally") {
  std::mt19937_64 rng(109);
  const GridDims dims{5, 6};
  std::vector<double> d(grid_count(dims)), u(grid_count(dims)), v(grid_count(dims));
  for (double& w : d) w = urand(rng);
  for (double& w : u) w = urand(rng);
  for (double& w : v) w = urand(rng);
  const Spectrum dh = forward_dft(dims, d);
  const auto Du = inverse_dft(circulant_apply(dh, forward_dft(dims, u)));
  const auto Dtv = inverse_dft(circulant_apply_adjoint(dh, forward_dft(dims, v)));
  double lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    lhs += Du[i] * v[i];
    rhs += u[i] * Dtv[i];
  }
  CHECK(testutil::rel_err(lhs, rhs) < 1e-10);
}

TEST_CASE("conjugate symmetry is preserved by circulant_apply") {
  std::mt19937_64 rng(110);
  const GridDims dims{4, 6};
  std::vector<double> a(grid_count(dims)), b(grid_count(dims));
  for (double& v : a) v = urand(rng);
  for (double& v : b) v = urand(rng);
  const Spectrum sa = forward_dft(dims, a), sb = forward_dft(dims, b);
  CHECK(conjugate_symmetric(sa));
  CHECK(conjugate_symmetric(sb));
  CHECK(conjugate_symmetric(circulant_apply(sa, sb)));
  CHECK(conjugate_symmetric(circulant_apply_adjoint(sa, sb)));

  Spectrum bad({4});
  bad.values[1] = {0.0, 1.0};
  CHECK_FALSE(conjugate_symmetric(bad));
}

TEST_SUITE_END();

#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "dcsc/coding.hpp"
#include "dcsc/objective.hpp"
#include "dcsc/oracle.hpp"
#include "test_util.hpp"

using namespace dcsc;
using testutil::random_dictionary;
using testutil::random_signal;
using testutil::rel_err;
using testutil::to_vec;
using testutil::urand;

namespace {

std::vector<Spectrum> dict_spectra(const Dictionary& d, const GridDims& dims) {
  std::vector<Spectrum> out(d.filters);
  for (int k = 0; k < d.filters; ++k) out[k] = filter_spectrum(d, k, 0, dims);
  return out;
}

std::vector<Spectrum> zero_spectra(int count, const GridDims& dims) {
  return std::vector<Spectrum>(count, Spectrum(dims));
}

// D^T lambda from a spatial lambda, via the spectra
std::vector<double> dt_lambda_of(const Dictionary& d, const GridDims& dims,
                                 std::span<const double> lambda) {
  return apply_dictionary_adjoint(dict_spectra(d, dims), forward_dft(dims, lambda));
}

}  // namespace

TEST_SUITE_BEGIN("coding");

TEST_CASE("lambda update with an impulse dictionary halves the negated signal") {
  // K = 1, d = impulse, rho = 1, theta = z = 0: (DD^T + I) lambda = -x
  std::mt19937_64 rng(31);
  const GridDims dims{8};
  Dictionary d(1, {3}, 1);
  d.filter(0)[0] = 1.0;
  const SignalTensor x = random_signal(dims, 1, rng);
  const auto lambda = lambda_update(dict_spectra(d, dims), zero_spectra(1, dims),
                                    zero_spectra(1, dims), forward_dft(dims, x.channel(0)), 1.0);
  for (std::size_t i = 0; i < lambda.size(); ++i)
    CHECK(lambda[i] == doctest::Approx(-0.5 * x.values[i]).epsilon(1e-12));
}

TEST_CASE("lambda update vanishes when the right-hand side cancels") {
  // impulse dictionary, rho = 2, theta = 0, z = x: D theta + D z/rho - x/rho = 0
  std::mt19937_64 rng(32);
  const GridDims dims{6};
  Dictionary d(1, {2}, 1);
  d.filter(0)[0] = 1.0;
  const SignalTensor x = random_signal(dims, 1, rng);
  std::vector<Spectrum> z_hat{forward_dft(dims, x.channel(0))};
  const auto lambda = lambda_update(dict_spectra(d, dims), zero_spectra(1, dims), z_hat,
                                    forward_dft(dims, x.channel(0)), 2.0);
  for (double v : lambda) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("lambda update matches the dense solve of the same D-sized system") {
  std::mt19937_64 rng(33);
  const GridDims dims{8};
  const Dictionary d = random_dictionary(2, {3}, 1, rng);
  const SignalTensor x = random_signal(dims, 1, rng);
  const double rho = 0.4;

  std::vector<double> theta(16), z(16);
  for (double& v : theta) v = urand(rng);
  for (double& v : z) v = urand(rng);
  std::vector<Spectrum> theta_hat(2), z_hat(2);
  for (int k = 0; k < 2; ++k) {
    theta_hat[k] = forward_dft(dims, std::span<const double>(theta.data() + 8 * k, 8));
    z_hat[k] = forward_dft(dims, std::span<const double>(z.data() + 8 * k, 8));
  }
  const auto lambda = lambda_update(dict_spectra(d, dims), theta_hat, z_hat,
                                    forward_dft(dims, x.channel(0)), rho);

  const auto p = oracle::materialize(d, dims);
  const Eigen::MatrixXd lhs =
      p.D_mat * p.D_mat.transpose() + Eigen::MatrixXd::Identity(8, 8) / rho;
  const Eigen::VectorXd rhs =
      p.D_mat * (to_vec(theta) + to_vec(z) / rho) - to_vec(x.values) / rho;
  const Eigen::VectorXd dense = lhs.ldlt().solve(rhs);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(lambda[i] - dense[i]) < 1e-10);
}

TEST_CASE("lambda update rejects non-finite filter spectra") {
  const GridDims dims{4};
  std::vector<Spectrum> d_hat(1, Spectrum(dims));
  d_hat[0].values[2] = {std::nan(""), 0.0};
  const std::vector<Spectrum> zero(1, Spectrum(dims));
  CHECK_THROWS_AS(lambda_update(d_hat, zero, zero, Spectrum(dims), 1.0), NumericError);
}

TEST_CASE("theta update clamps onto the l-infinity ball") {
  const std::vector<double> t{0.5, -2.0, 0.05};
  const std::vector<double> z(3, 0.0);
  const auto theta = theta_update(t, z, 1.0, 0.1);
  CHECK(theta == std::vector<double>{0.1, -0.1, 0.05});
}

TEST_CASE("theta update keeps interior points and fixes the zero point") {
  const std::vector<double> inside{0.02, -0.05, 0.0};
  const std::vector<double> z(3, 0.0);
  CHECK(theta_update(inside, z, 0.5, 0.1) == inside);

  const std::vector<double> zeros(3, 0.0);
  CHECK(theta_update(zeros, zeros, 1.0, 0.1) == zeros);
}

TEST_CASE("z update is the exact multiplier step") {
  std::vector<double> z{1.0, -1.0, 2.0};
  const std::vector<double> theta{0.5, 0.5, 0.5};

  SUBCASE("zero residual leaves z unchanged") {
    const std::vector<double> before = z;
    z_update(z, theta, theta, 0.7);
    CHECK(z == before);
  }
  SUBCASE("unit step adds the residual") {
    std::vector<double> z0(3, 0.0);
    const std::vector<double> t{0.1, 0.2, 0.3};
    z_update(z0, theta, t, 1.0);
    for (int i = 0; i < 3; ++i) CHECK(z0[i] == doctest::Approx(theta[i] - t[i]));
  }
  SUBCASE("two updates compose additively") {
    std::vector<double> za(3, 0.25), zb(3, 0.25);
    const std::vector<double> t{0.0, 0.1, -0.1};
    z_update(za, theta, t, 0.3);
    z_update(za, theta, t, 0.3);
    z_update(zb, theta, t, 0.6);
    for (int i = 0; i < 3; ++i) CHECK(za[i] == doctest::Approx(zb[i]).epsilon(1e-14));
  }
}

TEST_CASE("inactive constraint: large beta gives z = 0 and lambda = -x") {
  std::mt19937_64 rng(34);
  const GridDims dims{8, 8};
  const Dictionary d = random_dictionary(2, {3, 3}, 1, rng);
  const SignalTensor x = random_signal(dims, 1, rng);
  const auto dtx = dt_lambda_of(d, dims, x.values);
  double dtx_inf = 0;
  for (double v : dtx) dtx_inf = std::max(dtx_inf, std::abs(v));

  SolverConfig cfg;
  cfg.beta = 1.5 * dtx_inf;
  cfg.rho = 0.5;
  cfg.max_admm = 4000;
  CodingStats stats;
  const SparseMaps z = solve_coding(x, d, cfg, &stats);
  CodingDualState state;
  const SparseMaps z2 = solve_coding(x, d, cfg, state, nullptr);

  for (double v : z.values) CHECK(std::abs(v) < 1e-8);
  double lam_err = 0;
  for (std::size_t i = 0; i < x.values.size(); ++i)
    lam_err = std::max(lam_err, std::abs(state.lambda[i] + x.values[i]));
  CHECK(lam_err < 1e-3);
  CHECK(z2.values == z.values);
}

TEST_CASE("zero signal codes to zero maps and zero dual") {
  std::mt19937_64 rng(35);
  const GridDims dims{6, 6};
  const Dictionary d = random_dictionary(2, {3, 3}, 1, rng);
  const SignalTensor x(dims, 1);
  SolverConfig cfg;
  cfg.beta = 0.1;
  CodingDualState state;
  CodingStats stats;
  const SparseMaps z = solve_coding(x, d, cfg, state, &stats);
  for (double v : z.values) CHECK(v == 0.0);
  for (double v : state.lambda) CHECK(v == 0.0);
  CHECK(stats.converged);
}

TEST_CASE("coding objective matches the FISTA oracle") {
  std::mt19937_64 rng(36);
  const GridDims dims{8, 8};
  for (double beta : {0.05, 0.1, 0.5}) {
    const Dictionary d = random_dictionary(3, {3, 3}, 1, rng);
    const SignalTensor x = random_signal(dims, 1, rng);
    SolverConfig cfg;
    cfg.beta = beta;
    cfg.rho = 0.1;
    cfg.max_admm = 6000;
    const SparseMaps z = solve_coding(x, d, cfg, nullptr);
    const double ours = evaluate_objective(x, d, z, beta).total;

    const auto p = oracle::materialize(d, dims);
    const Eigen::VectorXd zf = oracle::fista_lasso(p.D_mat, to_vec(x.values), beta, 30000);
    const double reference = oracle::lasso_objective(p.D_mat, to_vec(x.values), beta, zf);
    CHECK(rel_err(ours, reference) < 1e-3);
  }
}

TEST_CASE("dual feasibility and support stationarity hold at exit") {
  std::mt19937_64 rng(37);
  const GridDims dims{8, 8};
  const Dictionary d = random_dictionary(3, {3, 3}, 1, rng);
  const SignalTensor x = random_signal(dims, 1, rng);
  SolverConfig cfg;
  cfg.beta = 0.1;
  cfg.rho = 0.1;
  cfg.max_admm = 8000;
  CodingDualState state;
  CodingStats stats;
  const SparseMaps z = solve_coding(x, d, cfg, state, &stats);

  // ||theta||_inf <= beta exactly: the projection output
  double theta_inf = 0;
  for (double v : state.theta) theta_inf = std::max(theta_inf, std::abs(v));
  CHECK(theta_inf <= cfg.beta);

  // ||D^T lambda||_inf <= beta + 1e-6 after the exit safeguard
  const auto dt = dt_lambda_of(d, dims, state.lambda);
  double dt_inf = 0;
  for (double v : dt) dt_inf = std::max(dt_inf, std::abs(v));
  CHECK(dt_inf <= cfg.beta + 1e-6);

  // KKT complementarity on the support
  for (std::size_t i = 0; i < z.values.size(); ++i)
    if (std::abs(z.values[i]) > 1e-6) CHECK(std::abs(dt[i]) >= cfg.beta - 1e-4);

  // strong duality
  const double primal = evaluate_objective(x, d, z, cfg.beta).total;
  CHECK((primal - stats.dual_objective) / primal < 1e-3);
  CHECK(primal - stats.dual_objective > -1e-9);  // weak duality, up to roundoff
}

TEST_CASE("solution is equivariant under circular shifts of the signal") {
  std::mt19937_64 rng(38);
  const GridDims dims{8, 8};
  const Dictionary d = random_dictionary(2, {3, 3}, 1, rng);
  const SignalTensor x = random_signal(dims, 1, rng);
  const std::vector<int> shift{3, 5};
  SignalTensor xs(dims, 1);
  const auto shifted = oracle::circular_shift(dims, x.channel(0), shift);
  std::copy(shifted.begin(), shifted.end(), xs.channel(0).begin());

  SolverConfig cfg;
  cfg.beta = 0.1;
  cfg.rho = 0.1;
  cfg.max_admm = 8000;
  const SparseMaps z = solve_coding(x, d, cfg, nullptr);
  const SparseMaps zs = solve_coding(xs, d, cfg, nullptr);
  for (int k = 0; k < 2; ++k) {
    const auto zk_shifted = oracle::circular_shift(dims, z.map(k), shift);
    CHECK(testutil::max_abs_diff(zs.map(k), zk_shifted) < 1e-4);
  }
}

TEST_CASE("an all-zero dictionary is flagged and solved in closed form") {
  std::mt19937_64 rng(39);
  const GridDims dims{6, 6};
  const Dictionary d(2, {3, 3}, 1);  // all zeros
  const SignalTensor x = random_signal(dims, 1, rng);
  SolverConfig cfg;
  cfg.beta = 0.2;
  CodingDualState state;
  CodingStats stats;
  const SparseMaps z = solve_coding(x, d, cfg, state, &stats);
  CHECK(stats.degenerate_dictionary);
  for (double v : z.values) CHECK(v == 0.0);
  for (std::size_t i = 0; i < x.values.size(); ++i)
    CHECK(state.lambda[i] == doctest::Approx(-x.values[i]));
}

TEST_CASE("warm starts resume near the solution") {
  std::mt19937_64 rng(40);
  const GridDims dims{8, 8};
  const Dictionary d = random_dictionary(2, {3, 3}, 1, rng);
  const SignalTensor x = random_signal(dims, 1, rng);
  SolverConfig cfg;
  cfg.beta = 0.1;
  cfg.rho = 0.1;
  cfg.max_admm = 8000;
  CodingDualState state;
  CodingStats cold, warm;
  solve_coding(x, d, cfg, state, &cold);
  solve_coding(x, d, cfg, state, &warm);
  CHECK(warm.admm_iters <= cold.admm_iters);
  CHECK(warm.admm_iters < 50);
}

TEST_CASE("state spectra caches stay consistent with the spatial values") {
  std::mt19937_64 rng(41);
  const GridDims dims{6, 6};
  const Dictionary d = random_dictionary(2, {3, 3}, 1, rng);
  const SignalTensor x = random_signal(dims, 1, rng);
  SolverConfig cfg;
  cfg.beta = 0.05;
  cfg.max_admm = 40;
  CodingDualState state;
  solve_coding(x, d, cfg, state, nullptr);
  const std::size_t n = grid_count(dims);
  for (int k = 0; k < 2; ++k) {
    const Spectrum th = forward_dft(dims, std::span<const double>(state.theta.data() + k * n, n));
    const Spectrum zh = forward_dft(dims, std::span<const double>(state.z.data() + k * n, n));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(th.values[i] - state.theta_hat[k].values[i]) < 1e-10);
      CHECK(std::abs(zh.values[i] - state.z_hat[k].values[i]) < 1e-10);
    }
  }
}

TEST_SUITE_END();

#include <doctest.h>

#include <random>

#include "dcsc/oracle.hpp"
#include "dcsc/spectral.hpp"
#include "test_util.hpp"

using namespace dcsc;
using testutil::random_dictionary;
using testutil::random_maps;
using testutil::to_vec;
using testutil::urand;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("materialize of an impulse filter gives identity blocks") {
  Dictionary d(1, {1}, 1);
  d.values[0] = 1.0;
  const auto p = oracle::materialize(d, {5});
  CHECK(p.D_mat.isApprox(Eigen::MatrixXd::Identity(5, 5)));
}

TEST_CASE("materialize of a shift-by-one filter gives a circular permutation") {
  Dictionary d(1, {2}, 1);
  d.values[1] = 1.0;  // impulse at offset 1
  const auto p = oracle::materialize(d, {4});
  Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) perm((i + 1) % 4, i) = 1.0;
  CHECK(p.D_mat.isApprox(perm));
}

TEST_CASE("materialized matrix action equals the spectral pipeline") {
  std::mt19937_64 rng(21);
  const GridDims dims{8};
  const Dictionary d = random_dictionary(2, {3}, 1, rng);
  const auto p = oracle::materialize(d, dims);

  Eigen::VectorXd zv(2 * 8);
  for (int i = 0; i < zv.size(); ++i) zv[i] = urand(rng);
  const Eigen::VectorXd dense = p.D_mat * zv;

  Spectrum acc(dims);
  for (int k = 0; k < 2; ++k) {
    const Spectrum dh = filter_spectrum(d, k, 0, dims);
    const Spectrum zh = forward_dft(dims, std::span<const double>(zv.data() + k * 8, 8));
    const Spectrum prod = circulant_apply(dh, zh);
    for (std::size_t i = 0; i < acc.size(); ++i) acc.values[i] += prod.values[i];
  }
  const auto spectral = inverse_dft(acc);
  for (int i = 0; i < 8; ++i) CHECK(dense[i] == doctest::Approx(spectral[i]).epsilon(1e-10));
}

TEST_CASE("column metadata ties columns to filter and shift") {
  const oracle::DenseProblem p{Eigen::MatrixXd::Zero(1, 1), {4}, 3, 1};
  CHECK(p.column_id(0) == std::pair<int, std::size_t>{0, 0});
  CHECK(p.column_id(5) == std::pair<int, std::size_t>{1, 1});
  CHECK(p.column_id(11) == std::pair<int, std::size_t>{2, 3});
}

TEST_CASE("materialize refuses huge grids") {
  Dictionary d(1, {1, 1}, 1);
  d.values[0] = 1.0;
  CHECK_THROWS_AS(oracle::materialize(d, {65, 65}), std::invalid_argument);
}

TEST_CASE("fista on the scalar problem is the closed-form shrinkage") {
  Eigen::MatrixXd D(1, 1);
  D << 1.0;
  Eigen::VectorXd x(1);
  x << 1.0;
  const Eigen::VectorXd z = oracle::fista_lasso(D, x, 0.3, 5000);
  CHECK(z[0] == doctest::Approx(0.7).epsilon(1e-8));
}

TEST_CASE("fista returns zero when beta dominates") {
  std::mt19937_64 rng(22);
  const Dictionary d = random_dictionary(2, {3}, 1, rng);
  const auto p = oracle::materialize(d, {8});
  Eigen::VectorXd x(8);
  for (int i = 0; i < 8; ++i) x[i] = urand(rng);
  const double beta = 1.01 * (p.D_mat.transpose() * x).lpNorm<Eigen::Infinity>();
  const Eigen::VectorXd z = oracle::fista_lasso(p.D_mat, x, beta, 5000);
  CHECK(z.lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("the two LASSO oracles agree in objective") {
  std::mt19937_64 rng(23);
  const GridDims dims{8, 8};
  for (int trial = 0; trial < 3; ++trial) {
    const Dictionary d = random_dictionary(3, {3, 3}, 1, rng);
    const auto p = oracle::materialize(d, dims);
    Eigen::VectorXd x(64);
    for (int i = 0; i < 64; ++i) x[i] = urand(rng);
    const double beta = 0.1;
    const Eigen::VectorXd zf = oracle::fista_lasso(p.D_mat, x, beta, 30000);
    const Eigen::VectorXd zc = oracle::coordinate_descent_lasso(p.D_mat, x, beta, 30000);
    const double of = oracle::lasso_objective(p.D_mat, x, beta, zf);
    const double oc = oracle::lasso_objective(p.D_mat, x, beta, zc);
    CHECK(testutil::rel_err(of, oc) < 1e-6);
  }
}

TEST_CASE("projected gradient with zero maps keeps d = 0 and objective x-energy") {
  const GridDims dims{8};
  std::vector<SparseMaps> zs(1, SparseMaps(2, dims));
  const auto A = oracle::materialize_filter_system(zs, {3});
  std::mt19937_64 rng(24);
  std::vector<Eigen::VectorXd> xs(1, Eigen::VectorXd(8));
  for (int i = 0; i < 8; ++i) xs[0][i] = urand(rng);
  const auto d = oracle::projected_gradient_dict(A, xs, 2, 3, 1000);
  CHECK(d[0].lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(oracle::dict_objective(A, xs, d) == doctest::Approx(0.5 * xs[0].squaredNorm()));
}

TEST_CASE("projected gradient matches least squares when the constraint is inactive") {
  std::mt19937_64 rng(25);
  const GridDims dims{12};
  std::vector<SparseMaps> zs(1, random_maps(2, dims, rng, 0.6, 2.0));
  const auto A = oracle::materialize_filter_system(zs, {3});
  std::vector<Eigen::VectorXd> xs(1, Eigen::VectorXd(12));
  for (int i = 0; i < 12; ++i) xs[0][i] = 0.05 * urand(rng);  // small scale: interior optimum
  const auto d = oracle::projected_gradient_dict(A, xs, 2, 3, 200000);
  const Eigen::VectorXd ls = A.colPivHouseholderQr().solve(xs[0]);
  REQUIRE(ls.segment(0, 3).norm() < 1.0);
  REQUIRE(ls.segment(3, 3).norm() < 1.0);
  CHECK((d[0] - ls).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("projected gradient solves the rank-one impulse case in closed form") {
  std::mt19937_64 rng(26);
  const GridDims dims{10};
  std::vector<SparseMaps> zs(1, SparseMaps(1, dims));
  zs[0].values[0] = 1.0;  // unit impulse map
  const auto A = oracle::materialize_filter_system(zs, dims);  // M = D
  std::vector<Eigen::VectorXd> xs(1, Eigen::VectorXd(10));
  for (int i = 0; i < 10; ++i) xs[0][i] = 2.0 * urand(rng);
  const auto d = oracle::projected_gradient_dict(A, xs, 1, 10, 100000);
  const Eigen::VectorXd expected = xs[0] / std::max(1.0, xs[0].norm());
  CHECK((d[0] - expected).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("learning operator materialization is identity plus PSD") {
  std::mt19937_64 rng(27);
  const GridDims dims{8};
  std::vector<SparseMaps> zs(2, SparseMaps(2, dims));
  for (auto& z : zs) z = random_maps(2, dims, rng, 0.5);
  const std::vector<double> mu{0.8, 1.3};
  const auto A = oracle::materialize_learning_operator(zs, {3}, mu);
  CHECK(A.rows() == 16);
  CHECK(A.isApprox(A.transpose(), 1e-12));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  CHECK(es.eigenvalues().minCoeff() >= 1.0 - 1e-10);
}

TEST_SUITE_END();

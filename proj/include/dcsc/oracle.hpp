#pragma once
// Small-scale dense reference solvers used to verify the spectral dual
// solvers: explicit circulant materializations, direct transforms, two
// independent LASSO solvers, and a projected-gradient dictionary solver.
// Single-threaded, deliberately free of FFT machinery, and never used on
// performance paths.

#include <Eigen/Dense>
#include <complex>

#include "dcsc/types.hpp"

namespace dcsc::oracle {

// Refuse accidental materialization of huge grids.
inline constexpr std::size_t kMaxMaterializeCount = 4096;

struct DenseProblem {
  Eigen::MatrixXd D_mat;  // (J*D) x (K*D); channel blocks stacked over rows
  GridDims dims;
  int filters = 0;
  int channels = 1;

  // column k*D + s corresponds to filter k circularly shifted by flat offset s
  std::pair<int, std::size_t> column_id(std::size_t col) const {
    const std::size_t d = grid_count(dims);
    return {static_cast<int>(col / d), col % d};
  }
};

DenseProblem materialize(const Dictionary& d, const GridDims& dims);

// Direct O(D^2) reference transforms.
std::vector<std::complex<double>> direct_dft(const GridDims& dims,
                                             std::span<const double> values);
std::vector<double> direct_circular_convolution(const GridDims& dims,
                                                std::span<const double> a,
                                                std::span<const double> b);

// out[(t + shift) mod dims] = v[t]
std::vector<double> circular_shift(const GridDims& dims, std::span<const double> v,
                                   const std::vector<int>& shift);

// 1/2 ||x - D z||^2 + beta ||z||_1
double lasso_objective(const Eigen::MatrixXd& D, const Eigen::VectorXd& x, double beta,
                       const Eigen::VectorXd& z);

// Two independent reference solvers for the coding subproblem. Both run to an
// objective plateau; neither shares code with the dual ADMM path.
Eigen::VectorXd fista_lasso(const Eigen::MatrixXd& D, const Eigen::VectorXd& x, double beta,
                            int max_iters);
Eigen::VectorXd coordinate_descent_lasso(const Eigen::MatrixXd& D, const Eigen::VectorXd& x,
                                         double beta, int max_sweeps);

// Dense map from stacked cropped filters (K*M) to stacked reconstructions
// (N*D): column k*M + m is z_k of image n shifted by support offset m.
// This is Z S^T materialized.
Eigen::MatrixXd materialize_filter_system(std::span<const SparseMaps> zs,
                                          const GridDims& support);

// 1/2 sum_j ||x_j - A d_j||^2
double dict_objective(const Eigen::MatrixXd& A, const std::vector<Eigen::VectorXd>& xs,
                      const std::vector<Eigen::VectorXd>& ds);

// Projected gradient for the learning subproblem: minimizes the dict
// objective subject to per-filter l2 balls taken jointly across channels.
// Returns one stacked filter vector (K*M) per channel.
std::vector<Eigen::VectorXd> projected_gradient_dict(const Eigen::MatrixXd& A,
                                                     const std::vector<Eigen::VectorXd>& xs,
                                                     int filters, int support_count,
                                                     int max_iters);

// Dense (N*D) x (N*D) learning operator I + sum_k 1/(2 mu_k) Z_k S_k^T S_k Z_k^T.
Eigen::MatrixXd materialize_learning_operator(std::span<const SparseMaps> zs,
                                              const GridDims& support,
                                              std::span<const double> mu);

}  // namespace dcsc::oracle

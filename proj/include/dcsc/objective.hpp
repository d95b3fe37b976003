#pragma once
// Reconstruction and objective evaluation for the CSC model. Both work
// entirely in the spatial domain so DFT normalization conventions cannot
// leak into correctness checks.

#include "dcsc/types.hpp"

namespace dcsc {

// sum_k d_k * z_k with circular boundary, evaluated per channel.
SignalTensor reconstruct(const Dictionary& d, const SparseMaps& z);

// 1/2 ||x - sum_k d_k * z_k||^2 + beta * sum_k ||z_k||_1
ObjectiveBreakdown evaluate_objective(const SignalTensor& x, const Dictionary& d,
                                      const SparseMaps& z, double beta);

// Learning data term 1/2 sum_n ||x_n - reconstruct(d, z_n)||^2.
double learning_data_term(std::span<const SignalTensor> xs, const Dictionary& d,
                          std::span<const SparseMaps> zs);

}  // namespace dcsc

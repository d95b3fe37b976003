#pragma once
// CSCT tensor container: magic "CSCT", u32 version = 1, u8 ndim, u64 dims,
// float64 little-endian payload, row-major. Channel and filter axes lead:
// dictionaries are stored [K, J, m...], maps [K, n...], signals [J, n...].

#include <cstdint>

#include "dcsc/types.hpp"

namespace dcsc {

struct TensorData {
  std::vector<std::uint64_t> dims;
  std::vector<double> values;
};

void write_tensor(const std::string& path, const TensorData& t);
TensorData read_tensor(const std::string& path);

TensorData to_tensor(const Dictionary& d);
TensorData to_tensor(const SparseMaps& z);
TensorData to_tensor(const SignalTensor& x);

Dictionary dictionary_from_tensor(const TensorData& t);
SparseMaps maps_from_tensor(const TensorData& t);
SignalTensor signal_from_tensor(const TensorData& t);

}  // namespace dcsc

#pragma once
// Flat-index <-> coordinate helpers for row-major grids.

#include "dcsc/types.hpp"

namespace dcsc {

inline std::size_t flatten(const GridDims& dims, std::span<const int> coords) {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < dims.size(); ++a)
    idx = idx * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(coords[a]);
  return idx;
}

inline void unflatten(const GridDims& dims, std::size_t index, std::span<int> coords) {
  for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(dims[a]);
    coords[a] = static_cast<int>(index % n);
    index /= n;
  }
}

// Odometer step over the grid; returns false after the last index.
inline bool next_index(const GridDims& dims, std::span<int> coords) {
  for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
    if (++coords[a] < dims[a]) return true;
    coords[a] = 0;
  }
  return false;
}

inline int wrap(int c, int n) {
  c %= n;
  return c < 0 ? c + n : c;
}

}  // namespace dcsc

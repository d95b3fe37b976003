#pragma once
// Dictionary mosaic rendering: filters tiled in a ceil(sqrt(K)) grid with
// 1-pixel black separators, each filter min-max scaled to [0, 255].

#include "dcsc/types.hpp"

namespace dcsc {

struct Mosaic {
  int height = 0;
  int width = 0;
  int channels = 1;                   // 1 (gray) or 3 (RGB)
  std::vector<unsigned char> pixels;  // interleaved when channels = 3
};

// For square m x m filters the mosaic is (ceil(sqrt(K)) * (m + 1) + 1) pixels
// per side. 1-D supports render as 1 x m cells; 3-D supports use slice 0.
Mosaic render_dictionary_mosaic(const Dictionary& d);

void write_dictionary_mosaic_png(const std::string& path, const Dictionary& d);

}  // namespace dcsc

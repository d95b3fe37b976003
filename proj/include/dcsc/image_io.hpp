#pragma once
// PNG and PGM image loading plus PNG export. Loaded values live in [0, 1];
// 2-D grids only, dims = {height, width}, J = 1 (gray) or 3 (RGB).

#include "dcsc/types.hpp"

namespace dcsc {

// dispatches on the file magic: PNG or PGM (P2/P5)
SignalTensor load_image(const std::string& path);

SignalTensor to_grayscale(const SignalTensor& x);  // Rec. 601 luma

void write_png_gray8(const std::string& path, int height, int width,
                     std::span<const unsigned char> pixels);
void write_png_rgb8(const std::string& path, int height, int width,
                    std::span<const unsigned char> pixels);  // interleaved RGB

// min-max scaled to [0, 255]; J = 3 writes RGB, anything else the channel mean
void write_image_png(const std::string& path, const SignalTensor& x);

}  // namespace dcsc

#include "dcsc/mosaic.hpp"

#include <algorithm>
#include <cmath>

#include "dcsc/image_io.hpp"

namespace dcsc {

Mosaic render_dictionary_mosaic(const Dictionary& d) {
  d.validate();
  // cell geometry: rows x cols of one filter tile
  int cell_h = 1, cell_w = 1;
  std::size_t slice_offset = 0, slice_count = d.support_count();
  if (d.support.size() == 1) {
    cell_h = 1;
    cell_w = d.support[0];
  } else if (d.support.size() == 2) {
    cell_h = d.support[0];
    cell_w = d.support[1];
  } else if (d.support.size() == 3) {
    cell_h = d.support[1];
    cell_w = d.support[2];
    slice_count = static_cast<std::size_t>(cell_h) * cell_w;  // slice 0 only
  } else {
    throw DimensionError("mosaic rendering supports 1-D, 2-D and 3-D filters");
  }

  const int grid = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d.filters))));
  const int channels = d.channels == 3 ? 3 : 1;

  Mosaic m;
  m.height = grid * (cell_h + 1) + 1;
  m.width = grid * (cell_w + 1) + 1;
  m.channels = channels;
  m.pixels.assign(static_cast<std::size_t>(m.height) * m.width * channels, 0);

  for (int k = 0; k < d.filters; ++k) {
    // per-filter min-max across every rendered channel
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (int j = 0; j < d.channels; ++j) {
      const auto f = d.filter(k, j);
      for (std::size_t i = slice_offset; i < slice_offset + slice_count; ++i) {
        if (first) {
          lo = hi = f[i];
          first = false;
        } else {
          lo = std::min(lo, f[i]);
          hi = std::max(hi, f[i]);
        }
      }
    }
    const double range = hi - lo;

    const int tile_r = k / grid, tile_c = k % grid;
    const int r0 = 1 + tile_r * (cell_h + 1);
    const int c0 = 1 + tile_c * (cell_w + 1);
    for (int r = 0; r < cell_h; ++r) {
      for (int c = 0; c < cell_w; ++c) {
        const std::size_t src = slice_offset + static_cast<std::size_t>(r) * cell_w + c;
        const std::size_t dst =
            (static_cast<std::size_t>(r0 + r) * m.width + (c0 + c)) * channels;
        for (int ch = 0; ch < channels; ++ch) {
          const int j = channels == 3 ? ch : 0;
          double v = 0.0;
          if (channels == 1 && d.channels > 1) {
            for (int jj = 0; jj < d.channels; ++jj) v += d.filter(k, jj)[src];
            v /= d.channels;
          } else {
            v = d.filter(k, j)[src];
          }
          const double s = range > 1e-300 ? (v - lo) / range : 0.0;
          m.pixels[dst + ch] =
              static_cast<unsigned char>(std::lround(255.0 * std::clamp(s, 0.0, 1.0)));
        }
      }
    }
  }
  return m;
}

void write_dictionary_mosaic_png(const std::string& path, const Dictionary& d) {
  const Mosaic m = render_dictionary_mosaic(d);
  if (m.channels == 3)
    write_png_rgb8(path, m.height, m.width, m.pixels);
  else
    write_png_gray8(path, m.height, m.width, m.pixels);
}

}  // namespace dcsc

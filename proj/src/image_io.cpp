#include "dcsc/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace dcsc {

namespace {

SignalTensor from_interleaved(const std::vector<unsigned char>& buf, int height, int width,
                              int channels, double maxval) {
  SignalTensor x(GridDims{height, width}, channels);
  const std::size_t d = static_cast<std::size_t>(height) * width;
  for (int j = 0; j < channels; ++j) {
    auto ch = x.channel(j);
    for (std::size_t i = 0; i < d; ++i)
      ch[i] = static_cast<double>(buf[i * channels + j]) / maxval;
  }
  return x;
}

SignalTensor load_png(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw IoError("cannot read PNG '" + path + "': " + image.message);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot decode PNG '" + path + "': " + image.message);
  }
  return from_interleaved(buf, static_cast<int>(image.height), static_cast<int>(image.width),
                          color ? 3 : 1, 255.0);
}

int pgm_next_int(std::istream& is, const std::string& path) {
  // skips whitespace and '#' comments
  while (true) {
    const int c = is.peek();
    if (c == EOF) throw IoError("truncated PGM header in '" + path + "'");
    if (std::isspace(c)) {
      is.get();
      continue;
    }
    if (c == '#') {
      std::string junk;
      std::getline(is, junk);
      continue;
    }
    break;
  }
  int v = 0;
  is >> v;
  if (!is) throw IoError("bad PGM header in '" + path + "'");
  return v;
}

SignalTensor load_pgm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  char m0 = 0, m1 = 0;
  is.get(m0).get(m1);
  if (m0 != 'P' || (m1 != '5' && m1 != '2')) throw IoError("'" + path + "' is not a PGM file");
  const bool binary = m1 == '5';
  const int width = pgm_next_int(is, path);
  const int height = pgm_next_int(is, path);
  const int maxval = pgm_next_int(is, path);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535)
    throw IoError("bad PGM geometry in '" + path + "'");

  SignalTensor x(GridDims{height, width}, 1);
  auto ch = x.channel(0);
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (binary) {
    is.get();  // single whitespace after maxval
    if (maxval < 256) {
      std::vector<unsigned char> buf(count);
      is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count));
      if (!is) throw IoError("truncated PGM payload in '" + path + "'");
      for (std::size_t i = 0; i < count; ++i) ch[i] = buf[i] / static_cast<double>(maxval);
    } else {
      std::vector<unsigned char> buf(2 * count);
      is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(2 * count));
      if (!is) throw IoError("truncated PGM payload in '" + path + "'");
      for (std::size_t i = 0; i < count; ++i) {
        const int v = (buf[2 * i] << 8) | buf[2 * i + 1];  // big-endian per spec
        ch[i] = v / static_cast<double>(maxval);
      }
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      int v = 0;
      is >> v;
      if (!is) throw IoError("truncated PGM payload in '" + path + "'");
      ch[i] = v / static_cast<double>(maxval);
    }
  }
  return x;
}

}  // namespace

SignalTensor load_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open '" + path + "'");
  unsigned char head[2] = {0, 0};
  probe.read(reinterpret_cast<char*>(head), 2);
  probe.close();
  if (head[0] == 0x89 && head[1] == 'P') return load_png(path);
  if (head[0] == 'P' && (head[1] == '5' || head[1] == '2')) return load_pgm(path);
  throw IoError("'" + path + "' is neither PNG nor PGM");
}

SignalTensor to_grayscale(const SignalTensor& x) {
  if (x.channels == 1) return x;
  if (x.channels != 3) throw DimensionError("to_grayscale expects 1 or 3 channels");
  SignalTensor g(x.dims, 1);
  const auto r = x.channel(0), gr = x.channel(1), b = x.channel(2);
  auto out = g.channel(0);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 0.299 * r[i] + 0.587 * gr[i] + 0.114 * b[i];
  return g;
}

void write_png_gray8(const std::string& path, int height, int width,
                     std::span<const unsigned char> pixels) {
  if (pixels.size() != static_cast<std::size_t>(height) * width)
    throw DimensionError("write_png_gray8: pixel count mismatch");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr))
    throw IoError("cannot write PNG '" + path + "': " + image.message);
}

void write_png_rgb8(const std::string& path, int height, int width,
                    std::span<const unsigned char> pixels) {
  if (pixels.size() != 3 * static_cast<std::size_t>(height) * width)
    throw DimensionError("write_png_rgb8: pixel count mismatch");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr))
    throw IoError("cannot write PNG '" + path + "': " + image.message);
}

void write_image_png(const std::string& path, const SignalTensor& x) {
  if (x.dims.size() != 2) throw DimensionError("write_image_png expects a 2-D grid");
  const int height = x.dims[0], width = x.dims[1];
  double lo = x.values.empty() ? 0.0 : x.values.front();
  double hi = lo;
  for (double v : x.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double range = hi - lo;
  auto to_byte = [&](double v) {
    const double s = range > 1e-300 ? (v - lo) / range : 0.0;
    return static_cast<unsigned char>(std::lround(255.0 * std::clamp(s, 0.0, 1.0)));
  };

  const std::size_t d = x.grid_count();
  if (x.channels == 3) {
    std::vector<unsigned char> buf(3 * d);
    for (int j = 0; j < 3; ++j) {
      const auto ch = x.channel(j);
      for (std::size_t i = 0; i < d; ++i) buf[3 * i + j] = to_byte(ch[i]);
    }
    write_png_rgb8(path, height, width, buf);
  } else {
    std::vector<unsigned char> buf(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (int j = 0; j < x.channels; ++j) acc += x.channel(j)[i];
      buf[i] = to_byte(acc / x.channels);
    }
    write_png_gray8(path, height, width, buf);
  }
}

}  // namespace dcsc

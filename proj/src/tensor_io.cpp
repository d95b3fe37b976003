#include "dcsc/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace dcsc {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'C', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

void write_tensor(const std::string& path, const TensorData& t) {
  if (t.dims.empty() || t.dims.size() > 255) throw IoError("tensor rank must be in [1, 255]");
  std::uint64_t count = 1;
  for (std::uint64_t d : t.dims) count *= d;
  if (count != t.values.size()) throw IoError("tensor payload does not match its dims");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  const unsigned char ndim = static_cast<unsigned char>(t.dims.size());
  os.write(reinterpret_cast<const char*>(&ndim), 1);
  for (std::uint64_t d : t.dims) put_u64(os, d);
  for (double v : t.values) put_u64(os, std::bit_cast<std::uint64_t>(v));
  if (!os) throw IoError("write failed for '" + path + "'");
}

TensorData read_tensor(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("'" + path + "' is not a CSCT tensor");
  const std::uint32_t version = get_u32(is);
  if (version != kVersion) throw IoError("unsupported CSCT version in '" + path + "'");
  unsigned char ndim = 0;
  is.read(reinterpret_cast<char*>(&ndim), 1);
  if (!is || ndim == 0) throw IoError("bad tensor rank in '" + path + "'");

  TensorData t;
  t.dims.resize(ndim);
  std::uint64_t count = 1;
  for (auto& d : t.dims) {
    d = get_u64(is);
    if (d == 0 || count > std::numeric_limits<std::uint64_t>::max() / d)
      throw IoError("bad tensor dims in '" + path + "'");
    count *= d;
  }
  t.values.resize(count);
  for (double& v : t.values) v = std::bit_cast<double>(get_u64(is));
  if (!is) throw IoError("truncated tensor payload in '" + path + "'");
  is.peek();
  if (!is.eof()) throw IoError("trailing bytes after tensor payload in '" + path + "'");
  return t;
}

TensorData to_tensor(const Dictionary& d) {
  TensorData t;
  t.dims = {static_cast<std::uint64_t>(d.filters), static_cast<std::uint64_t>(d.channels)};
  for (int m : d.support) t.dims.push_back(static_cast<std::uint64_t>(m));
  t.values = d.values;
  return t;
}

TensorData to_tensor(const SparseMaps& z) {
  TensorData t;
  t.dims = {static_cast<std::uint64_t>(z.maps)};
  for (int n : z.dims) t.dims.push_back(static_cast<std::uint64_t>(n));
  t.values = z.values;
  return t;
}

TensorData to_tensor(const SignalTensor& x) {
  TensorData t;
  t.dims = {static_cast<std::uint64_t>(x.channels)};
  for (int n : x.dims) t.dims.push_back(static_cast<std::uint64_t>(n));
  t.values = x.values;
  return t;
}

Dictionary dictionary_from_tensor(const TensorData& t) {
  if (t.dims.size() < 3) throw IoError("dictionary tensor needs at least [K, J, m...] dims");
  Dictionary d;
  d.filters = static_cast<int>(t.dims[0]);
  d.channels = static_cast<int>(t.dims[1]);
  for (std::size_t a = 2; a < t.dims.size(); ++a)
    d.support.push_back(static_cast<int>(t.dims[a]));
  d.values = t.values;
  d.validate();
  return d;
}

SparseMaps maps_from_tensor(const TensorData& t) {
  if (t.dims.size() < 2) throw IoError("maps tensor needs at least [K, n...] dims");
  SparseMaps z;
  z.maps = static_cast<int>(t.dims[0]);
  for (std::size_t a = 1; a < t.dims.size(); ++a) z.dims.push_back(static_cast<int>(t.dims[a]));
  z.values = t.values;
  z.validate();
  return z;
}

SignalTensor signal_from_tensor(const TensorData& t) {
  if (t.dims.size() < 2) throw IoError("signal tensor needs at least [J, n...] dims");
  SignalTensor x;
  x.channels = static_cast<int>(t.dims[0]);
  for (std::size_t a = 1; a < t.dims.size(); ++a) x.dims.push_back(static_cast<int>(t.dims[a]));
  x.values = t.values;
  x.validate();
  return x;
}

}  // namespace dcsc

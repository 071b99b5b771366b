#include "jumpvel/numerics/vten.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace jumpvel {
namespace {

constexpr char kMagic[5] = "VTEN";
constexpr std::uint32_t kVersion = 1;

template <typename U>
void write_le(std::ostream& os, U v) {
  unsigned char bytes[sizeof(U)];
  std::memcpy(bytes, &v, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U read_le(std::istream& is, const std::string& context) {
  unsigned char bytes[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw FormatError(context + ": unexpected end of data");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
  U v;
  std::memcpy(&v, bytes, sizeof(U));
  return v;
}

template <typename T>
Tensor<T> read_values(std::istream& is, Shape shape, const std::string& context) {
  const std::size_t n = shape_size(shape);
  std::vector<T> data(n);
  if constexpr (std::endian::native == std::endian::little) {
    if (n && !is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(T)))) {
      throw FormatError(context + ": truncated tensor payload");
    }
  } else {
    for (auto& x : data) x = read_le<T>(is, context);
  }
  return Tensor<T>(std::move(shape), std::move(data));
}

}  // namespace

void write_u8(std::ostream& os, std::uint8_t v) { write_le(os, v); }
void write_u16(std::ostream& os, std::uint16_t v) { write_le(os, v); }
void write_u32(std::ostream& os, std::uint32_t v) { write_le(os, v); }
void write_f64(std::ostream& os, double v) { write_le(os, v); }
std::uint8_t read_u8(std::istream& is, const std::string& context) { return read_le<std::uint8_t>(is, context); }
std::uint16_t read_u16(std::istream& is, const std::string& context) { return read_le<std::uint16_t>(is, context); }
std::uint32_t read_u32(std::istream& is, const std::string& context) { return read_le<std::uint32_t>(is, context); }
double read_f64(std::istream& is, const std::string& context) { return read_le<double>(is, context); }

void expect_magic(std::istream& is, const char (&magic)[5], const std::string& context) {
  char got[4] = {};
  if (!is.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw FormatError(context + ": bad magic, expected \"" + std::string(magic, 4) + "\"");
  }
}

template <typename T>
void write_vten(std::ostream& os, const Tensor<T>& t) {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
  if (t.rank() > 255) throw DimensionError("vten: rank above 255");
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u8(os, std::is_same_v<T, float> ? 0 : 1);
  write_u8(os, static_cast<std::uint8_t>(t.rank()));
  write_u8(os, 0);
  write_u8(os, 0);
  for (auto d : t.shape()) {
    if (d > 0xffffffffu) throw DimensionError("vten: extent exceeds u32");
    write_u32(os, static_cast<std::uint32_t>(d));
  }
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(T)));
  } else {
    for (auto v : t.values()) write_le(os, v);
  }
}

template <typename T>
void write_vten(const std::filesystem::path& path, const Tensor<T>& t) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_vten(os, t);
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

AnyTensor read_vten_any(std::istream& is, const std::string& context) {
  expect_magic(is, kMagic, context);
  const auto version = read_u32(is, context);
  if (version != kVersion) throw FormatError(context + ": unsupported vten version " + std::to_string(version));
  const auto dtype = read_u8(is, context);
  const auto ndim = read_u8(is, context);
  read_u8(is, context);
  read_u8(is, context);
  Shape shape(ndim);
  for (auto& d : shape) d = read_u32(is, context);
  if (dtype == 0) return read_values<float>(is, std::move(shape), context);
  if (dtype == 1) return read_values<double>(is, std::move(shape), context);
  throw FormatError(context + ": unknown dtype code " + std::to_string(dtype));
}

template <typename T>
Tensor<T> read_vten(std::istream& is, const std::string& context) {
  AnyTensor any = read_vten_any(is, context);
  if (auto* t = std::get_if<Tensor<T>>(&any)) return std::move(*t);
  return std::visit([](const auto& t) { return t.template cast<T>(); }, any);
}

template <typename T>
Tensor<T> read_vten(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return read_vten<T>(is, path.string());
}

template void write_vten(std::ostream&, const Tensor<float>&);
template void write_vten(std::ostream&, const Tensor<double>&);
template void write_vten(const std::filesystem::path&, const Tensor<float>&);
template void write_vten(const std::filesystem::path&, const Tensor<double>&);
template Tensor<float> read_vten(std::istream&, const std::string&);
template Tensor<double> read_vten(std::istream&, const std::string&);
template Tensor<float> read_vten(const std::filesystem::path&);
template Tensor<double> read_vten(const std::filesystem::path&);

}  // namespace jumpvel

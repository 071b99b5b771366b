#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "jumpvel/numerics/tensor.hpp"

namespace jumpvel {

// ".vten" container: "VTEN", u32 version = 1, u8 dtype (0 = f32, 1 = f64),
// u8 ndim, 2 pad bytes, ndim x u32 extents, row-major little-endian values.

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

using AnyTensor = std::variant<Tensor<float>, Tensor<double>>;

template <typename T>
void write_vten(std::ostream& os, const Tensor<T>& t);
template <typename T>
void write_vten(const std::filesystem::path& path, const Tensor<T>& t);

/// Reads a tensor in its stored dtype. `context` names the source in errors.
AnyTensor read_vten_any(std::istream& is, const std::string& context);

/// Reads a tensor converting to T when the stored dtype differs.
template <typename T>
Tensor<T> read_vten(std::istream& is, const std::string& context);
template <typename T>
Tensor<T> read_vten(const std::filesystem::path& path);

// Little-endian scalar helpers shared by the other binary formats.
void write_u8(std::ostream& os, std::uint8_t v);
void write_u16(std::ostream& os, std::uint16_t v);
void write_u32(std::ostream& os, std::uint32_t v);
void write_f64(std::ostream& os, double v);
std::uint8_t read_u8(std::istream& is, const std::string& context);
std::uint16_t read_u16(std::istream& is, const std::string& context);
std::uint32_t read_u32(std::istream& is, const std::string& context);
double read_f64(std::istream& is, const std::string& context);
void expect_magic(std::istream& is, const char (&magic)[5], const std::string& context);

}  // namespace jumpvel

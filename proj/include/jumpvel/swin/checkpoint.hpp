#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "jumpvel/numerics/vten.hpp"

namespace jumpvel::swin {

// Named-tensor table: "SWCK", u32 count, then per record u16 name length,
// UTF-8 name bytes and a ".vten" tensor.

using NamedTensors = std::map<std::string, AnyTensor>;

template <typename T>
void write_checkpoint(std::ostream& os, const std::vector<Parameter<T>*>& params);
template <typename T>
void write_checkpoint(const std::filesystem::path& path, const std::vector<Parameter<T>*>& params);

NamedTensors read_checkpoint(std::istream& is, const std::string& context);
NamedTensors read_checkpoint(const std::filesystem::path& path);

/// Copies every parameter's value from `table`, converting dtype. Missing
/// names, extra names and shape mismatches are errors.
template <typename T>
void load_parameters(const NamedTensors& table, const std::vector<Parameter<T>*>& params, const std::string& context);

}  // namespace jumpvel::swin

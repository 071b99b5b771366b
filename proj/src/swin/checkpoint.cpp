#include "jumpvel/swin/checkpoint.hpp"

#include <fstream>
#include <set>

namespace jumpvel::swin {
namespace {
constexpr char kMagic[5] = "SWCK";
}

template <typename T>
void write_checkpoint(std::ostream& os, const std::vector<Parameter<T>*>& params) {
  os.write(kMagic, 4);
  write_u32(os, static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    if (p->name.size() > 0xffff) throw FormatError("checkpoint: parameter name too long");
    write_u16(os, static_cast<std::uint16_t>(p->name.size()));
    os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_vten(os, p->value);
  }
}

template <typename T>
void write_checkpoint(const std::filesystem::path& path, const std::vector<Parameter<T>*>& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_checkpoint(os, params);
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

NamedTensors read_checkpoint(std::istream& is, const std::string& context) {
  expect_magic(is, kMagic, context);
  const std::uint32_t count = read_u32(is, context);
  NamedTensors table;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t len = read_u16(is, context);
    std::string name(len, '\0');
    if (len && !is.read(name.data(), len)) throw FormatError(context + ": truncated parameter name");
    if (table.count(name)) throw FormatError(context + ": duplicate parameter '" + name + "'");
    table.emplace(name, read_vten_any(is, context + " [" + name + "]"));
  }
  return table;
}

NamedTensors read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return read_checkpoint(is, path.string());
}

template <typename T>
void load_parameters(const NamedTensors& table, const std::vector<Parameter<T>*>& params,
                     const std::string& context) {
  std::set<std::string> seen;
  for (auto* p : params) {
    auto it = table.find(p->name);
    if (it == table.end()) throw FormatError(context + ": missing parameter '" + p->name + "'");
    Tensor<T> v = std::visit([](const auto& t) { return t.template cast<T>(); }, it->second);
    require_same_shape(v.shape(), p->value.shape(), context + ": parameter '" + p->name + "'");
    p->value = std::move(v);
    seen.insert(p->name);
  }
  for (const auto& [name, _] : table) {
    if (!seen.count(name)) throw FormatError(context + ": unexpected parameter '" + name + "'");
  }
}

template void write_checkpoint(std::ostream&, const std::vector<Parameter<float>*>&);
template void write_checkpoint(std::ostream&, const std::vector<Parameter<double>*>&);
template void write_checkpoint(const std::filesystem::path&, const std::vector<Parameter<float>*>&);
template void write_checkpoint(const std::filesystem::path&, const std::vector<Parameter<double>*>&);
template void load_parameters(const NamedTensors&, const std::vector<Parameter<float>*>&, const std::string&);
template void load_parameters(const NamedTensors&, const std::vector<Parameter<double>*>&, const std::string&);

}  // namespace jumpvel::swin

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "jumpvel/data/dataset.hpp"

namespace jumpvel {

/// Tab-separated, no header: participant, jump, cmj|drop, velocity, left, center, right.
DatasetIndex read_manifest(std::istream& is, const std::string& context = "manifest");
DatasetIndex load_manifest(const std::filesystem::path& path);

void write_manifest(std::ostream& os, const DatasetIndex& index);
void write_manifest(const std::filesystem::path& path, const DatasetIndex& index);

}  // namespace jumpvel

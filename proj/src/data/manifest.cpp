#include "jumpvel/data/manifest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

namespace jumpvel {
namespace {

constexpr std::size_t kFields = 7;

struct Field {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Field> split_tabs(std::string_view line) {
  std::vector<Field> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back({line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start),
                   start + 1});
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <typename T>
T parse_number(const Field& f, std::size_t line, const char* what, const std::string& context) {
  T value{};
  const char* first = f.text.data();
  const char* last = first + f.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || f.text.empty()) {
    throw ParseError(line, f.column, context + ": invalid " + what + " '" + std::string(f.text) + "'");
  }
  return value;
}

}  // namespace

DatasetIndex read_manifest(std::istream& is, const std::string& context) {
  DatasetIndex index;
  std::set<std::pair<int, int>> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string_view text(raw);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.empty()) continue;
    const auto fields = split_tabs(text);
    if (fields.size() != kFields) {
      throw ParseError(line, 1, context + ": expected " + std::to_string(kFields) + " tab-separated fields, found " +
                                    std::to_string(fields.size()));
    }
    SampleRecord rec;
    rec.participant = parse_number<int>(fields[0], line, "participant id", context);
    rec.jump = parse_number<int>(fields[1], line, "jump id", context);
    if (fields[2].text == "cmj") {
      rec.type = JumpType::cmj;
    } else if (fields[2].text == "drop") {
      rec.type = JumpType::drop;
    } else {
      throw ParseError(line, fields[2].column, context + ": jump type must be cmj or drop, got '" + std::string(fields[2].text) + "'");
    }
    rec.velocity = parse_number<double>(fields[3], line, "velocity", context);
    if (!std::isfinite(rec.velocity)) throw ParseError(line, fields[3].column, context + ": velocity is not finite");
    for (std::size_t v = 0; v < 3; ++v) {
      const Field& f = fields[4 + v];
      if (f.text.empty()) throw ParseError(line, f.column, context + ": empty path");
      rec.paths[v] = std::string(f.text);
    }
    if (!seen.insert({rec.participant, rec.jump}).second) {
      throw ParseError(line, 1, context + ": duplicate (participant, jump) pair");
    }
    index.records.push_back(std::move(rec));
  }
  return index;
}

DatasetIndex load_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest '" + path.string() + "'");
  DatasetIndex index = read_manifest(is, path.string());
  index.root = path.parent_path();
  return index;
}

void write_manifest(std::ostream& os, const DatasetIndex& index) {
  char velocity[64];
  for (const auto& r : index.records) {
    std::snprintf(velocity, sizeof(velocity), "%.6f", r.velocity);
    os << r.participant << '\t' << r.jump << '\t' << to_string(r.type) << '\t' << velocity;
    for (const auto& p : r.paths) os << '\t' << p;
    os << '\n';
  }
}

void write_manifest(const std::filesystem::path& path, const DatasetIndex& index) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write manifest '" + path.string() + "'");
  write_manifest(os, index);
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace jumpvel

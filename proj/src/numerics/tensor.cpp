#include "jumpvel/numerics/tensor.hpp"

#include <sstream>

namespace jumpvel {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

void require_same_shape(const Shape& a, const Shape& b, const std::string& context) {
  if (a != b) {
    throw DimensionError(context + ": shape " + to_string(a) + " does not match " + to_string(b));
  }
}

std::size_t split_last_axis(const Shape& shape, std::size_t& rows) {
  if (shape.empty()) throw DimensionError("expected a tensor of rank >= 1");
  rows = 1;
  for (std::size_t i = 0; i + 1 < shape.size(); ++i) rows *= shape[i];
  return shape.back();
}

}  // namespace jumpvel

#include "jumpvel/swin/config.hpp"

#include <cmath>
#include <sstream>

#include "jumpvel/errors.hpp"

namespace jumpvel::swin {

void SwinConfig::validate() const {
  if (patch_size == 0 || image_size == 0 || image_size % patch_size != 0) {
    throw ConfigError("image_size " + std::to_string(image_size) + " is not divisible by patch_size " +
                      std::to_string(patch_size));
  }
  if (in_channels == 0) throw ConfigError("in_channels must be >= 1");
  if (num_blocks == 0) throw ConfigError("num_blocks must be >= 1");
  if (heads == 0 || embed_dim == 0 || window == 0) throw ConfigError("embed_dim, heads and window must be >= 1");
  if (merge_after_block.size() != num_blocks) {
    throw ConfigError("merge_after_block has " + std::to_string(merge_after_block.size()) + " entries for " +
                      std::to_string(num_blocks) + " blocks");
  }
  if (!(mlp_ratio > 0.0)) throw ConfigError("mlp_ratio must be positive");
  std::size_t side = grid_side();
  std::size_t channels = embed_dim;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    if (side % window != 0) {
      throw ConfigError("block " + std::to_string(b) + ": token grid " + std::to_string(side) +
                        " not divisible by window " + std::to_string(window));
    }
    if (channels % heads != 0) {
      throw ConfigError("block " + std::to_string(b) + ": channels " + std::to_string(channels) +
                        " not divisible by heads " + std::to_string(heads));
    }
    if (merge_after_block[b]) {
      if (side % 2 != 0) {
        throw ConfigError("block " + std::to_string(b) + ": cannot merge odd grid " + std::to_string(side));
      }
      side /= 2;
      channels *= 2;
    }
  }
}

std::size_t SwinConfig::block_side(std::size_t b) const {
  std::size_t side = grid_side();
  for (std::size_t i = 0; i < b; ++i) {
    if (merge_after_block[i]) side /= 2;
  }
  return side;
}

std::size_t SwinConfig::block_channels(std::size_t b) const {
  std::size_t c = embed_dim;
  for (std::size_t i = 0; i < b; ++i) {
    if (merge_after_block[i]) c *= 2;
  }
  return c;
}

std::size_t SwinConfig::feature_dim() const { return block_channels(num_blocks); }

std::size_t SwinConfig::hidden_dim(std::size_t channels) const {
  return static_cast<std::size_t>(std::lround(static_cast<double>(channels) * mlp_ratio));
}

std::string SwinConfig::describe() const {
  std::ostringstream os;
  os << "image=" << image_size << " ch=" << in_channels << " patch=" << patch_size << " C=" << embed_dim
     << " blocks=" << num_blocks << " heads=" << heads << " window=" << window << " mlp_ratio=" << mlp_ratio
     << " merge=";
  for (bool m : merge_after_block) os << (m ? '1' : '0');
  os << " rel_pos_bias=" << (use_rel_pos_bias ? "on" : "off") << " act=" << to_string(activation);
  return os.str();
}

}  // namespace jumpvel::swin

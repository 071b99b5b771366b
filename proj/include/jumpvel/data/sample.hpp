#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "jumpvel/numerics/tensor.hpp"

namespace jumpvel {

enum class View { left, center, right };
enum class ViewSelection { left, right, center, combined };
enum class JumpType { cmj, drop };

/// Canonical view order for concatenation and manifests.
inline constexpr std::array<View, 3> kAllViews = {View::left, View::center, View::right};

std::string to_string(View v);
std::string to_string(ViewSelection s);
std::string to_string(JumpType j);
View parse_view(const std::string& s);
ViewSelection parse_view_selection(const std::string& s);
JumpType parse_jump_type(const std::string& s);

/// Views used by a selection, in canonical (left, center, right) order.
std::vector<View> active_views(ViewSelection s);

/// One recorded jump. Frames per view are [T x S x S x ch] in [0, 1].
struct VideoSample {
  int participant = 0;
  int jump = 0;
  JumpType type = JumpType::cmj;
  std::map<View, Tensor<float>> views;
  double velocity = 0.0;

  /// Throws InputError naming the first view of `selection` that is absent.
  void require_views(ViewSelection selection) const;
};

}  // namespace jumpvel

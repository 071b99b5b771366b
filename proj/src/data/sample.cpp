#include "jumpvel/data/sample.hpp"

namespace jumpvel {

std::string to_string(View v) {
  switch (v) {
    case View::left: return "left";
    case View::center: return "center";
    case View::right: return "right";
  }
  return "?";
}

std::string to_string(ViewSelection s) {
  switch (s) {
    case ViewSelection::left: return "left";
    case ViewSelection::right: return "right";
    case ViewSelection::center: return "center";
    case ViewSelection::combined: return "combined";
  }
  return "?";
}

std::string to_string(JumpType j) { return j == JumpType::cmj ? "cmj" : "drop"; }

View parse_view(const std::string& s) {
  if (s == "left") return View::left;
  if (s == "center") return View::center;
  if (s == "right") return View::right;
  throw InputError("unknown view '" + s + "'");
}

ViewSelection parse_view_selection(const std::string& s) {
  if (s == "left") return ViewSelection::left;
  if (s == "right") return ViewSelection::right;
  if (s == "center") return ViewSelection::center;
  if (s == "combined") return ViewSelection::combined;
  throw InputError("unknown view selection '" + s + "' (expected left|right|center|combined)");
}

JumpType parse_jump_type(const std::string& s) {
  if (s == "cmj") return JumpType::cmj;
  if (s == "drop") return JumpType::drop;
  throw InputError("unknown jump type '" + s + "' (expected cmj|drop)");
}

std::vector<View> active_views(ViewSelection s) {
  switch (s) {
    case ViewSelection::left: return {View::left};
    case ViewSelection::right: return {View::right};
    case ViewSelection::center: return {View::center};
    case ViewSelection::combined: return {kAllViews.begin(), kAllViews.end()};
  }
  return {};
}

void VideoSample::require_views(ViewSelection selection) const {
  for (View v : active_views(selection)) {
    if (!views.count(v)) {
      throw InputError("sample (participant " + std::to_string(participant) + ", jump " + std::to_string(jump) +
                       ") is missing the " + to_string(v) + " view");
    }
  }
}

}  // namespace jumpvel

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "jkl/network.hpp"

namespace jkl {

/// A built-in model with its default initial state and horizon.
struct Preset {
  std::string name;
  std::string description;
  std::string text;  // .rxn source
  State x0;
  double t_end = 1.0;

  ReactionNetwork network() const;
};

/// Throws std::invalid_argument for an unknown name.
const Preset& preset(std::string_view name);
const std::vector<Preset>& presets();
std::vector<std::string> preset_names();

}  // namespace jkl

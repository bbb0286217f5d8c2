#pragma once

#include <string_view>

#include "nmchaos/experiments.hpp"

namespace nmchaos {

/// Embedded TOML preset for a figure; empty for Figure::custom.
std::string_view preset_text(Figure figure);

}  // namespace nmchaos

#pragma once

#include <span>
#include <string_view>

namespace qmpemba::presets {

struct Preset {
    std::string_view name;
    std::string_view text;  // JSON config, as shipped in presets/
};

// Sorted by name.
std::span<const Preset> all();
const Preset* find(std::string_view name);

}  // namespace qmpemba::presets

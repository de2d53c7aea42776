#include "qmpemba/presets.hpp"

#include <algorithm>

namespace qmpemba::presets {

namespace detail {
// Generated from presets/*.json at configure time.
extern const Preset kTable[];
extern const std::size_t kCount;
}  // namespace detail

std::span<const Preset> all() { return {detail::kTable, detail::kCount}; }

const Preset* find(std::string_view name) {
    const auto table = all();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Preset& p) { return p.name == name; });
    return it == table.end() ? nullptr : &*it;
}

}  // namespace qmpemba::presets

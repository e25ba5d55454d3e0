#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluxfocus/io/config.hpp"

namespace fluxfocus::io {

struct PresetInfo {
    std::string name;
    Command command;  // the command the preset is meant for
    std::string description;
};

const std::vector<PresetInfo>& presets();
const PresetInfo* find_preset(std::string_view name);

// the preset as a config document, overridable key by key
std::optional<Json> preset_json(std::string_view name);

}  // namespace fluxfocus::io

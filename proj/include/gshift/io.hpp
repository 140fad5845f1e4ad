#pragma once

#include <string>

#include "json.hpp"
#include "gshift/group.hpp"

namespace gshift {

// Builds a group from its JSON description (see README for the schema).
GroupPtr group_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);

}  // namespace gshift

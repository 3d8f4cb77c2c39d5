#pragma once

#include "json.hpp"

namespace bems {
using Json = nlohmann::json;
}

namespace bems::agent {
struct SacConfig;
Json sac_config_to_json(const SacConfig& cfg);
SacConfig sac_config_from_json(const Json& j);
}  // namespace bems::agent

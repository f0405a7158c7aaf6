#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lvdsm/feeder.hpp"

namespace lvdsm {

// Feeder documents:
//   { "base": {"voltage_v": 230, "power_va": 10000},
//     "buses": [{"id": "n0", "phases": "abc", "vmin_pu": 0.9, "vmax_pu": 1.1, "source": true}, ...],
//     "branches": [{"from": "n0", "to": "n1", "phases": "abc",
//                   "r": [[...], ...], "x": [[...], ...], "s_rated_kva": 60}, ...],
//     "users": [{"id": "u1", "bus": "n1", "phases": "a"}, ...] }
// r and x are in ohms, square over the branch phases (row-major), or a
// per-phase list meaning a diagonal matrix. A missing x means zero reactance.
// The loader converts to per unit and throws std::invalid_argument on schema
// errors; structural checks are left to validate_feeder.
Feeder parse_feeder_json(std::string_view text);
std::string feeder_to_json(const Feeder& feeder);

Feeder load_feeder(const std::filesystem::path& path);
void save_feeder(const Feeder& feeder, const std::filesystem::path& path);

}  // namespace lvdsm

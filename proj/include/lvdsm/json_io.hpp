#pragma once

#include <json.hpp>

#include "lvdsm/acpf.hpp"
#include "lvdsm/scheduler.hpp"
#include "lvdsm/tightening.hpp"

namespace lvdsm {

// Non-finite margins (nothing checked) are written as null.
nlohmann::json to_json(const CongestionReport& report);
nlohmann::json to_json(const TighteningStep& step);
nlohmann::json to_json(const TighteningResult& result);

// {"users": [...], "horizon": T, "objective": n, "s": [[0, 1, ...], ...], "y": ..., "z": ...}
nlohmann::json to_json(const Schedule& schedule);

// Status matrix read back from to_json(Schedule); y, z and demand are rebuilt
// from s. Rows may come in any user order but must cover every forecast user.
Schedule schedule_from_json(const nlohmann::json& doc, const ProfileSet& forecast,
                            const std::vector<Contract>& contracts);

}  // namespace lvdsm

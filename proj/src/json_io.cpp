#include "lvdsm/json_io.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace lvdsm {

namespace {

nlohmann::json finite_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json matrix(const std::vector<std::uint8_t>& cells, int users, int horizon)
{
    nlohmann::json rows = nlohmann::json::array();
    for (int u = 0; u < users; ++u) {
        nlohmann::json row = nlohmann::json::array();
        for (int t = 0; t < horizon; ++t) row.push_back(static_cast<int>(cells[static_cast<std::size_t>(u) * horizon + t]));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::json to_json(const CongestionReport& report)
{
    auto voltage = [](const std::vector<VoltageEvent>& events) {
        nlohmann::json arr = nlohmann::json::array();
        for (const VoltageEvent& e : events)
            arr.push_back({{"bus", e.bus}, {"phase", std::string(1, phase_char(e.phase))}, {"t", e.t},
                           {"v_pu", e.v_pu}, {"margin", e.margin}});
        return arr;
    };
    nlohmann::json flows = nlohmann::json::array();
    for (const FlowEvent& e : report.overcurrent)
        flows.push_back({{"from", e.from}, {"to", e.to}, {"phase", std::string(1, phase_char(e.phase))}, {"t", e.t},
                         {"s_pu", e.s_pu}, {"margin", e.margin}});
    return {
        {"congested", !report.empty()},
        {"undervoltage", voltage(report.undervoltage)},
        {"overvoltage", voltage(report.overvoltage)},
        {"overcurrent", std::move(flows)},
        {"worst_undervoltage_margin", finite_or_null(report.worst_undervoltage_margin)},
        {"worst_overvoltage_margin", finite_or_null(report.worst_overvoltage_margin)},
        {"worst_overcurrent_margin", finite_or_null(report.worst_overcurrent_margin)},
    };
}

nlohmann::json to_json(const TighteningStep& step)
{
    nlohmann::json j = {
        {"delta", step.delta},
        {"tightening", {{"dv_low", step.tightening.dv_low}, {"dv_high", step.tightening.dv_high}, {"ds", step.tightening.ds}}},
        {"milp_status", mip::to_string(step.milp_status)},
        {"has_schedule", step.has_schedule},
        {"objective", step.has_schedule ? nlohmann::json(step.objective) : nlohmann::json(nullptr)},
        {"ac_converged", step.ac_converged},
        {"ac_feasible", step.ac_feasible},
        {"note", step.note},
    };
    j["report"] = step.has_schedule && step.ac_converged ? to_json(step.report) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const TighteningResult& result)
{
    nlohmann::json trace = nlohmann::json::array();
    for (const TighteningStep& s : result.trace) trace.push_back(to_json(s));
    return {
        {"found", result.found},
        {"delta_star", result.found ? nlohmann::json(result.delta_star) : nlohmann::json(nullptr)},
        {"milp_infeasible_seen", result.milp_infeasible_seen()},
        {"schedule", result.found ? to_json(result.schedule) : nlohmann::json(nullptr)},
        {"trace", std::move(trace)},
    };
}

nlohmann::json to_json(const Schedule& schedule)
{
    const int U = static_cast<int>(schedule.user_ids.size());
    return {
        {"users", schedule.user_ids},
        {"horizon", schedule.horizon},
        {"objective", schedule.objective},
        {"participants", schedule.participants()},
        {"s", matrix(schedule.s, U, schedule.horizon)},
        {"y", matrix(schedule.y, U, schedule.horizon)},
        {"z", matrix(schedule.z, U, schedule.horizon)},
    };
}

Schedule schedule_from_json(const nlohmann::json& doc, const ProfileSet& forecast,
                            const std::vector<Contract>& contracts)
{
    const int U = forecast.user_count();
    const int T = forecast.horizon();
    if (!doc.is_object() || !doc.contains("users") || !doc.contains("s"))
        throw std::invalid_argument("schedule: expected an object with 'users' and 's'");
    const auto ids = doc.at("users").get<std::vector<std::string>>();
    const nlohmann::json& rows = doc.at("s");
    if (!rows.is_array() || rows.size() != ids.size())
        throw std::invalid_argument("schedule: one row of 's' per user required");
    if (doc.contains("horizon") && doc.at("horizon").get<int>() != T)
        throw std::invalid_argument("schedule: horizon does not match the profiles");

    std::vector<std::uint8_t> s(static_cast<std::size_t>(U) * T, 0);
    std::vector<char> seen(U, 0);
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const int u = forecast.user_index(ids[k]);
        if (u < 0) throw std::invalid_argument("schedule: unknown user '" + ids[k] + "'");
        if (seen[u]) throw std::invalid_argument("schedule: user '" + ids[k] + "' listed twice");
        seen[u] = 1;
        const nlohmann::json& row = rows[k];
        if (!row.is_array() || static_cast<int>(row.size()) != T)
            throw std::invalid_argument("schedule: row for '" + ids[k] + "' must have one value per timestep");
        for (int t = 0; t < T; ++t) {
            const int v = row[t].get<int>();
            if (v != 0 && v != 1) throw std::invalid_argument("schedule: statuses must be 0 or 1");
            s[static_cast<std::size_t>(u) * T + t] = static_cast<std::uint8_t>(v);
        }
    }
    for (int u = 0; u < U; ++u)
        if (!seen[u]) throw std::invalid_argument("schedule: no row for user '" + forecast.user_ids()[u] + "'");

    std::unordered_map<std::string, const Contract*> by_id;
    for (const Contract& c : contracts) by_id[c.user_id] = &c;
    std::vector<Contract> ordered;
    for (const std::string& id : forecast.user_ids()) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw std::invalid_argument("schedule: no contract for user '" + id + "'");
        ordered.push_back(*it->second);
    }
    return make_schedule(forecast, ordered, s);
}

}  // namespace lvdsm

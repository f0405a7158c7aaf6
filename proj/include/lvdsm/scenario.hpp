#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <boost/property_tree/ptree_fwd.hpp>

#include "lvdsm/feeder.hpp"
#include "lvdsm/profiles.hpp"

namespace lvdsm {

struct ScenarioParams {
    int n_users = 30;
    double three_phase_share = 0.3;
    std::uint64_t seed = 1;

    int horizon = 96;
    int step_minutes = 15;
    double start_hour = 0.0;

    // Household peak (kW, whole connection) drawn uniformly from this band.
    double peak_kw_min = 2.0;
    double peak_kw_max = 5.0;
    double power_factor = 0.95;

    double ev_share = 0.3;
    double ev_power_kva = 3.3;
    // "auto": the attachment phase, random for three-phase users.
    // "balanced": three-phase users cycle a, b, c in user order.
    std::string ev_phase_policy = "auto";
    double ev_start_mean_h = 18.0;
    double ev_start_sd_h = 1.5;
    double ev_late_share = 0.25;
    double ev_late_mean_h = 21.5;
    double ev_late_sd_h = 1.0;
    double ev_min_duration_h = 2.0;
    double ev_max_duration_h = 6.0;

    // Congestion target: the forecast must violate an AC limit while every
    // user at p_gtd_kw is AC-feasible and feasible in the linear model with
    // all limits tightened by max_delta.
    bool congestion_target = true;
    double p_gtd_kw = 2.0;
    double congestion_margin = 1.1;
    double max_delta = 0.03;

    double vmin_pu = 0.9;
    double vmax_pu = 1.1;

    // Throws std::invalid_argument naming the first bad field.
    void validate() const;
};

ScenarioParams scenario_params_from_ptree(const boost::property_tree::ptree& tree,
                                          ScenarioParams defaults = {});
// Flat key = value file; unknown keys are rejected.
ScenarioParams load_scenario_params(const std::filesystem::path& path);
std::string scenario_params_to_ini(const ScenarioParams& params);

Feeder generate_feeder(const ScenarioParams& params);
ProfileSet generate_baseline_profiles(const Feeder& feeder, const ScenarioParams& params);
ProfileSet attach_ev_sessions(const ProfileSet& profiles, const Feeder& feeder, const ScenarioParams& params);

struct Scenario {
    Feeder feeder;
    ProfileSet baseline;  // scaled, without EVs
    ProfileSet profiles;  // forecast with EVs
    double baseline_scale = 1.0;
    int strengthen_rounds = 0;
    bool congested = false;
};

// Feeder plus forecast, with the congestion target applied when requested.
Scenario generate_scenario(const ScenarioParams& params);

// True when an AC power flow of the profiles violates a feeder limit or fails
// to converge.
bool forecast_congested(const Feeder& feeder, const ProfileSet& profiles);

}  // namespace lvdsm

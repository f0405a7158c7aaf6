#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lvdsm/feeder.hpp"

namespace lvdsm {

// Forecast demand per user, phase and timestep, in kW / kvar (load positive,
// net PV export negative). Phases a user is not attached to stay zero.
class ProfileSet {
public:
    ProfileSet() = default;
    ProfileSet(std::vector<std::string> user_ids, std::vector<PhaseSet> user_phases, int horizon, int step_minutes);
    // Users and phases taken from the feeder attachments, all values zero.
    ProfileSet(const Feeder& feeder, int horizon, int step_minutes);

    int horizon() const { return horizon_; }
    int step_minutes() const { return step_minutes_; }
    int user_count() const { return static_cast<int>(user_ids_.size()); }
    const std::vector<std::string>& user_ids() const { return user_ids_; }
    int user_index(const std::string& id) const;
    PhaseSet user_phases(int user) const { return user_phases_[user]; }

    double& p_kw(int user, Phase phase, int t) { return p_[offset(user, phase, t)]; }
    double p_kw(int user, Phase phase, int t) const { return p_[offset(user, phase, t)]; }
    double& q_kvar(int user, Phase phase, int t) { return q_[offset(user, phase, t)]; }
    double q_kvar(int user, Phase phase, int t) const { return q_[offset(user, phase, t)]; }

    const std::vector<double>& p_data() const { return p_; }
    const std::vector<double>& q_data() const { return q_; }

    bool operator==(const ProfileSet&) const = default;

    // Throws std::invalid_argument naming the first user unknown to the feeder,
    // missing from the profiles, or with phases differing from its attachment.
    void check_against(const Feeder& feeder) const;

    // Copy reordered to the feeder's user order.
    ProfileSet aligned_to(const Feeder& feeder) const;

private:
    std::size_t offset(int user, Phase phase, int t) const
    {
        return (static_cast<std::size_t>(user) * kPhaseCount + index(phase)) * horizon_ + t;
    }

    std::vector<std::string> user_ids_;
    std::vector<PhaseSet> user_phases_;
    int horizon_ = 0;
    int step_minutes_ = 15;
    std::vector<double> p_;
    std::vector<double> q_;
};

// CSV with header `t,user,phase,p_kw,q_kvar`, one row per (t, user, phase).
// Users appear in first-seen order. Every user must cover timesteps 0..T-1 on
// each of its phases exactly once.
ProfileSet load_profiles(const std::filesystem::path& path, int step_minutes = 15);
ProfileSet parse_profiles_csv(const std::string& text, int step_minutes = 15);
// Rows ordered by (t, user, phase); doubles written with round-trip precision.
std::string profiles_to_csv(const ProfileSet& profiles);
void save_profiles(const ProfileSet& profiles, const std::filesystem::path& path);

}  // namespace lvdsm

#pragma once

#include <vector>

#include "lvdsm/feeder.hpp"
#include "lvdsm/profiles.hpp"

namespace lvdsm {

// Per-unit demand per (user, phase, time), indexed in the feeder's user order.
// Positive values are consumption.
class Injections {
public:
    Injections() = default;
    Injections(int users, int horizon)
        : users_(users), horizon_(horizon), p_(static_cast<std::size_t>(users) * kPhaseCount * horizon, 0.0),
          q_(p_.size(), 0.0)
    {
    }

    int user_count() const { return users_; }
    int horizon() const { return horizon_; }

    double& p(int user, int phase, int t) { return p_[offset(user, phase, t)]; }
    double p(int user, int phase, int t) const { return p_[offset(user, phase, t)]; }
    double& q(int user, int phase, int t) { return q_[offset(user, phase, t)]; }
    double q(int user, int phase, int t) const { return q_[offset(user, phase, t)]; }
    Complex s(int user, int phase, int t) const { return {p(user, phase, t), q(user, phase, t)}; }

    void scale(double factor)
    {
        for (auto& v : p_) v *= factor;
        for (auto& v : q_) v *= factor;
    }

private:
    std::size_t offset(int user, int phase, int t) const
    {
        return (static_cast<std::size_t>(user) * kPhaseCount + phase) * horizon_ + t;
    }

    int users_ = 0;
    int horizon_ = 0;
    std::vector<double> p_;
    std::vector<double> q_;
};

// Forecast demand converted to per unit on the feeder base.
Injections forecast_injections(const Feeder& feeder, const ProfileSet& profiles);

}  // namespace lvdsm

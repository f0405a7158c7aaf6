#include "lvdsm/injections.hpp"

namespace lvdsm {

Injections forecast_injections(const Feeder& feeder, const ProfileSet& profiles)
{
    profiles.check_against(feeder);
    const int users = static_cast<int>(feeder.users.size());
    Injections out(users, profiles.horizon());
    for (int u = 0; u < users; ++u) {
        const int k = profiles.user_index(feeder.users[u].user_id);
        for (Phase ph : kAllPhases) {
            if (!feeder.users[u].phases.contains(ph)) continue;
            for (int t = 0; t < profiles.horizon(); ++t) {
                out.p(u, index(ph), t) = feeder.kw_to_pu(profiles.p_kw(k, ph, t));
                out.q(u, index(ph), t) = feeder.kw_to_pu(profiles.q_kvar(k, ph, t));
            }
        }
    }
    return out;
}

}  // namespace lvdsm

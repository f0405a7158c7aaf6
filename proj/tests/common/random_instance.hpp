#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "lvdsm/contracts.hpp"
#include "lvdsm/injections.hpp"
#include "lvdsm/linpf.hpp"
#include "lvdsm/profiles.hpp"
#include "lvdsm/scenario.hpp"

namespace testing_support {

struct Instance {
    lvdsm::Feeder feeder;
    lvdsm::ProfileSet profiles;
    lvdsm::Limits limits;
    double p_gtd_kw = 0.0;
};

// Small feeder with random demand and limits pulled in until the forecast
// violates at least one of them in the linear model.
inline Instance random_instance(std::uint64_t seed, int users, int horizon, int step_minutes = 60)
{
    using namespace lvdsm;
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) { return a + (b - a) * static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    ScenarioParams params;
    params.n_users = users;
    params.seed = seed;
    params.horizon = horizon;
    params.step_minutes = step_minutes;
    Instance inst;
    inst.feeder = generate_feeder(params);
    inst.p_gtd_kw = uni(0.5, 2.5);
    inst.profiles = ProfileSet(inst.feeder, horizon, step_minutes);
    for (int u = 0; u < users; ++u)
        for (Phase p : inst.profiles.user_phases(u))
            for (int t = 0; t < horizon; ++t) {
                const double kw = uni(-0.5, 7.0) / inst.profiles.user_phases(u).size();
                inst.profiles.p_kw(u, p, t) = kw;
                inst.profiles.q_kvar(u, p, t) = kw * uni(0.0, 0.4);
            }

    // Scale the network so loads matter, then squeeze limits around the forecast.
    for (Branch& br : inst.feeder.branches) br.z_pu *= uni(2.0, 6.0);
    const RadialNetwork net(inst.feeder);
    const LinPfSolution sol = evaluate_lin_pf(net, forecast_injections(inst.feeder, inst.profiles));
    inst.limits = Limits::from_feeder(inst.feeder, horizon);
    const int mode = static_cast<int>(rng() % 3);  // 0 voltage, 1 thermal, 2 both
    if (mode != 1) {
        double umin = 1.0;
        for (int b = 0; b < net.bus_count(); ++b)
            for (Phase p : inst.feeder.buses[b].phases)
                for (int t = 0; t < horizon; ++t) umin = std::min(umin, sol.u_at(b, index(p), t));
        const double floor = std::sqrt(std::max(umin, 0.01)) + uni(0.0, 0.6) * (1.0 - std::sqrt(std::max(umin, 0.01)));
        for (std::size_t b = 0; b < inst.limits.vmin_pu.size(); ++b) inst.limits.vmin_pu[b] = floor;
    }
    if (mode != 0) {
        for (int br = 0; br < net.branch_count(); ++br) {
            double peak = 0.0;
            for (int p = 0; p < 3; ++p)
                for (int t = 0; t < horizon; ++t) peak = std::max(peak, std::abs(sol.lambda_at(br, p, t)));
            inst.limits.s_rated_pu[br] = std::max(1e-3, peak * uni(0.6, 1.05));
        }
    }
    return inst;
}

}  // namespace testing_support

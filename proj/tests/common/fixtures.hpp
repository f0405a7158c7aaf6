#pragma once

#include <string>

#include "lvdsm/feeder.hpp"

namespace fixtures {

// Source plus one load bus over a single branch with impedance r + jx (p.u.)
// on the listed phases, one user attached on the same phases.
inline lvdsm::Feeder two_bus(double r, double x, lvdsm::PhaseSet phases = {lvdsm::Phase::a}, double rating = 1.0)
{
    using namespace lvdsm;
    Feeder f;
    f.base_voltage_v = 1.0;
    f.base_power_va = 1.0;
    f.buses.push_back({"src", PhaseSet::all(), 0.9, 1.1, true});
    f.buses.push_back({"n1", phases, 0.9, 1.1, false});
    Branch br;
    br.from = "src";
    br.to = "n1";
    br.phases = phases;
    for (Phase p : kAllPhases)
        if (phases.contains(p)) br.z_pu(index(p), index(p)) = {r, x};
    br.s_rated_pu = rating;
    f.branches.push_back(br);
    f.users.push_back({"u1", "n1", phases});
    return f;
}

// Chain src - n1 - n2 ... of three-phase branches with identical impedance,
// one user per load bus.
inline lvdsm::Feeder chain(int length, double r, double x, lvdsm::PhaseSet user_phases = lvdsm::PhaseSet::all())
{
    using namespace lvdsm;
    Feeder f;
    f.base_voltage_v = 1.0;
    f.base_power_va = 1.0;
    f.buses.push_back({"src", PhaseSet::all(), 0.9, 1.1, true});
    for (int i = 1; i <= length; ++i) {
        const std::string id = "n" + std::to_string(i);
        f.buses.push_back({id, PhaseSet::all(), 0.9, 1.1, false});
        Branch br;
        br.from = i == 1 ? "src" : "n" + std::to_string(i - 1);
        br.to = id;
        for (int p = 0; p < 3; ++p) br.z_pu(p, p) = {r, x};
        br.s_rated_pu = 1.0;
        f.branches.push_back(br);
        f.users.push_back({"u" + std::to_string(i), id, user_phases});
    }
    return f;
}

}  // namespace fixtures

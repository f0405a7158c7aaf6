#pragma once

#include <string>
#include <vector>

#include "lvdsm/acpf.hpp"
#include "lvdsm/contracts.hpp"
#include "lvdsm/feeder.hpp"
#include "lvdsm/linpf.hpp"
#include "lvdsm/mip/branch_and_bound.hpp"
#include "lvdsm/profiles.hpp"
#include "lvdsm/scheduler.hpp"

namespace lvdsm {

// 0, 0.0025, ..., 0.03
std::vector<double> default_delta_grid();

struct TighteningOptions {
    std::vector<double> grid = default_delta_grid();
    BuildOptions build;
    mip::MipOptions mip;
    AcPfOptions ac;
};

struct TighteningStep {
    double delta = 0.0;
    Tightening tightening;  // what the MILP was built with
    mip::MipStatus milp_status = mip::MipStatus::infeasible;
    bool has_schedule = false;
    int objective = -1;
    bool ac_converged = false;
    bool ac_feasible = false;
    CongestionReport report;  // against the original limits
    std::string note;
    // wall times, kept out of the JSON form
    double build_s = 0.0, milp_s = 0.0, ac_s = 0.0;
};

struct TighteningResult {
    bool found = false;
    double delta_star = -1.0;  // meaningful when found
    Schedule schedule;         // the accepted schedule when found
    std::vector<TighteningStep> trace;
    // MILP schedule at the first grid point, when it had one
    bool has_initial = false;
    Schedule initial;

    // True when some step of the trace had no schedule because the MILP was
    // infeasible.
    bool milp_infeasible_seen() const;
};

// Walks the grid: build and solve the MILP with the current tightening, run
// the AC power flow on its demand and stop at the first schedule with no
// congestion under the original limits. Each limit type is tightened once it
// has been seen violated: undervoltage raises the floor, overvoltage lowers
// the ceiling, overcurrent scales ratings by (1 - delta).
TighteningResult tighten_and_resolve(const Feeder& feeder, const ProfileSet& profiles,
                                     const std::vector<Contract>& contracts, const Limits& limits,
                                     const TighteningOptions& options = {});

}  // namespace lvdsm

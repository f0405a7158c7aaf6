#include "lvdsm/tightening.hpp"

#include <chrono>
#include <stdexcept>

#include "lvdsm/injections.hpp"

namespace lvdsm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<double> default_delta_grid()
{
    std::vector<double> grid;
    for (int k = 0; k <= 12; ++k) grid.push_back(k * 0.0025);
    return grid;
}

bool TighteningResult::milp_infeasible_seen() const
{
    for (const TighteningStep& s : trace)
        if (s.milp_status == mip::MipStatus::infeasible) return true;
    return false;
}

TighteningResult tighten_and_resolve(const Feeder& feeder, const ProfileSet& profiles,
                                     const std::vector<Contract>& contracts, const Limits& limits,
                                     const TighteningOptions& options)
{
    const std::vector<double>& grid = options.grid;
    if (grid.empty() || grid.front() != 0.0) throw std::invalid_argument("delta grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("delta grid must be strictly ascending");
    if (grid.back() >= 1.0) throw std::invalid_argument("delta grid values must stay below 1");

    const RadialNetwork net(feeder);
    bool low = false, high = false, thermal = false;
    TighteningResult out;
    for (double delta : grid) {
        TighteningStep step;
        step.delta = delta;
        step.tightening = {low ? delta : 0.0, high ? delta : 0.0, thermal ? delta : 0.0};
        auto clock = std::chrono::steady_clock::now();
        const MilpModel model = build_milp(feeder, profiles, contracts, limits, step.tightening, options.build);
        step.build_s = seconds_since(clock);
        clock = std::chrono::steady_clock::now();
        SolveResult res = solve_milp(model, options.mip);
        step.milp_s = seconds_since(clock);
        step.milp_status = res.status;
        step.has_schedule = res.has_schedule;
        if (!res.has_schedule) {
            step.note = std::string("milp ") + mip::to_string(res.status);
            out.trace.push_back(std::move(step));
            continue;
        }
        step.objective = res.schedule.objective;
        if (out.trace.empty()) {
            out.has_initial = true;
            out.initial = res.schedule;
        }
        clock = std::chrono::steady_clock::now();
        const AcPfSolution ac = solve_ac_pf(net, forecast_injections(feeder, res.schedule.demand), options.ac);
        step.ac_s = seconds_since(clock);
        step.ac_converged = ac.converged;
        if (!ac.converged) {
            // a diverging sweep means the voltage is collapsing somewhere
            low = true;
            step.note = ac.message.empty() ? "ac power flow did not converge" : ac.message;
            out.trace.push_back(std::move(step));
            continue;
        }
        step.report = detect_congestion(net, ac, limits);
        step.ac_feasible = step.report.empty();
        low = low || !step.report.undervoltage.empty();
        high = high || !step.report.overvoltage.empty();
        thermal = thermal || !step.report.overcurrent.empty();
        const bool done = step.ac_feasible;
        out.trace.push_back(std::move(step));
        if (done) {
            out.found = true;
            out.delta_star = delta;
            out.schedule = std::move(res.schedule);
            break;
        }
    }
    return out;
}

}  // namespace lvdsm

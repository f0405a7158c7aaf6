#pragma once

#include <string>
#include <vector>

#include "lvdsm/feeder.hpp"
#include "lvdsm/injections.hpp"
#include "lvdsm/linpf.hpp"

namespace lvdsm {

struct AcPfOptions {
    double tol = 1e-8;  // max power mismatch, p.u.
    int max_iter = 100;
    double collapse_pu = 0.5;
};

struct AcPfSolution {
    int buses = 0;
    int branches = 0;
    int horizon = 0;
    std::vector<Complex> v;       // [bus][phase][t]
    std::vector<Complex> s_flow;  // [branch][phase][t], sending end
    std::vector<Complex> current; // [branch][phase][t]
    bool converged = false;
    bool collapsed = false;
    double max_mismatch = 0.0;
    int iterations = 0;  // worst timestep
    std::string message;

    Complex& v_at(int bus, int phase, int t) { return v[(static_cast<std::size_t>(bus) * 3 + phase) * horizon + t]; }
    Complex v_at(int bus, int phase, int t) const { return v[(static_cast<std::size_t>(bus) * 3 + phase) * horizon + t]; }
    Complex& s_at(int br, int phase, int t) { return s_flow[(static_cast<std::size_t>(br) * 3 + phase) * horizon + t]; }
    Complex s_at(int br, int phase, int t) const { return s_flow[(static_cast<std::size_t>(br) * 3 + phase) * horizon + t]; }
    Complex& i_at(int br, int phase, int t) { return current[(static_cast<std::size_t>(br) * 3 + phase) * horizon + t]; }
    Complex i_at(int br, int phase, int t) const { return current[(static_cast<std::size_t>(br) * 3 + phase) * horizon + t]; }
};

// Backward/forward sweep with constant-power loads, solved per timestep.
AcPfSolution solve_ac_pf(const RadialNetwork& net, const Injections& demand, const AcPfOptions& options = {});

// Largest |S_calc - S| over loaded bus phases, with currents recomputed from
// the voltages through each branch impedance.
double kirchhoff_mismatch(const RadialNetwork& net, const Injections& demand, const AcPfSolution& sol);

struct VoltageEvent {
    std::string bus;
    Phase phase = Phase::a;
    int t = 0;
    double v_pu = 0.0;
    double margin = 0.0;  // |V| - limit
};

struct FlowEvent {
    std::string from;
    std::string to;
    Phase phase = Phase::a;
    int t = 0;
    double s_pu = 0.0;
    double margin = 0.0;  // |S| - rating
};

struct CongestionReport {
    std::vector<VoltageEvent> undervoltage;
    std::vector<VoltageEvent> overvoltage;
    std::vector<FlowEvent> overcurrent;
    // Signed distance to the nearest limit of each kind over every checked
    // quantity; negative for undervoltage means violated, positive for the
    // other two.
    double worst_undervoltage_margin = 0.0;
    double worst_overvoltage_margin = 0.0;
    double worst_overcurrent_margin = 0.0;

    bool empty() const { return undervoltage.empty() && overvoltage.empty() && overcurrent.empty(); }
    std::size_t event_count() const { return undervoltage.size() + overvoltage.size() + overcurrent.size(); }
};

// Throws std::invalid_argument on an unconverged solution.
CongestionReport detect_congestion(const RadialNetwork& net, const AcPfSolution& sol, const Limits& limits,
                                   double tol = 1e-9);

struct GapSummary {
    double max_u_gap = 0.0;   // |u_lin - |V|^2|
    double mean_u_gap = 0.0;
    double max_flow_gap = 0.0;  // |lambda - S_ac|
    double mean_flow_gap = 0.0;
};

GapSummary lin_vs_ac_gap(const RadialNetwork& net, const Injections& demand, const AcPfOptions& options = {});

}  // namespace lvdsm

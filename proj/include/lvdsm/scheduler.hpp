#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "lvdsm/contracts.hpp"
#include "lvdsm/feeder.hpp"
#include "lvdsm/injections.hpp"
#include "lvdsm/linpf.hpp"
#include "lvdsm/mip/branch_and_bound.hpp"
#include "lvdsm/profiles.hpp"

namespace lvdsm {

// Contracts reordered to the feeder's user order; throws when a user has no
// contract, a contract names an unknown user, or one is invalid.
std::vector<Contract> contracts_for(const Feeder& feeder, const std::vector<Contract>& contracts);

// Per-phase guaranteed demand of a user: the contract value split equally
// over its attachment phases.
double phase_share(double total, PhaseSet phases);

// p - (P_gtd - P_fx) s = P_fx and the same for q, per (user, phase, time), in
// per unit on the feeder base.
LinearConstraintBlock user_response_rows(const Feeder& feeder, const ProfileSet& profiles,
                                         const std::vector<Contract>& contracts);

// Transition identity, activation budget, duration windows and gap windows.
// y and z rows are only emitted for users whose contract needs them.
LinearConstraintBlock comfort_rows(const std::vector<Contract>& contracts, int horizon);

enum class ModelForm {
    // Network rows written directly over s through linear sensitivities; rows
    // that can never bind are left out and the rest are lazy.
    reduced,
    // Every voltage, flow and demand variable kept explicitly.
    lifted,
};

struct BuildOptions {
    ModelForm form = ModelForm::reduced;
    int polygon_sides = 8;
};

struct MilpModel {
    ModelForm form = ModelForm::reduced;
    mip::Problem problem;
    std::vector<std::string> user_ids;
    int horizon = 0;
    int step_minutes = 15;
    std::vector<int> s_index;  // [user * horizon + t]
    std::vector<int> y_index;  // -1 when elided
    std::vector<int> z_index;
    std::vector<int> network_rows;  // constraint indices of the network rows
    int beta = 0;                   // declared binaries

    ProfileSet forecast;
    std::vector<Contract> contracts;  // feeder user order

    int s(int user, int t) const { return s_index[static_cast<std::size_t>(user) * horizon + t]; }
    int y(int user, int t) const { return y_index[static_cast<std::size_t>(user) * horizon + t]; }
    int z(int user, int t) const { return z_index[static_cast<std::size_t>(user) * horizon + t]; }
};

MilpModel build_milp(const Feeder& feeder, const ProfileSet& profiles, const std::vector<Contract>& contracts,
                     const Limits& limits, const Tightening& tightening = {}, const BuildOptions& options = {});

struct Schedule {
    std::vector<std::string> user_ids;
    int horizon = 0;
    std::vector<std::uint8_t> s, y, z;  // [user * horizon + t]
    ProfileSet demand;                  // realized, kW / kvar
    int objective = 0;

    std::uint8_t s_at(int user, int t) const { return s[static_cast<std::size_t>(user) * horizon + t]; }
    std::uint8_t y_at(int user, int t) const { return y[static_cast<std::size_t>(user) * horizon + t]; }
    std::uint8_t z_at(int user, int t) const { return z[static_cast<std::size_t>(user) * horizon + t]; }
    int participants() const;
};

// Schedule for a status matrix: y and z follow from s with no action before
// the horizon, demand from the user response.
Schedule make_schedule(const ProfileSet& forecast, const std::vector<Contract>& contracts,
                       const std::vector<std::uint8_t>& s);

struct SolveResult {
    mip::MipStatus status = mip::MipStatus::infeasible;
    bool has_schedule = false;  // optimal, or a timeout with an incumbent
    Schedule schedule;
    double bound = -mip::kInf;
    long nodes = 0;
    long lp_iterations = 0;
    long fixed_by_presolve = 0;
};

// Before the search, statuses outside the span of timesteps where a user's
// reduction can relieve some binding limit are fixed to zero; the optimum is
// unaffected because trimming the ends of a schedule never breaks comfort rows.
SolveResult solve_milp(const MilpModel& model, const mip::MipOptions& options = {});

// LP relaxation of the whole model; fixings are (variable index, value).
mip::LpResult lp_relax_solve(const MilpModel& model, const std::vector<std::pair<int, double>>& fixings = {});

struct Violation {
    std::string user;
    int t = 0;
    std::string kind;  // identity, activations, duration, gap, value
    std::string detail;
};

// Empty iff every value is binary, the transition identity holds with y and z
// never both set, and activation, duration and gap limits are respected.
std::vector<Violation> verify_schedule(const Schedule& schedule, const std::vector<Contract>& contracts, int horizon);

enum class Checker { lin, ac };

struct BruteForceOptions {
    Checker checker = Checker::lin;
    int cap = 20;  // users * horizon
    int polygon_sides = 8;
    double tol = 1e-9;
};

struct BruteForceResult {
    bool feasible = false;
    Schedule schedule;
    long enumerated = 0;
    long improvements = 0;  // assignments that beat the best so far
};

// Exhaustive search over every status matrix; the first minimum in
// enumeration order wins.
BruteForceResult brute_force_schedule(const Feeder& feeder, const ProfileSet& profiles,
                                      const std::vector<Contract>& contracts, const Limits& limits,
                                      const Tightening& tightening = {}, const BruteForceOptions& options = {});

double relative_objective_error(int a, int b, int beta);

// Schedule from an externally solved assignment keyed by model or LP names.
Schedule schedule_from_assignment(const MilpModel& model, const std::unordered_map<std::string, double>& values);

}  // namespace lvdsm

#include <doctest.h>

#include "fixtures.hpp"
#include "lvdsm/acpf.hpp"
#include "lvdsm/contracts.hpp"
#include "lvdsm/injections.hpp"
#include "lvdsm/json_io.hpp"
#include "lvdsm/scenario.hpp"
#include "lvdsm/tightening.hpp"

using namespace lvdsm;

namespace {

struct Instance {
    Scenario sc;
    std::vector<Contract> contracts;
    Limits limits;
};

Instance generated(std::uint64_t seed, int users, const std::string& modality, double margin = 1.1)
{
    ScenarioParams p;
    p.seed = seed;
    p.n_users = users;
    p.congestion_margin = margin;
    Instance in{generate_scenario(p), {}, {}};
    in.contracts = uniform_contracts(in.sc.feeder, find_preset(modality, 15), p.p_gtd_kw);
    in.limits = Limits::from_feeder(in.sc.feeder, p.horizon);
    return in;
}

bool clean_under(const Feeder& f, const Schedule& s, const Limits& limits)
{
    const RadialNetwork net(f);
    const AcPfSolution ac = solve_ac_pf(net, forecast_injections(f, s.demand));
    return ac.converged && detect_congestion(net, ac, limits).empty();
}

}  // namespace

TEST_CASE("delta grid")
{
    const auto g = default_delta_grid();
    REQUIRE(g.size() == 13);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(0.03));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] - g[i - 1] == doctest::Approx(0.0025));

    const Feeder f = fixtures::two_bus(0.01, 0.005);
    ProfileSet prof(f, 2, 15);
    const auto contracts = uniform_contracts(f, find_preset("simple", 15), 0.1);
    const Limits limits = Limits::from_feeder(f, 2);
    TighteningOptions opt;
    opt.grid = {0.01, 0.02};
    CHECK_THROWS_AS(tighten_and_resolve(f, prof, contracts, limits, opt), std::invalid_argument);
    opt.grid = {0.0, 0.02, 0.01};
    CHECK_THROWS_AS(tighten_and_resolve(f, prof, contracts, limits, opt), std::invalid_argument);
    opt.grid = {0.0, 0.02, 0.02};
    CHECK_THROWS_AS(tighten_and_resolve(f, prof, contracts, limits, opt), std::invalid_argument);
    opt.grid = {0.0, 1.0};
    CHECK_THROWS_AS(tighten_and_resolve(f, prof, contracts, limits, opt), std::invalid_argument);
    opt.grid = {};
    CHECK_THROWS_AS(tighten_and_resolve(f, prof, contracts, limits, opt), std::invalid_argument);
}

TEST_CASE("an uncongested feeder stops at the first grid point with nothing scheduled")
{
    Feeder f = fixtures::two_bus(0.01, 0.005);
    f.base_power_va = 1000.0;
    ProfileSet prof(f, 4, 15);
    for (int t = 0; t < 4; ++t) {
        prof.p_kw(0, Phase::a, t) = 0.05;
        prof.q_kvar(0, Phase::a, t) = 0.01;
    }
    const auto contracts = uniform_contracts(f, find_preset("single", 15), 0.01);
    const TighteningResult r = tighten_and_resolve(f, prof, contracts, Limits::from_feeder(f, 4));
    CHECK(r.found);
    CHECK(r.delta_star == 0.0);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.schedule.objective == 0);
    CHECK(r.has_initial);
    CHECK(r.trace[0].tightening == Tightening{});
}

TEST_CASE("AC-feasible MILP schedule is returned unchanged")
{
    const Instance in = generated(1, 15, "double");
    const MilpModel m = build_milp(in.sc.feeder, in.sc.profiles, in.contracts, in.limits);
    const SolveResult direct = solve_milp(m);
    REQUIRE(direct.has_schedule);
    REQUIRE(clean_under(in.sc.feeder, direct.schedule, in.limits));

    const TighteningResult r = tighten_and_resolve(in.sc.feeder, in.sc.profiles, in.contracts, in.limits);
    CHECK(r.found);
    CHECK(r.delta_star == 0.0);
    CHECK(r.trace.size() == 1);
    CHECK(r.schedule.s == direct.schedule.s);
    CHECK(r.initial.s == direct.schedule.s);
}

TEST_CASE("tightening restores AC feasibility and follows the cumulative rule")
{
    // Generated instance whose delta 0 schedule undershoots the voltage floor.
    const Instance in = generated(2, 30, "simple");
    const TighteningResult r = tighten_and_resolve(in.sc.feeder, in.sc.profiles, in.contracts, in.limits);
    REQUIRE(r.found);
    CHECK(r.delta_star > 0.0);
    CHECK(r.delta_star <= 0.03);
    CHECK_FALSE(r.trace.front().ac_feasible);
    CHECK(clean_under(in.sc.feeder, r.schedule, in.limits));
    CHECK(r.trace.back().ac_feasible);
    CHECK(r.trace.back().delta == r.delta_star);

    bool low = false, high = false, thermal = false;
    int last_objective = -1;
    for (const TighteningStep& st : r.trace) {
        CHECK(st.tightening.dv_low == (low ? st.delta : 0.0));
        CHECK(st.tightening.dv_high == (high ? st.delta : 0.0));
        CHECK(st.tightening.ds == (thermal ? st.delta : 0.0));
        REQUIRE(st.has_schedule);
        // nested feasible sets: the optimum can only grow
        CHECK(st.objective >= last_objective);
        last_objective = st.objective;
        low = low || !st.report.undervoltage.empty() || !st.ac_converged;
        high = high || !st.report.overvoltage.empty();
        thermal = thermal || !st.report.overcurrent.empty();
    }
    CHECK(r.schedule.objective == last_objective);
    CHECK(r.initial.objective <= r.schedule.objective);

    const nlohmann::json j = to_json(r);
    CHECK(j.at("found") == true);
    CHECK(j.at("delta_star").get<double>() == r.delta_star);
    CHECK(j.at("trace").size() == r.trace.size());
    CHECK(j.at("trace")[0].at("report").at("congested") == true);
}

TEST_CASE("an impossible instance exhausts the grid and records the MILP verdict")
{
    // Guaranteed power above what the line can carry at any reduction.
    Feeder f = fixtures::two_bus(0.05, 0.02, {Phase::a}, 0.2);
    f.base_power_va = 1000.0;
    ProfileSet prof(f, 3, 15);
    for (int t = 0; t < 3; ++t) {
        prof.p_kw(0, Phase::a, t) = 0.5;
        prof.q_kvar(0, Phase::a, t) = 0.2;
    }
    const auto contracts = uniform_contracts(f, find_preset("simple", 15), 0.4);
    TighteningOptions opt;
    opt.grid = {0.0, 0.01, 0.02};
    const TighteningResult r = tighten_and_resolve(f, prof, contracts, Limits::from_feeder(f, 3), opt);
    CHECK_FALSE(r.found);
    CHECK(r.trace.size() == 3);
    CHECK(r.milp_infeasible_seen());
    CHECK_FALSE(r.has_initial);
    const nlohmann::json j = to_json(r);
    CHECK(j.at("delta_star").is_null());
    CHECK(j.at("schedule").is_null());
    CHECK(j.at("trace")[0].at("report").is_null());
}

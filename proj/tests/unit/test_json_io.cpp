#include <doctest.h>

#include <limits>

#include "fixtures.hpp"
#include "lvdsm/contracts.hpp"
#include "lvdsm/json_io.hpp"

using namespace lvdsm;

namespace {

struct Small {
    Feeder feeder = fixtures::chain(2, 0.02, 0.01, {Phase::b});
    ProfileSet forecast;
    std::vector<Contract> contracts;

    Small()
    {
        feeder.base_power_va = 1000.0;
        forecast = ProfileSet(feeder, 5, 15);
        for (int u = 0; u < 2; ++u)
            for (int t = 0; t < 5; ++t) forecast.p_kw(u, Phase::b, t) = 1.0 + u;
        contracts = uniform_contracts(feeder, find_preset("double", 15), 0.5);
    }
};

}  // namespace

TEST_CASE("schedule survives a JSON round trip")
{
    const Small in;
    const std::vector<std::uint8_t> s = {0, 1, 1, 0, 1, 1, 0, 0, 0, 0};
    const Schedule a = make_schedule(in.forecast, in.contracts, s);
    const nlohmann::json j = to_json(a);
    CHECK(j.at("objective") == 4);
    CHECK(j.at("participants") == 2);
    CHECK(j.at("y")[0] == nlohmann::json({0, 1, 0, 0, 1}));
    CHECK(j.at("z")[0] == nlohmann::json({0, 0, 0, 1, 0}));

    const Schedule b = schedule_from_json(nlohmann::json::parse(j.dump()), in.forecast, in.contracts);
    CHECK(b.s == a.s);
    CHECK(b.y == a.y);
    CHECK(b.z == a.z);
    CHECK(b.demand == a.demand);

    // user rows in a different order
    nlohmann::json swapped = j;
    swapped["users"] = {j["users"][1], j["users"][0]};
    swapped["s"] = {j["s"][1], j["s"][0]};
    CHECK(schedule_from_json(swapped, in.forecast, in.contracts).s == a.s);
}

TEST_CASE("malformed schedule documents are rejected")
{
    const Small in;
    const nlohmann::json good = to_json(make_schedule(in.forecast, in.contracts, std::vector<std::uint8_t>(10, 0)));
    auto bad = [&](auto edit) {
        nlohmann::json j = good;
        edit(j);
        return j;
    };
    CHECK_THROWS_AS(schedule_from_json(nlohmann::json::array(), in.forecast, in.contracts), std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_json(bad([](auto& j) { j["s"][0][2] = 2; }), in.forecast, in.contracts),
                    std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_json(bad([](auto& j) { j["s"][1].erase(4); }), in.forecast, in.contracts),
                    std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_json(bad([](auto& j) { j["users"][1] = "ghost"; }), in.forecast, in.contracts),
                    std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_json(bad([](auto& j) { j["users"][1] = j["users"][0]; }), in.forecast, in.contracts),
                    std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_json(bad([](auto& j) { j["horizon"] = 6; }), in.forecast, in.contracts),
                    std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_json(good, in.forecast, {in.contracts[0]}), std::invalid_argument);
}

TEST_CASE("congestion report fields")
{
    CongestionReport r;
    r.worst_undervoltage_margin = 0.01;
    r.worst_overvoltage_margin = std::numeric_limits<double>::infinity();
    r.worst_overcurrent_margin = std::numeric_limits<double>::quiet_NaN();
    r.undervoltage.push_back({"n2", Phase::c, 7, 0.89, -0.01});
    const nlohmann::json j = to_json(r);
    CHECK(j.at("congested") == true);
    CHECK(j.at("worst_overvoltage_margin").is_null());
    CHECK(j.at("worst_overcurrent_margin").is_null());
    const auto& e = j.at("undervoltage")[0];
    CHECK(e.at("bus") == "n2");
    CHECK(e.at("phase") == "c");
    CHECK(e.at("t") == 7);
    CHECK(e.at("margin").get<double>() == -0.01);
    CHECK(to_json(CongestionReport{}).at("congested") == false);
}

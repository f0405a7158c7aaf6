#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "lvdsm/feeder.hpp"
#include "lvdsm/feeder_io.hpp"

using namespace lvdsm;

TEST_CASE("minimal feeder validates cleanly")
{
    const Feeder f = fixtures::two_bus(0.1, 0.05);
    CHECK(validate_feeder(f).ok());
    CHECK(f.branches.size() == f.buses.size() - 1);
}

TEST_CASE("a cycle is reported as non-radial")
{
    Feeder f = fixtures::chain(3, 0.1, 0.0);
    Branch extra = f.branches[0];
    extra.from = "n1";
    extra.to = "n3";
    f.branches.push_back(extra);
    const ValidationReport rep = validate_feeder(f);
    CHECK_FALSE(rep.ok());
    CHECK(rep.mentions("non-radial"));
    CHECK_THROWS_WITH_AS(radial_ordering(f), doctest::Contains("non-radial"), std::invalid_argument);
}

TEST_CASE("two users on one bus violate the injective mapping")
{
    Feeder f = fixtures::two_bus(0.1, 0.0);
    f.users.push_back({"u2", "n1", {Phase::a}});
    CHECK(validate_feeder(f).mentions("injective mapping violated"));
}

TEST_CASE("asymmetric impedance and phase mismatch are reported")
{
    Feeder f = fixtures::chain(1, 0.1, 0.0);
    f.branches[0].z_pu(0, 1) = {0.01, 0.0};
    CHECK(validate_feeder(f).mentions("impedance asymmetry"));

    Feeder g = fixtures::two_bus(0.1, 0.0);
    g.users[0].phases = {Phase::b};
    CHECK(validate_feeder(g).mentions("phase mismatch"));
}

TEST_CASE("radial ordering is breadth first with ids breaking ties")
{
    Feeder chain = fixtures::chain(2, 0.1, 0.0);
    const auto order = radial_ordering(chain);
    REQUIRE(order.size() == 3);
    CHECK(chain.buses[order[0].bus].id == "src");
    CHECK(chain.buses[order[1].bus].id == "n1");
    CHECK(chain.buses[order[2].bus].id == "n2");

    Feeder star;
    star.buses.push_back({"src", PhaseSet::all(), 0.9, 1.1, true});
    for (const char* id : {"C", "A", "B"}) {
        star.buses.push_back({id, PhaseSet::all(), 0.9, 1.1, false});
        Branch br;
        br.from = "src";
        br.to = id;
        for (int p = 0; p < 3; ++p) br.z_pu(p, p) = {0.1, 0.0};
        br.s_rated_pu = 1.0;
        star.branches.push_back(br);
    }
    const auto o = radial_ordering(star);
    CHECK(star.buses[o[0].bus].id == "src");
    CHECK(star.buses[o[1].bus].id == "A");
    CHECK(star.buses[o[2].bus].id == "B");
    CHECK(star.buses[o[3].bus].id == "C");
    const auto again = radial_ordering(star);
    for (std::size_t i = 0; i < o.size(); ++i) CHECK(o[i].bus == again[i].bus);
}

TEST_CASE("per-unit conversion of a 0.4 ohm branch")
{
    PhysicalBranch pb;
    pb.phases = {Phase::a};
    pb.r_ohm(0, 0) = 0.4;
    pb.s_rated_kva = 10.0;
    const Branch br = per_unit_convert(pb, 230.0, 10000.0);
    // z_base = 230^2 / 10000 = 5.29 ohm
    CHECK(br.z_pu(0, 0).real() == doctest::Approx(0.4 / 5.29).epsilon(1e-14));
    CHECK(br.z_pu(0, 0).real() == doctest::Approx(0.07561).epsilon(1e-4));
    CHECK(br.s_rated_pu == doctest::Approx(1.0));
    const PhysicalBranch back = to_physical(br, 230.0, 10000.0);
    CHECK(std::abs(back.r_ohm(0, 0) - 0.4) <= 1e-12 * 0.4);

    pb.r_ohm(0, 0) = 0.0;
    CHECK_THROWS_AS(per_unit_convert(pb, 230.0, 10000.0), std::invalid_argument);
    pb.r_ohm(0, 0) = 0.4;
    CHECK_THROWS_AS(per_unit_convert(pb, 0.0, 10000.0), std::invalid_argument);

    pb.r_ohm(0, 0) = 0.3;
    pb.x_ohm(0, 0) = 0.2;
    const Branch unit = per_unit_convert(pb, 1.0, 1.0);
    CHECK(unit.z_pu(0, 0) == Complex(0.3, 0.2));
    CHECK(unit.s_rated_pu == doctest::Approx(10000.0));
}

TEST_CASE("feeder json round trip")
{
    const std::string text = R"({
      "base": {"voltage_v": 230, "power_va": 10000},
      "buses": [{"id": "s", "phases": "abc", "source": true},
                {"id": "b1", "phases": ["a", "b", "c"], "vmin_pu": 0.92, "vmax_pu": 1.08}],
      "branches": [{"from": "s", "to": "b1", "phases": "abc",
                    "r": [[0.2, 0.05, 0.05], [0.05, 0.2, 0.05], [0.05, 0.05, 0.2]],
                    "x": [0.08, 0.08, 0.08], "s_rated_kva": 50}],
      "users": [{"id": "u1", "bus": "b1", "phases": "b"}]
    })";
    const Feeder f = parse_feeder_json(text);
    CHECK(validate_feeder(f).ok());
    CHECK(f.buses[1].vmin_pu == 0.92);
    CHECK(f.branches[0].z_pu(0, 1).real() == doctest::Approx(0.05 / 5.29));
    CHECK(f.branches[0].z_pu(0, 1).imag() == 0.0);
    CHECK(f.branches[0].z_pu(2, 2).imag() == doctest::Approx(0.08 / 5.29));
    const Feeder g = parse_feeder_json(feeder_to_json(f));
    CHECK(feeder_to_json(g) == feeder_to_json(f));
    CHECK((g.branches[0].z_pu - f.branches[0].z_pu).norm() <= 1e-15);
}

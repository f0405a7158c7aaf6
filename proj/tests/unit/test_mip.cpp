#include <doctest.h>

#include <random>

#include "lvdsm/mip/branch_and_bound.hpp"
#include "lvdsm/mip/presolve.hpp"

using namespace lvdsm::mip;

namespace {

// Exhaustive minimum over all 0/1 assignments.
double enumerate(const Problem& p)
{
    const int n = p.variable_count();
    double best = kInf;
    std::vector<double> x(n);
    for (long mask = 0; mask < (1L << n); ++mask) {
        for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1;
        if (p.max_violation(x) <= 1e-9) best = std::min(best, p.objective_value(x));
    }
    return best;
}

Problem random_binary_problem(std::mt19937_64& rng, int n, int m, bool unit_cost)
{
    std::uniform_real_distribution<double> U(0, 1);
    Problem p;
    for (int j = 0; j < n; ++j)
        p.add_variable({"b" + std::to_string(j), 0, 1, true}, unit_cost ? 1.0 : std::round(U(rng) * 10) - 3);
    for (int i = 0; i < m; ++i) {
        Constraint c;
        c.name = "r" + std::to_string(i);
        double total = 0;
        for (int j = 0; j < n; ++j)
            if (U(rng) < 0.5) {
                const double a = std::round((U(rng) * 2 - 0.4) * 100) / 100;
                if (a == 0) continue;
                c.terms.push_back({j, a});
                total += std::abs(a);
            }
        if (c.terms.empty()) continue;
        if (i % 2 == 0) c.lower = U(rng) * total * 0.6;
        else c.upper = U(rng) * total;
        c.lazy = (i % 3 == 0);
        p.add_constraint(std::move(c));
    }
    return p;
}

}  // namespace

TEST_CASE("branch and bound matches enumeration on random binary programs")
{
    std::mt19937_64 rng(11);
    int infeasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + trial % 10;
        Problem p = random_binary_problem(rng, n, 2 + trial % 6, trial % 2 == 0);
        const double expect = enumerate(p);
        MipOptions opt;
        opt.presolve = trial % 3 != 1;
        opt.decompose = trial % 4 != 1;
        const MipResult r = solve_mip(p, opt);
        if (expect == kInf) {
            ++infeasible;
            CHECK(r.status == MipStatus::infeasible);
        } else {
            INFO("trial " << trial << " status " << static_cast<int>(r.status) << " nodes " << r.nodes);
            REQUIRE(r.status == MipStatus::optimal);
            REQUIRE(r.has_incumbent());
            CHECK(r.objective == doctest::Approx(expect));
            CHECK(p.max_violation(r.x) <= 1e-6);
        }
    }
    CHECK(infeasible > 0);
}

TEST_CASE("presolve folds singleton rows and fixed columns")
{
    Problem p;
    p.add_variable({"a", 0, 1, true}, 1);
    p.add_variable({"b", 0, 1, true}, 1);
    p.add_variable({"c", 0, 5, false}, 0);
    p.add_constraint({"fix", {{0, 1}}, 1, 1});
    p.add_constraint({"link", {{0, 1}, {1, 1}, {2, 1}}, 2, kInf});
    const Presolved pre = presolve(p);
    REQUIRE_FALSE(pre.infeasible);
    CHECK(pre.column_map[0] == -1);
    CHECK(pre.fixed_value[0] == 1.0);
    CHECK(pre.reduced.objective_offset == 1.0);
}

TEST_CASE("presolve detects an infeasible row")
{
    Problem p;
    p.add_variable({"a", 0, 1, true}, 1);
    p.add_variable({"b", 0, 1, true}, 1);
    p.add_constraint({"cover", {{0, 1}, {1, 1}}, 3, kInf});
    CHECK(presolve(p).infeasible);
    CHECK(solve_mip(p).status == MipStatus::infeasible);
}

TEST_CASE("independent blocks are split")
{
    Problem p;
    for (int j = 0; j < 4; ++j) p.add_variable({"x" + std::to_string(j), 0, 1, true}, 1);
    p.add_constraint({"a", {{0, 1}, {1, 1}}, 1, kInf});
    p.add_constraint({"b", {{2, 1}, {3, 1}}, 1, kInf});
    CHECK(split_components(p).size() == 2);
    const MipResult r = solve_mip(p);
    CHECK(r.objective == 2.0);
}

TEST_CASE("lp relaxation bounds the integer optimum and certifies infeasible fixings")
{
    Problem p;
    for (int j = 0; j < 3; ++j) p.add_variable({"x" + std::to_string(j), 0, 1, true}, 1);
    p.add_constraint({"cover", {{0, 1}, {1, 1}, {2, 1}}, 1.5, kInf});
    const LpResult lp = solve_lp_relaxation(p);
    REQUIRE(lp.status == LpStatus::optimal);
    CHECK(lp.objective == doctest::Approx(1.5));
    CHECK(solve_mip(p).objective == 2.0);
    std::vector<std::pair<int, double>> fix{{0, 0}, {1, 0}};
    const LpResult bad = solve_lp_relaxation(p, fix);
    REQUIRE(bad.status == LpStatus::infeasible);
    CHECK(farkas_certifies(p, bad.farkas, fix));
}

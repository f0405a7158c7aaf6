#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lvdsm/harness.hpp"

using namespace lvdsm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("lvdsm_harness_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SweepConfig tiny(const fs::path& out)
{
    SweepConfig c;
    c.feeder_count = 2;
    c.min_users = 8;
    c.max_users = 12;
    c.seed = 3;
    c.modalities = {"simple", "single"};
    c.out_dir = out;
    return c;
}

}  // namespace

TEST_CASE("sweep configuration file")
{
    const fs::path dir = scratch("config");
    std::ofstream(dir / "a.ini") << "[cohort]\ncount = 3\nmin_users = 5\nmax_users = 7\nseed = 11\n"
                                    "[modalities]\nlist = simple, triple_delta\n"
                                    "[tightening]\ngrid = 0, 0.01\n"
                                    "[solver]\nnode_limit = 500\n"
                                    "[scenario]\nev_share = 0.5\n"
                                    "[output]\ndir = out\n";
    const SweepConfig c = load_sweep_config(dir / "a.ini");
    CHECK(c.feeder_count == 3);
    CHECK(c.modalities == std::vector<std::string>{"simple", "triple_delta"});
    CHECK(c.grid() == std::vector<double>{0.0, 0.01});
    CHECK(c.node_limit == 500);
    CHECK(c.scenario.ev_share == 0.5);
    CHECK(c.out_dir == dir / "out");
    for (int f = 0; f < 3; ++f) {
        CHECK(c.users_for(f) >= 5);
        CHECK(c.users_for(f) <= 7);
    }

    // the hash ignores the output directory and follows everything else
    SweepConfig moved = c;
    moved.out_dir = "/elsewhere";
    CHECK(moved.hash() == c.hash());
    SweepConfig reseeded = c;
    reseeded.seed = 12;
    CHECK(reseeded.hash() != c.hash());
    SweepConfig rescaled = c;
    rescaled.scenario.p_gtd_kw = 2.5;
    CHECK(rescaled.hash() != c.hash());
    CHECK(c.hash().size() == 16);

    // to_ini reloads to the same configuration
    std::ofstream(dir / "b.ini") << c.to_ini();
    CHECK(load_sweep_config(dir / "b.ini").hash() == c.hash());

    std::ofstream(dir / "bad1.ini") << "[cohort]\ncolour = red\n";
    CHECK_THROWS_AS(load_sweep_config(dir / "bad1.ini"), std::invalid_argument);
    std::ofstream(dir / "bad2.ini") << "[extras]\nx = 1\n";
    CHECK_THROWS_AS(load_sweep_config(dir / "bad2.ini"), std::invalid_argument);
    std::ofstream(dir / "bad3.ini") << "[modalities]\nlist = simple, quadruple\n";
    CHECK_THROWS_AS(load_sweep_config(dir / "bad3.ini"), std::invalid_argument);
    std::ofstream(dir / "bad4.ini") << "[tightening]\ngrid = 0.01, 0.02\n";
    CHECK_THROWS_AS(load_sweep_config(dir / "bad4.ini"), std::invalid_argument);
    std::ofstream(dir / "bad5.ini") << "[cohort]\ncount = 0\n";
    CHECK_THROWS_AS(load_sweep_config(dir / "bad5.ini"), std::invalid_argument);
    std::ofstream(dir / "bad6.ini") << "[cohort]\ncount = lots\n";
    CHECK_THROWS_AS(load_sweep_config(dir / "bad6.ini"), std::invalid_argument);
    std::ofstream(dir / "bad7.ini") << "[scenario]\nn_users = -1\n";
    CHECK_THROWS_AS(load_sweep_config(dir / "bad7.ini"), std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("an uncongested feeder needs nobody")
{
    const fs::path dir = scratch("calm");
    SweepConfig c = tiny(dir);
    c.feeder_count = 1;
    c.scenario.congestion_target = false;
    c.scenario.peak_kw_min = 0.2;
    c.scenario.peak_kw_max = 0.3;
    c.scenario.ev_share = 0.0;
    const MetricsTable t = run_sweep(c, {.workers = 1});
    REQUIRE(t.rows.size() == 2);
    for (const MetricsRow& r : t.rows) {
        CHECK(r.status == "optimal");
        CHECK(r.feasible);
        CHECK(r.objective == 0);
        CHECK(r.participant_fraction == 0.0);
        CHECK(r.reduction_minutes == 0.0);
        CHECK(r.restored);
        CHECK(r.delta_star == 0.0);
    }
    fs::remove_all(dir);
}

TEST_CASE("sweep output is deterministic, resumable and self-consistent")
{
    const fs::path a = scratch("a"), b = scratch("b");
    const SweepConfig ca = tiny(a);
    SweepConfig cb = tiny(b);
    const MetricsTable ta = run_sweep(ca, {.workers = 1});
    emit_report(ta, a);
    const MetricsTable tb = run_sweep(cb, {.workers = 3});
    emit_report(tb, b);

    // 2 feeders x 2 modalities
    REQUIRE(ta.rows.size() == 4);
    CHECK(ta.rows[0].feeder == "f000");
    CHECK(ta.rows[0].modality == "simple");
    CHECK(ta.rows[1].modality == "single");
    CHECK(ta.rows[2].feeder == "f001");
    const std::string metrics = slurp(a / "metrics.csv");
    CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 5);
    CHECK(metrics == slurp(b / "metrics.csv"));
    CHECK(slurp(a / "tightening_curve.csv") == slurp(b / "tightening_curve.csv"));
    CHECK(fs::exists(a / "traces" / "f000_simple.json"));

    // generated cohorts are congested, simple schedules always exist
    for (const MetricsRow& r : ta.rows) {
        CHECK(r.users >= 8);
        CHECK(r.users <= 12);
        if (r.modality == "simple") CHECK(r.feasible);
        if (r.feasible) CHECK(r.objective > 0);
    }

    // summary percentages recomputed from metrics.csv
    const auto rows = parse_metrics_csv(metrics);
    const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
    CHECK(summary.at("config_hash") == ca.hash());
    for (const std::string m : {"simple", "single"}) {
        int n = 0, k = 0, ac = 0;
        for (const MetricsRow& r : rows)
            if (r.modality == m) {
                ++n;
                k += r.feasible;
                ac += r.ac_feasible_at_zero;
            }
        const auto& s = summary.at("modalities").at(m);
        CHECK(s.at("cells") == n);
        CHECK(s.at("feasible_pct").get<double>() == doctest::Approx(100.0 * k / n));
        CHECK(s.at("ac_feasible_at_zero_pct").get<double>() == doctest::Approx(100.0 * ac / n));
    }

    // a second run reuses every row: the recorded wall times do not change
    const std::string timings = slurp(a / "timings.csv");
    const MetricsTable again = run_sweep(ca, {.workers = 1});
    emit_report(again, a);
    CHECK(slurp(a / "timings.csv") == timings);
    CHECK(slurp(a / "metrics.csv") == metrics);

    // the report command path rebuilds the same files
    const fs::path r = scratch("r");
    emit_report(load_report_table(a), r);
    CHECK(slurp(r / "metrics.csv") == metrics);
    CHECK(slurp(r / "summary.json") == slurp(a / "summary.json"));
    CHECK(slurp(r / "tightening_curve.csv") == slurp(a / "tightening_curve.csv"));

    // a different configuration does not reuse rows
    SweepConfig other = ca;
    other.modalities = {"simple"};
    const MetricsTable t3 = run_sweep(other, {.workers = 1});
    CHECK(t3.rows.size() == 2);
    CHECK(t3.config_hash != ta.config_hash);
    CHECK(parse_metrics_csv(slurp(a / "metrics.csv")).size() == 2);

    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(r);
}

TEST_CASE("tightening curve is cumulative")
{
    MetricsTable t;
    t.config_hash = "x";
    t.grid = {0.0, 0.01, 0.02};
    t.modalities = {"simple"};
    auto row = [](const std::string& f, bool restored, double d) {
        MetricsRow r;
        r.config_hash = "x";
        r.feeder = f;
        r.modality = "simple";
        r.status = "optimal";
        r.feasible = true;
        r.restored = restored;
        r.delta_star = d;
        r.blocker = restored ? "" : "ac";
        return r;
    };
    t.rows = {row("f000", true, 0.0), row("f001", true, 0.02), row("f002", false, -1), row("f003", true, 0.01)};
    const fs::path dir = scratch("curve");
    emit_report(t, dir);
    CHECK(slurp(dir / "tightening_curve.csv") ==
          "modality,delta,cumulative_feasible_pct\nsimple,0.0000,25.00\nsimple,0.0100,50.00\nsimple,0.0200,75.00\n");
    const auto s = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(s.at("modalities").at("simple").at("blockers").at("ac") == 1);
    CHECK(s.at("modalities").at("simple").at("delta_star_max").get<double>() == 0.02);
    fs::remove_all(dir);

    CHECK_THROWS_AS(emit_report(MetricsTable{}, dir), std::invalid_argument);
    CHECK_THROWS_AS(emit_report(t, "/proc/lvdsm_cannot_write_here"), std::runtime_error);
}

TEST_CASE("worker count from the environment")
{
    setenv("LVDSM_WORKERS", "3", 1);
    CHECK(worker_count_from_env() == 3);
    setenv("LVDSM_WORKERS", "zero", 1);
    CHECK_THROWS_AS(worker_count_from_env(), std::invalid_argument);
    unsetenv("LVDSM_WORKERS");
    CHECK(worker_count_from_env() >= 1);
}

TEST_CASE("metrics csv parsing")
{
    CHECK_THROWS_AS(parse_metrics_csv("a,b\n"), std::invalid_argument);
    MetricsTable t;
    MetricsRow r;
    r.config_hash = "h";
    r.feeder = "f000";
    r.modality = "single";
    r.status = "timeout";
    r.note = "has, commas\nand lines";
    t.rows = {r};
    const auto back = parse_metrics_csv(metrics_to_csv(t));
    REQUIRE(back.size() == 1);
    CHECK(back[0].status == "timeout");
    CHECK(back[0].note == "has  commas and lines");
    CHECK(back[0].delta_star == -1.0);
}

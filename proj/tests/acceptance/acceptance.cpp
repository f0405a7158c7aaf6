// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixtures.hpp"
#include "random_instance.hpp"
#include "lvdsm/acpf.hpp"
#include "lvdsm/contracts.hpp"
#include "lvdsm/harness.hpp"
#include "lvdsm/injections.hpp"
#include "lvdsm/linpf.hpp"
#include "lvdsm/scenario.hpp"
#include "lvdsm/scheduler.hpp"

using namespace lvdsm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, const char* spec = "%.3g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path kCohortConfig = fs::path(LVDSM_SOURCE_DIR) / "configs" / "cohort.ini";
const fs::path kOut = fs::path(LVDSM_BINARY_DIR) / "acceptance_out";

// The cohort feeders exactly as the sweep generates them.
std::vector<Scenario> cohort()
{
    const SweepConfig c = load_sweep_config(kCohortConfig);
    std::vector<Scenario> out;
    for (int f = 0; f < c.feeder_count; ++f) {
        ScenarioParams p = c.scenario;
        p.n_users = c.users_for(f);
        p.seed = c.seed_for(f);
        out.push_back(generate_scenario(p));
    }
    return out;
}

// 1 -------------------------------------------------------------------------

Outcome oracle_equivalence()
{
    const auto t0 = Clock::now();
    int cases = 0, feasible = 0, infeasible = 0, mismatches = 0;
    std::string first_bad;
    for (int i = 0; i < 200; ++i) {
        const int users = 1 + i % 4;
        const int horizon = 1 + (i / 4) % 5;
        const auto inst = testing_support::random_instance(5000 + static_cast<std::uint64_t>(i), users, horizon, 60);
        for (const ModalityPreset& mod : preset_modalities(60)) {
            const auto cs = uniform_contracts(inst.feeder, mod, inst.p_gtd_kw);
            const SolveResult milp = solve_milp(build_milp(inst.feeder, inst.profiles, cs, inst.limits));
            BruteForceOptions bo;
            bo.checker = Checker::lin;
            const BruteForceResult bf = brute_force_schedule(inst.feeder, inst.profiles, cs, inst.limits, {}, bo);
            ++cases;
            const bool milp_ok = milp.status == mip::MipStatus::optimal;
            bool agree = milp_ok == bf.feasible && milp.status != mip::MipStatus::timeout;
            if (agree && bf.feasible) agree = milp.schedule.objective == bf.schedule.objective;
            (bf.feasible ? feasible : infeasible)++;
            if (!agree && ++mismatches == 1)
                first_bad = "instance " + std::to_string(i) + " " + mod.name + ": milp " + mip::to_string(milp.status) +
                            " obj " + std::to_string(milp.has_schedule ? milp.schedule.objective : -1) +
                            ", brute force " + (bf.feasible ? std::to_string(bf.schedule.objective) : "infeasible");
        }
    }
    const double secs = since(t0);
    Outcome o;
    o.pass = mismatches == 0 && secs < 120.0 && feasible > 0 && infeasible > 0;
    o.detail = std::to_string(cases) + " instance x modality cases (" + std::to_string(feasible) + " feasible, " +
               std::to_string(infeasible) + " infeasible), " + std::to_string(mismatches) + " disagreements, " +
               num(secs, "%.1f") + " s (limit 120 s)";
    if (!first_bad.empty()) o.detail += "; first: " + first_bad;
    return o;
}

// 2 -------------------------------------------------------------------------

// Run-length view of one user's row, computed without the library.
struct RowCheck {
    bool valid = true;
    std::string why;
};

RowCheck check_row(const std::vector<int>& s, const std::vector<int>& y, const std::vector<int>& z, const Contract& c)
{
    const int T = static_cast<int>(s.size());
    for (int t = 0; t < T; ++t)
        if (s[t] < 0 || s[t] > 1 || y[t] < 0 || y[t] > 1 || z[t] < 0 || z[t] > 1) return {false, "value"};
    for (int t = 0; t < T; ++t) {
        const int prev = t ? s[t - 1] : 0;
        if (y[t] != (s[t] && !prev) || z[t] != (!s[t] && prev)) return {false, "identity"};
    }
    std::vector<std::pair<int, int>> runs;  // [start, end)
    for (int t = 0; t < T;) {
        if (!s[t]) {
            ++t;
            continue;
        }
        int e = t;
        while (e < T && s[e]) ++e;
        runs.push_back({t, e});
        t = e;
    }
    if (c.eta != kUnlimited && static_cast<int>(runs.size()) > c.eta) return {false, "activations"};
    for (auto [a, b] : runs)
        if (c.alpha_steps != kUnlimited && b - a > c.alpha_steps) return {false, "duration"};
    for (std::size_t k = 1; k < runs.size(); ++k)
        if (runs[k].first - runs[k - 1].second <= c.delta_steps) return {false, "gap"};
    return {};
}

void derive_transitions(const std::vector<int>& s, std::vector<int>& y, std::vector<int>& z)
{
    for (std::size_t t = 0; t < s.size(); ++t) {
        const int prev = t ? s[t - 1] : 0;
        y[t] = s[t] && !prev;
        z[t] = !s[t] && prev;
    }
}

Outcome comfort_properties()
{
    const auto t0 = Clock::now();
    const auto presets = preset_modalities(60);
    std::mt19937_64 rng(20240611);
    int outputs = 0, mutants = 0, output_flags = 0, oracle_rejects_output = 0, missed = 0, oracle_disagrees = 0;
    std::set<std::string> kinds_seen;
    std::string first_bad;
    for (std::uint64_t seed = 1; outputs < 5000 && seed < 200000; ++seed) {
        const int users = 1 + static_cast<int>(seed % 4);
        const int horizon = 6 + static_cast<int>((seed / 4) % 11);
        const ModalityPreset& mod = presets[(seed / 44) % presets.size()];
        const auto inst = testing_support::random_instance(seed, users, horizon, 60);
        const auto cs = contracts_for(inst.feeder, uniform_contracts(inst.feeder, mod, inst.p_gtd_kw));
        const SolveResult r = solve_milp(build_milp(inst.feeder, inst.profiles, cs, inst.limits));
        if (!r.has_schedule) continue;
        ++outputs;
        const Schedule& out = r.schedule;

        // solver output: library and run-length oracle must both accept
        if (!verify_schedule(out, cs, horizon).empty()) ++output_flags;
        for (int u = 0; u < users; ++u) {
            std::vector<int> s(horizon), y(horizon), z(horizon);
            for (int t = 0; t < horizon; ++t) {
                s[t] = out.s_at(u, t);
                y[t] = out.y_at(u, t);
                z[t] = out.z_at(u, t);
            }
            if (!check_row(s, y, z, cs[u]).valid) ++oracle_rejects_output;
        }

        // one hand mutation per output, of a kind the contract can violate
        const int u = static_cast<int>(rng() % users);
        const Contract& c = cs[u];
        std::vector<std::string> kinds = {"identity", "value"};
        if (c.eta != kUnlimited && (c.eta + 1) + c.eta * (c.delta_steps + 1) <= horizon) kinds.push_back("activations");
        if (c.alpha_steps != kUnlimited && c.alpha_steps + 1 <= horizon) kinds.push_back("duration");
        if (c.delta_steps > 0 && c.delta_steps + 2 <= horizon && (c.eta == kUnlimited || c.eta >= 2))
            kinds.push_back("gap");
        const std::string kind = kinds[rng() % kinds.size()];

        Schedule m = out;
        std::vector<int> s(horizon), y(horizon), z(horizon);
        for (int t = 0; t < horizon; ++t) s[t] = m.s_at(u, t);
        if (kind == "activations") {
            // eta + 1 single-step actions, gaps just wide enough
            std::fill(s.begin(), s.end(), 0);
            const int span = (c.eta + 1) + c.eta * (c.delta_steps + 1);
            const int off = static_cast<int>(rng() % (horizon - span + 1));
            for (int k = 0; k <= c.eta; ++k) s[off + k * (c.delta_steps + 2)] = 1;
        } else if (kind == "duration") {
            std::fill(s.begin(), s.end(), 0);
            const int off = static_cast<int>(rng() % (horizon - c.alpha_steps));
            for (int k = 0; k <= c.alpha_steps; ++k) s[off + k] = 1;
        } else if (kind == "gap") {
            std::fill(s.begin(), s.end(), 0);
            const int off = static_cast<int>(rng() % (horizon - c.delta_steps - 1));
            s[off] = 1;
            s[off + c.delta_steps + 1] = 1;
        }
        derive_transitions(s, y, z);
        const int at = static_cast<int>(rng() % horizon);
        if (kind == "identity") (rng() % 2 ? y[at] : z[at]) ^= 1;
        if (kind == "value") s[at] = 2;
        for (int t = 0; t < horizon; ++t) {
            const std::size_t k = static_cast<std::size_t>(u) * horizon + t;
            m.s[k] = static_cast<std::uint8_t>(s[t]);
            m.y[k] = static_cast<std::uint8_t>(y[t]);
            m.z[k] = static_cast<std::uint8_t>(z[t]);
        }
        ++mutants;
        kinds_seen.insert(kind);
        const RowCheck oracle = check_row(s, y, z, c);
        if (oracle.valid || oracle.why != kind) ++oracle_disagrees;  // the construction itself is wrong
        const auto flags = verify_schedule(m, cs, horizon);
        const bool hit = std::any_of(flags.begin(), flags.end(), [&](const Violation& v) { return v.user == c.user_id && v.kind == kind; });
        if (!hit && ++missed == 1)
            first_bad = "seed " + std::to_string(seed) + " " + mod.name + " mutation " + kind + " not flagged";
    }
    Outcome o;
    const int total = outputs + mutants;
    o.pass = total >= 10000 && output_flags == 0 && oracle_rejects_output == 0 && missed == 0 &&
             oracle_disagrees == 0 && kinds_seen.size() == 5;
    o.detail = std::to_string(outputs) + " solver outputs + " + std::to_string(mutants) + " mutants (" +
               std::to_string(kinds_seen.size()) + " mutation kinds); outputs flagged " +
               std::to_string(output_flags) + ", outputs breaking run-length oracle " +
               std::to_string(oracle_rejects_output) + ", mutants missed " + std::to_string(missed) + ", " +
               num(since(t0), "%.1f") + " s";
    if (!first_bad.empty()) o.detail += "; first: " + first_bad;
    return o;
}

// 3 -------------------------------------------------------------------------

Outcome ac_accuracy()
{
    const RadialNetwork two(fixtures::two_bus(0.1, 0.0));
    Injections d(1, 1);
    d.p(0, 0, 0) = 0.1;
    const AcPfSolution sol = solve_ac_pf(two, d);
    // V^2 - V + rP = 0 for a resistive line fed at 1 p.u.
    const double exact = (1.0 + std::sqrt(1.0 - 4.0 * 0.1 * 0.1)) / 2.0;
    const double v2 = sol.converged ? std::abs(sol.v_at(1, 0, 0)) : 0.0;
    const bool closed_form = sol.converged && std::abs(v2 - exact) <= 1e-8 && std::abs(v2 - 0.98990) < 5e-6;

    int solves = 0, converged = 0;
    double worst = 0.0;
    for (const Scenario& sc : cohort()) {
        const RadialNetwork net(sc.feeder);
        const auto contracts = uniform_contracts(sc.feeder, find_preset("simple", sc.profiles.step_minutes()), 2.0);
        const ProfileSet forecast = sc.profiles.aligned_to(sc.feeder);
        const std::vector<std::uint8_t> all(static_cast<std::size_t>(forecast.user_count()) * forecast.horizon(), 1);
        const ProfileSet at_gtd = make_schedule(forecast, contracts_for(sc.feeder, contracts), all).demand;
        for (const ProfileSet* prof : {&sc.profiles, &sc.baseline, &at_gtd}) {
            const Injections inj = forecast_injections(sc.feeder, *prof);
            const AcPfSolution ac = solve_ac_pf(net, inj);
            ++solves;
            if (!ac.converged) continue;
            ++converged;
            worst = std::max(worst, kirchhoff_mismatch(net, inj, ac));
        }
    }
    Outcome o;
    o.pass = closed_form && converged > 0 && worst <= 1e-8;
    o.detail = "two-bus |V2| = " + num(v2, "%.10f") + " (closed form " + num(exact, "%.10f") + ", error " +
               num(std::abs(v2 - exact), "%.2e") + "); cohort: " + std::to_string(converged) + "/" +
               std::to_string(solves) + " converged 96-step solves, worst Kirchhoff mismatch " + num(worst, "%.2e") +
               " p.u. (limit 1e-8)";
    return o;
}

// 4 -------------------------------------------------------------------------

double peak_loading(const RadialNetwork& net, const AcPfSolution& ac)
{
    const Feeder& f = net.feeder();
    double worst = 0.0;
    for (int br = 0; br < net.branch_count(); ++br)
        for (Phase p : f.branches[br].phases)
            for (int t = 0; t < ac.horizon; ++t)
                worst = std::max(worst, std::abs(ac.s_at(br, index(p), t)) / f.branches[br].s_rated_pu);
    return worst;
}

ProfileSet scaled(const ProfileSet& prof, double k)
{
    ProfileSet out = prof;
    for (int u = 0; u < out.user_count(); ++u)
        for (Phase p : out.user_phases(u))
            for (int t = 0; t < out.horizon(); ++t) {
                out.p_kw(u, p, t) *= k;
                out.q_kvar(u, p, t) *= k;
            }
    return out;
}

Outcome linearization_fidelity()
{
    double worst = 0.0, worst_loading = 0.0;
    int feeders = 0, failures = 0;
    for (const Scenario& sc : cohort()) {
        const RadialNetwork net(sc.feeder);
        // the forecast, scaled down until no branch exceeds its rating
        double k = 1.0;
        AcPfSolution ac;
        for (int it = 0; it < 30; ++it) {
            ac = solve_ac_pf(net, forecast_injections(sc.feeder, scaled(sc.profiles, k)));
            if (ac.converged && peak_loading(net, ac) <= 1.0) break;
            k *= ac.converged ? 0.999 / peak_loading(net, ac) : 0.8;
        }
        const Injections inj = forecast_injections(sc.feeder, scaled(sc.profiles, k));
        if (!ac.converged || peak_loading(net, ac) > 1.0) {
            ++failures;
            continue;
        }
        ++feeders;
        worst_loading = std::max(worst_loading, peak_loading(net, ac));
        const LinPfSolution lin = evaluate_lin_pf(net, inj);
        for (int b = 0; b < net.bus_count(); ++b)
            for (Phase p : sc.feeder.buses[b].phases)
                for (int t = 0; t < ac.horizon; ++t)
                    worst = std::max(worst, std::abs(lin.u_at(b, index(p), t) - std::norm(ac.v_at(b, index(p), t))));
    }
    Outcome o;
    o.pass = failures == 0 && feeders == 20 && worst <= 0.01;
    o.detail = std::to_string(feeders) + " feeders at up to " + num(100.0 * worst_loading, "%.1f") +
               "% of rating, max |u_lin - |V|^2| = " + num(worst, "%.5f") + " p.u.^2 (limit 0.01)";
    if (failures) o.detail += ", " + std::to_string(failures) + " feeders could not be loaded within rating";
    return o;
}

// 5, 6, 8 -------------------------------------------------------------------

struct SweepRun {
    MetricsTable table;
    fs::path dir;
    double seconds = 0.0;
};

SweepRun sweep(const std::string& name, int workers)
{
    SweepConfig c = load_sweep_config(kCohortConfig);
    c.out_dir = kOut / name;
    fs::remove_all(c.out_dir);
    SweepOptions opt;
    opt.workers = workers;
    opt.resume = false;
    const auto t0 = Clock::now();
    SweepRun r{run_sweep(c, opt), c.out_dir, 0.0};
    emit_report(r.table, r.dir);
    r.seconds = since(t0);
    return r;
}

SweepRun& first_sweep()
{
    static SweepRun run = sweep("sweep_w1", 1);
    return run;
}

Outcome tightening_behaviour()
{
    const SweepRun& run = first_sweep();
    // curve as emitted
    std::map<std::string, std::vector<std::pair<double, double>>> curves;
    std::istringstream in(slurp(run.dir / "tightening_curve.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string m, d, p;
        std::getline(ls, m, ',');
        std::getline(ls, d, ',');
        std::getline(ls, p, ',');
        curves[m].push_back({std::stod(d), std::stod(p)});
    }
    bool ok = curves.size() == run.table.modalities.size();
    std::string detail;
    for (const std::string& m : run.table.modalities) {
        const auto& c = curves[m];
        bool monotone = !c.empty();
        for (std::size_t i = 1; i < c.size(); ++i) monotone = monotone && c[i].second >= c[i - 1].second;
        const double at0 = c.empty() ? 100.0 : c.front().second;
        double reach = -1.0;
        for (auto [d, p] : c)
            if (p >= 100.0 && d <= 0.03 + 1e-12) {
                reach = d;
                break;
            }
        // every cell never restored must show an infeasible MILP in its trace
        int blocked = 0, undocumented = 0;
        for (const MetricsRow& r : run.table.rows) {
            if (r.modality != m || r.restored) continue;
            const fs::path trace = run.dir / "traces" / (r.feeder + "_" + m + ".json");
            const bool documented = fs::exists(trace) && nlohmann::json::parse(slurp(trace)).at("milp_infeasible_seen") == true;
            (documented ? blocked : undocumented)++;
        }
        const bool good = monotone && at0 < 100.0 && (reach >= 0.0 || undocumented == 0);
        ok = ok && good;
        if (!detail.empty()) detail += "; ";
        detail += m + ": " + num(at0, "%.0f") + "% at 0";
        if (reach >= 0.0) detail += ", 100% at " + num(reach, "%.4f");
        else detail += ", max " + num(c.empty() ? 0.0 : c.back().second, "%.0f") + "% with " + std::to_string(blocked) +
                       " MILP-infeasible blocker(s)";
        if (undocumented) detail += ", " + std::to_string(undocumented) + " undocumented";
        if (!monotone) detail += ", NOT monotone";
    }
    return {ok, "20-feeder cohort, " + detail};
}

Outcome modality_ordering()
{
    const SweepRun& run = first_sweep();
    std::map<std::string, std::pair<int, int>> count;  // feasible, cells
    for (const MetricsRow& r : run.table.rows) {
        count[r.modality].first += r.feasible;
        ++count[r.modality].second;
    }
    auto pct = [&](const std::string& m) { return 100.0 * count[m].first / std::max(1, count[m].second); };
    const double simple = pct("simple");
    bool ok = simple == 100.0;
    std::string detail = "feasible %:";
    for (const std::string& m : run.table.modalities) {
        ok = ok && pct(m) <= simple;
        detail += " " + m + " " + num(pct(m), "%.0f");
    }
    return {ok, detail};
}

Outcome scale_runtime()
{
    double worst = 0.0, worst_simple = 0.0;
    int cells = 0, unsolved = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SweepConfig c = load_sweep_config(kCohortConfig);
        ScenarioParams p = c.scenario;
        p.n_users = 30;
        p.seed = seed;
        const Scenario sc = generate_scenario(p);
        const RadialNetwork net(sc.feeder);
        const Limits limits = Limits::from_feeder(sc.feeder, sc.profiles.horizon());
        for (const ModalityPreset& mod : preset_modalities(sc.profiles.step_minutes())) {
            const auto contracts = uniform_contracts(sc.feeder, mod, p.p_gtd_kw);
            const auto t0 = Clock::now();
            const MilpModel m = build_milp(sc.feeder, sc.profiles, contracts, limits);
            const SolveResult r = solve_milp(m);
            bool verified = false;
            if (r.has_schedule) {
                const AcPfSolution ac = solve_ac_pf(net, forecast_injections(sc.feeder, r.schedule.demand));
                if (ac.converged) {
                    detect_congestion(net, ac, limits);
                    verified = true;
                }
            }
            const double secs = since(t0);
            ++cells;
            unsolved += !(r.status == mip::MipStatus::optimal && verified);
            worst = std::max(worst, secs);
            if (mod.name == "simple") worst_simple = std::max(worst_simple, secs);
        }
    }
    Outcome o;
    o.pass = unsolved == 0 && worst <= 60.0 && worst_simple <= 5.0;
    o.detail = "5 feeders x 30 users x 96 steps, " + std::to_string(cells) + " modality runs (build + MILP + AC): slowest " +
               num(worst, "%.2f") + " s (limit 60), slowest simple " + num(worst_simple, "%.2f") + " s (limit 5)";
    if (unsolved) o.detail += ", " + std::to_string(unsolved) + " not solved to optimality";
    return o;
}

Outcome determinism()
{
    const SweepRun& a = first_sweep();
    const SweepRun b = sweep("sweep_w3", 3);
    const SweepRun c = sweep("sweep_w1_again", 1);
    const std::string ma = slurp(a.dir / "metrics.csv");
    const bool same_b = ma == slurp(b.dir / "metrics.csv");
    const bool same_c = ma == slurp(c.dir / "metrics.csv");
    return {same_b && same_c && !ma.empty(),
            "metrics.csv (" + std::to_string(ma.size()) + " bytes) " + (same_c ? "identical" : "DIFFERS") +
                " on a repeat 1-worker run, " + (same_b ? "identical" : "DIFFERS") + " with 3 workers; sweeps took " +
                num(a.seconds, "%.1f") + ", " + num(c.seconds, "%.1f") + ", " + num(b.seconds, "%.1f") + " s"};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle equivalence", oracle_equivalence},
        {"comfort-constraint properties", comfort_properties},
        {"AC power flow accuracy", ac_accuracy},
        {"linearization fidelity", linearization_fidelity},
        {"bound-tightening behaviour", tightening_behaviour},
        {"modality ordering", modality_ordering},
        {"scale and runtime", scale_runtime},
        {"determinism", determinism},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
    fs::create_directories(kOut);

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!pick.empty() && !pick.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}

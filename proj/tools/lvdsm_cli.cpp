#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "lvdsm/acpf.hpp"
#include "lvdsm/contracts.hpp"
#include "lvdsm/feeder_io.hpp"
#include "lvdsm/harness.hpp"
#include "lvdsm/injections.hpp"
#include "lvdsm/json_io.hpp"
#include "lvdsm/mip/lp_format.hpp"
#include "lvdsm/scenario.hpp"
#include "lvdsm/scheduler.hpp"
#include "lvdsm/tightening.hpp"

using namespace lvdsm;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNoSchedule = 2;

void write_json(const nlohmann::json& doc, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << '\n';
}

struct GenArgs {
    std::string config, out;
    int users = -1;
    long long seed = -1;
    double margin = -1.0, ev_share = -1.0;
};

int run_gen(const GenArgs& a)
{
    ScenarioParams p = a.config.empty() ? ScenarioParams{} : load_scenario_params(a.config);
    if (a.users >= 0) p.n_users = a.users;
    if (a.seed >= 0) p.seed = static_cast<std::uint64_t>(a.seed);
    if (a.margin >= 0.0) p.congestion_margin = a.margin;
    if (a.ev_share >= 0.0) p.ev_share = a.ev_share;
    const Scenario sc = generate_scenario(p);
    const std::filesystem::path dir = a.out;
    std::filesystem::create_directories(dir);
    save_feeder(sc.feeder, dir / "feeder.json");
    save_profiles(sc.profiles, dir / "profiles.csv");
    save_profiles(sc.baseline, dir / "baseline.csv");
    std::ofstream(dir / "scenario.ini") << scenario_params_to_ini(p);
    std::cout << "users " << sc.feeder.users.size() << " buses " << sc.feeder.buses.size() << " congested "
              << (sc.congested ? "yes" : "no") << " scale " << sc.baseline_scale << " -> " << dir.string() << '\n';
    return kOk;
}

struct SolveArgs {
    std::string feeder, profiles, modality = "simple", out, export_lp;
    double delta = 0.0, p_gtd = 2.0, time_limit = 60.0;
    long node_limit = -1;
    bool tighten = false;
};

int run_solve(const SolveArgs& a)
{
    const Feeder feeder = load_feeder(a.feeder);
    const ProfileSet profiles = load_profiles(a.profiles);
    const auto contracts = uniform_contracts(feeder, find_preset(a.modality, profiles.step_minutes()), a.p_gtd);
    const Limits limits = Limits::from_feeder(feeder, profiles.horizon());
    mip::MipOptions mo;
    mo.time_limit_s = a.time_limit;
    mo.node_limit = a.node_limit;

    if (a.tighten) {
        TighteningOptions opt;
        opt.mip = mo;
        std::vector<double> grid;
        for (double d : default_delta_grid())
            if (d <= a.delta + 1e-12 || a.delta == 0.0) grid.push_back(d);
        opt.grid = grid;
        const TighteningResult res = tighten_and_resolve(feeder, profiles, contracts, limits, opt);
        write_json(to_json(res), a.out);
        std::cerr << (res.found ? "restored at delta " + std::to_string(res.delta_star) : "no AC-feasible schedule")
                  << '\n';
        for (const TighteningStep& s : res.trace)
            if (s.milp_status != mip::MipStatus::optimal) return kNoSchedule;
        return res.found ? kOk : kNoSchedule;
    }

    const Tightening tight{a.delta, a.delta, a.delta};
    tight.validate();
    const MilpModel model = build_milp(feeder, profiles, contracts, limits, tight);
    if (!a.export_lp.empty()) mip::write_lp_file(model.problem, a.export_lp);
    const SolveResult res = solve_milp(model, mo);
    std::cerr << "status " << mip::to_string(res.status) << " nodes " << res.nodes;
    if (res.has_schedule) std::cerr << " objective " << res.schedule.objective;
    std::cerr << '\n';
    nlohmann::json doc = {{"status", mip::to_string(res.status)}, {"nodes", res.nodes}};
    if (res.has_schedule) doc["schedule"] = to_json(res.schedule);
    write_json(doc, a.out);
    return res.status == mip::MipStatus::optimal ? kOk : kNoSchedule;
}

struct VerifyArgs {
    std::string feeder, profiles, schedule, modality = "simple", out;
    double p_gtd = 2.0;
};

int run_verify(const VerifyArgs& a)
{
    const Feeder feeder = load_feeder(a.feeder);
    const ProfileSet profiles = load_profiles(a.profiles).aligned_to(feeder);
    const auto contracts = contracts_for(
        feeder, uniform_contracts(feeder, find_preset(a.modality, profiles.step_minutes()), a.p_gtd));
    std::ifstream in(a.schedule);
    if (!in) throw std::runtime_error("cannot read " + a.schedule);
    nlohmann::json doc = nlohmann::json::parse(in);
    // accept both a bare schedule and the output of solve
    if (doc.contains("schedule") && !doc.contains("s")) doc = doc.at("schedule");
    const Schedule schedule = schedule_from_json(doc, profiles, contracts);

    const RadialNetwork net(feeder);
    const AcPfSolution ac = solve_ac_pf(net, forecast_injections(feeder, schedule.demand));
    nlohmann::json report = {{"ac_converged", ac.converged}};
    if (ac.converged) report["congestion"] = to_json(detect_congestion(net, ac, Limits::from_feeder(feeder, profiles.horizon())));
    else report["message"] = ac.message;
    nlohmann::json violations = nlohmann::json::array();
    for (const Violation& v : verify_schedule(schedule, contracts, profiles.horizon()))
        violations.push_back({{"user", v.user}, {"t", v.t}, {"kind", v.kind}, {"detail", v.detail}});
    report["comfort_violations"] = violations;
    report["objective"] = schedule.objective;
    write_json(report, a.out);
    return kOk;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out, bool fresh)
{
    SweepConfig config = load_sweep_config(config_path);
    if (!out.empty()) config.out_dir = out;
    SweepOptions opt;
    opt.resume = !fresh;
    const MetricsTable table = run_sweep(config, opt);
    emit_report(table, config.out_dir);
    int feasible = 0;
    for (const MetricsRow& r : table.rows) feasible += r.feasible;
    std::cout << table.rows.size() << " cells, " << feasible << " MILP-feasible, config " << table.config_hash
              << " -> " << config.out_dir.string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Day-ahead demand-reduction scheduling for low-voltage feeders"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a synthetic feeder and forecast");
    g->add_option("--config", gen.config, "Scenario key file")->check(CLI::ExistingFile);
    g->add_option("--users", gen.users, "Number of users");
    g->add_option("--seed", gen.seed, "Random seed");
    g->add_option("--margin", gen.margin, "Congestion margin");
    g->add_option("--ev-share", gen.ev_share, "Share of users with an EV session");
    g->add_option("--out", gen.out, "Output directory")->required();

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Schedule one feeder");
    s->add_option("--feeder", solve.feeder, "Feeder JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--profiles", solve.profiles, "Forecast CSV")->required()->check(CLI::ExistingFile);
    s->add_option("--modality", solve.modality, "simple, single, double, double_delta or triple_delta");
    s->add_option("--delta", solve.delta,
                  "Tightening of every limit; with --tighten, the largest grid value to try (0: whole grid)");
    s->add_option("--p-gtd", solve.p_gtd, "Guaranteed power per user, kW");
    s->add_option("--time-limit", solve.time_limit, "Seconds, 0 for none");
    s->add_option("--node-limit", solve.node_limit, "Branch-and-bound nodes, -1 for none");
    s->add_flag("--tighten", solve.tighten, "Run the tightening loop against the AC power flow");
    s->add_option("--out", solve.out, "Result JSON (stdout when omitted)");
    s->add_option("--export-lp", solve.export_lp, "Also write the model in LP format");

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "AC and comfort check of a schedule file");
    v->add_option("--feeder", verify.feeder, "Feeder JSON")->required()->check(CLI::ExistingFile);
    v->add_option("--profiles", verify.profiles, "Forecast CSV")->required()->check(CLI::ExistingFile);
    v->add_option("--schedule", verify.schedule, "Schedule JSON")->required()->check(CLI::ExistingFile);
    v->add_option("--modality", verify.modality, "Modality the schedule must respect");
    v->add_option("--p-gtd", verify.p_gtd, "Guaranteed power per user, kW");
    v->add_option("--out", verify.out, "Report JSON (stdout when omitted)");

    std::string sweep_config, sweep_out;
    bool fresh = false;
    auto* w = app.add_subcommand("sweep", "Run a cohort x modality sweep");
    w->add_option("--config", sweep_config, "Sweep configuration")->required()->check(CLI::ExistingFile);
    w->add_option("--out", sweep_out, "Output directory, overriding the config");
    w->add_flag("--fresh", fresh, "Ignore rows from earlier runs");

    std::string report_in, report_out;
    auto* r = app.add_subcommand("report", "Rebuild summary files from metrics.csv");
    r->add_option("--in", report_in, "Sweep output directory")->required()->check(CLI::ExistingDirectory);
    r->add_option("--out", report_out, "Report directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*g) return run_gen(gen);
        if (*s) return run_solve(solve);
        if (*v) return run_verify(verify);
        if (*w) return run_sweep_cmd(sweep_config, sweep_out, fresh);
        if (*r) {
            emit_report(load_report_table(report_in), report_out);
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "lvdsm/acpf.hpp"
#include "lvdsm/contracts.hpp"
#include "lvdsm/feeder_io.hpp"
#include "lvdsm/harness.hpp"
#include "lvdsm/injections.hpp"
#include "lvdsm/json_io.hpp"
#include "lvdsm/scenario.hpp"
#include "lvdsm/scheduler.hpp"
#include "lvdsm/tightening.hpp"

namespace py = pybind11;
using namespace lvdsm;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::handle& obj)
{
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

struct Inputs {
    Feeder feeder;
    ProfileSet profiles;
    std::vector<Contract> contracts;
    Limits limits;
};

Inputs inputs(const std::string& feeder_json, const std::string& profiles_csv, const std::string& modality,
              double p_gtd_kw, int step_minutes)
{
    Inputs in;
    in.feeder = parse_feeder_json(feeder_json);
    in.profiles = parse_profiles_csv(profiles_csv, step_minutes).aligned_to(in.feeder);
    in.contracts = contracts_for(in.feeder, uniform_contracts(in.feeder, find_preset(modality, step_minutes), p_gtd_kw));
    in.limits = Limits::from_feeder(in.feeder, in.profiles.horizon());
    return in;
}

py::array_t<std::uint8_t> status_matrix(const Schedule& s)
{
    const auto users = static_cast<py::ssize_t>(s.user_ids.size());
    py::array_t<std::uint8_t> a({users, static_cast<py::ssize_t>(s.horizon)});
    std::copy(s.s.begin(), s.s.end(), a.mutable_data());
    return a;
}

py::dict schedule_dict(const Schedule& s)
{
    py::dict d = to_py(to_json(s)).cast<py::dict>();
    d["s"] = status_matrix(s);
    return d;
}

py::dict generate(int n_users, std::uint64_t seed, double congestion_margin, double ev_share, double p_gtd_kw,
                  bool congestion_target)
{
    ScenarioParams p;
    p.n_users = n_users;
    p.seed = seed;
    p.congestion_margin = congestion_margin;
    p.ev_share = ev_share;
    p.p_gtd_kw = p_gtd_kw;
    p.congestion_target = congestion_target;
    Scenario sc;
    {
        py::gil_scoped_release release;
        sc = generate_scenario(p);
    }
    py::dict d;
    d["feeder_json"] = feeder_to_json(sc.feeder);
    d["profiles_csv"] = profiles_to_csv(sc.profiles);
    d["baseline_csv"] = profiles_to_csv(sc.baseline);
    d["congested"] = sc.congested;
    d["baseline_scale"] = sc.baseline_scale;
    d["users"] = sc.feeder.users.size();
    d["horizon"] = sc.profiles.horizon();
    return d;
}

py::list presets(int step_minutes)
{
    py::list out;
    for (const ModalityPreset& m : preset_modalities(step_minutes)) {
        py::dict d;
        d["name"] = m.name;
        d["eta"] = m.eta == kUnlimited ? py::object(py::none()) : py::object(py::int_(m.eta));
        d["alpha_steps"] = m.alpha_steps == kUnlimited ? py::object(py::none()) : py::object(py::int_(m.alpha_steps));
        d["delta_steps"] = m.delta_steps;
        out.append(d);
    }
    return out;
}

py::dict solve(const std::string& feeder_json, const std::string& profiles_csv, const std::string& modality,
               double p_gtd_kw, double delta, double time_limit_s, long node_limit, int step_minutes)
{
    const Inputs in = inputs(feeder_json, profiles_csv, modality, p_gtd_kw, step_minutes);
    const Tightening tight{delta, delta, delta};
    tight.validate();
    mip::MipOptions opt;
    opt.time_limit_s = time_limit_s;
    opt.node_limit = node_limit;
    SolveResult res;
    {
        py::gil_scoped_release release;
        res = solve_milp(build_milp(in.feeder, in.profiles, in.contracts, in.limits, tight), opt);
    }
    py::dict d;
    d["status"] = mip::to_string(res.status);
    d["nodes"] = res.nodes;
    d["bound"] = res.bound;
    d["schedule"] = res.has_schedule ? py::object(schedule_dict(res.schedule)) : py::object(py::none());
    return d;
}

py::dict tighten(const std::string& feeder_json, const std::string& profiles_csv, const std::string& modality,
                 double p_gtd_kw, std::optional<std::vector<double>> grid, double time_limit_s, int step_minutes)
{
    const Inputs in = inputs(feeder_json, profiles_csv, modality, p_gtd_kw, step_minutes);
    TighteningOptions opt;
    if (grid) opt.grid = *grid;
    opt.mip.time_limit_s = time_limit_s;
    TighteningResult res;
    {
        py::gil_scoped_release release;
        res = tighten_and_resolve(in.feeder, in.profiles, in.contracts, in.limits, opt);
    }
    py::dict d = to_py(to_json(res)).cast<py::dict>();
    if (res.found) d["schedule"] = schedule_dict(res.schedule);
    return d;
}

// Schedule given as a dict with "users" and "s" (list of lists or an array).
Schedule schedule_arg(const py::dict& schedule, const Inputs& in)
{
    py::dict copy;
    copy["users"] = schedule["users"];
    copy["s"] = py::module_::import("numpy").attr("asarray")(schedule["s"]).attr("tolist")();
    return schedule_from_json(from_py(copy), in.profiles, in.contracts);
}

py::dict ac_check(const std::string& feeder_json, const std::string& profiles_csv, std::optional<py::dict> schedule,
                  const std::string& modality, double p_gtd_kw, int step_minutes)
{
    const Inputs in = inputs(feeder_json, profiles_csv, modality, p_gtd_kw, step_minutes);
    const ProfileSet demand = schedule ? schedule_arg(*schedule, in).demand : in.profiles;
    const RadialNetwork net(in.feeder);
    const Injections inj = forecast_injections(in.feeder, demand);
    const AcPfSolution ac = solve_ac_pf(net, inj);
    py::dict d;
    d["converged"] = ac.converged;
    d["message"] = ac.message;
    if (ac.converged) {
        d["report"] = to_py(to_json(detect_congestion(net, ac, in.limits)));
        d["kirchhoff_mismatch"] = kirchhoff_mismatch(net, inj, ac);
    }
    return d;
}

py::list verify(const std::string& feeder_json, const std::string& profiles_csv, const py::dict& schedule,
                const std::string& modality, double p_gtd_kw, int step_minutes)
{
    const Inputs in = inputs(feeder_json, profiles_csv, modality, p_gtd_kw, step_minutes);
    py::list out;
    for (const Violation& v : verify_schedule(schedule_arg(schedule, in), in.contracts, in.profiles.horizon())) {
        py::dict d;
        d["user"] = v.user;
        d["t"] = v.t;
        d["kind"] = v.kind;
        d["detail"] = v.detail;
        out.append(d);
    }
    return out;
}

py::dict sweep(const std::string& config_path, std::optional<std::string> out_dir, int workers, bool resume)
{
    SweepConfig cfg = load_sweep_config(config_path);
    if (out_dir) cfg.out_dir = *out_dir;
    SweepOptions opt;
    opt.workers = workers;
    opt.resume = resume;
    MetricsTable table;
    {
        py::gil_scoped_release release;
        table = run_sweep(cfg, opt);
        emit_report(table, cfg.out_dir);
    }
    py::dict d;
    d["config_hash"] = table.config_hash;
    d["out_dir"] = cfg.out_dir.string();
    d["rows"] = table.rows.size();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Demand-reduction scheduling for low-voltage feeders";

    m.def("generate", &generate, py::arg("n_users") = 30, py::arg("seed") = 1, py::arg("congestion_margin") = 1.1,
          py::arg("ev_share") = 0.3, py::arg("p_gtd_kw") = 2.0, py::arg("congestion_target") = true,
          "Synthetic feeder and forecast; returns feeder JSON and profile CSV text.");
    m.def("presets", &presets, py::arg("step_minutes") = 15, "The five modality presets in steps.");
    m.def("solve", &solve, py::arg("feeder_json"), py::arg("profiles_csv"), py::arg("modality") = "simple",
          py::arg("p_gtd_kw") = 2.0, py::arg("delta") = 0.0, py::arg("time_limit_s") = 60.0,
          py::arg("node_limit") = -1, py::arg("step_minutes") = 15,
          "Minimum-reduction schedule; 'schedule' is None when no schedule was found.");
    m.def("tighten", &tighten, py::arg("feeder_json"), py::arg("profiles_csv"), py::arg("modality") = "simple",
          py::arg("p_gtd_kw") = 2.0, py::arg("grid") = py::none(), py::arg("time_limit_s") = 60.0,
          py::arg("step_minutes") = 15, "Tighten-and-resolve loop against the AC power flow.");
    m.def("ac_check", &ac_check, py::arg("feeder_json"), py::arg("profiles_csv"), py::arg("schedule") = py::none(),
          py::arg("modality") = "simple", py::arg("p_gtd_kw") = 2.0, py::arg("step_minutes") = 15,
          "AC power flow of the forecast, or of the demand a schedule leaves, with its congestion report.");
    m.def("verify", &verify, py::arg("feeder_json"), py::arg("profiles_csv"), py::arg("schedule"),
          py::arg("modality") = "simple", py::arg("p_gtd_kw") = 2.0, py::arg("step_minutes") = 15,
          "Comfort-rule violations of a schedule (empty list when it complies).");
    m.def("run_sweep", &sweep, py::arg("config_path"), py::arg("out_dir") = py::none(), py::arg("workers") = 0,
          py::arg("resume") = true, "Cohort sweep plus report files.");
}

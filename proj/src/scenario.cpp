#include "lvdsm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lvdsm/acpf.hpp"
#include "lvdsm/injections.hpp"
#include "lvdsm/linpf.hpp"

namespace lvdsm {

namespace {

// Draws are built from raw engine output so the streams do not depend on the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int below(int n) { return static_cast<int>(uniform() * n); }
    double normal(double mean, double sd)
    {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 eng_;
};

// Independent streams per generator stage.
std::uint64_t stream(std::uint64_t seed, std::uint64_t salt)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::string padded(char prefix, int i)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%03d", prefix, i);
    return buf;
}

// Cable data per km: phase resistance and reactance, with mutual terms as a
// fraction of the self terms.
constexpr double kTrunkR = 0.32, kTrunkX = 0.075;
constexpr double kServiceR = 1.15, kServiceX = 0.08;
constexpr double kMutualR = 0.3, kMutualX = 0.8;
constexpr double kTrunkAmps = 150.0, kServiceAmps = 63.0;

PhysicalBranch cable(const std::string& from, const std::string& to, PhaseSet phases, double r_km, double x_km,
                     double length_m, double kva)
{
    PhysicalBranch pb;
    pb.from = from;
    pb.to = to;
    pb.phases = phases;
    const double km = length_m / 1000.0;
    if (phases.size() == 1) {
        // phase conductor plus neutral return
        const int p = index(*phases.begin());
        pb.r_ohm(p, p) = 2.0 * r_km * km;
        pb.x_ohm(p, p) = 2.0 * x_km * km;
    } else {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                pb.r_ohm(i, j) = r_km * km * (i == j ? 1.0 : kMutualR);
                pb.x_ohm(i, j) = x_km * km * (i == j ? 1.0 : kMutualX);
            }
    }
    pb.s_rated_kva = kva;
    return pb;
}

double gtd_split(double total, PhaseSet phases) { return total / phases.size(); }

Injections at_guaranteed(const Feeder& feeder, double p_gtd_kw, double pf)
{
    Injections inj(static_cast<int>(feeder.users.size()), 1);
    const double tanphi = std::tan(std::acos(pf));
    for (std::size_t u = 0; u < feeder.users.size(); ++u)
        for (Phase p : feeder.users[u].phases) {
            const double kw = gtd_split(p_gtd_kw, feeder.users[u].phases);
            inj.p(static_cast<int>(u), index(p), 0) = feeder.kw_to_pu(kw);
            inj.q(static_cast<int>(u), index(p), 0) = feeder.kw_to_pu(kw * tanphi);
        }
    return inj;
}

bool guaranteed_state_ok(const Feeder& feeder, const ScenarioParams& params)
{
    const RadialNetwork net(feeder);
    const Injections inj = at_guaranteed(feeder, params.p_gtd_kw, params.power_factor);
    const Limits lim = Limits::from_feeder(feeder, 1);
    const AcPfSolution ac = solve_ac_pf(net, inj);
    if (!ac.converged || !detect_congestion(net, ac, lim).empty()) return false;
    const Tightening tight{params.max_delta, params.max_delta, params.max_delta};
    return lin_limit_violation(net, evaluate_lin_pf(net, inj), lim, tight) <= 0.0;
}

void strengthen(Feeder& feeder)
{
    for (Branch& br : feeder.branches) {
        br.z_pu *= 0.8;
        br.s_rated_pu *= 1.25;
    }
}

ProfileSet scaled(const ProfileSet& p, double factor)
{
    ProfileSet out = p;
    for (int u = 0; u < p.user_count(); ++u)
        for (Phase ph : p.user_phases(u))
            for (int t = 0; t < p.horizon(); ++t) {
                out.p_kw(u, ph, t) *= factor;
                out.q_kvar(u, ph, t) *= factor;
            }
    return out;
}

ProfileSet sum(const ProfileSet& a, const ProfileSet& b)
{
    ProfileSet out = a;
    for (int u = 0; u < a.user_count(); ++u)
        for (Phase ph : a.user_phases(u))
            for (int t = 0; t < a.horizon(); ++t) {
                out.p_kw(u, ph, t) += b.p_kw(u, ph, t);
                out.q_kvar(u, ph, t) += b.q_kvar(u, ph, t);
            }
    return out;
}

}  // namespace

void ScenarioParams::validate() const
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
    if (n_users <= 0) fail("n_users must be positive");
    if (!(three_phase_share >= 0.0 && three_phase_share <= 1.0)) fail("three_phase_share must lie in [0, 1]");
    if (horizon <= 0) fail("horizon must be positive");
    if (step_minutes <= 0) fail("step_minutes must be positive");
    if (horizon * step_minutes > 24 * 60) fail("horizon exceeds one day");
    if (!(start_hour >= 0.0 && start_hour < 24.0)) fail("start_hour must lie in [0, 24)");
    if (!(peak_kw_min >= 0.0 && peak_kw_max >= peak_kw_min)) fail("peak band is empty or negative");
    if (!(power_factor > 0.0 && power_factor <= 1.0)) fail("power_factor must lie in (0, 1]");
    if (!(ev_share >= 0.0 && ev_share <= 1.0)) fail("ev_share must lie in [0, 1]");
    if (!(ev_power_kva >= 0.0)) fail("ev_power_kva must be nonnegative");
    if (ev_phase_policy != "auto" && ev_phase_policy != "balanced") fail("unknown ev_phase_policy " + ev_phase_policy);
    if (!(ev_start_sd_h > 0.0 && ev_late_sd_h > 0.0)) fail("EV start spreads must be positive");
    if (!(ev_late_share >= 0.0 && ev_late_share <= 1.0)) fail("ev_late_share must lie in [0, 1]");
    if (!(ev_min_duration_h > 0.0 && ev_max_duration_h >= ev_min_duration_h)) fail("EV duration band is invalid");
    if (!(p_gtd_kw >= 0.0)) fail("p_gtd_kw must be nonnegative");
    if (!(congestion_margin >= 1.0)) fail("congestion_margin must be at least 1");
    if (!(max_delta >= 0.0 && max_delta < 1.0)) fail("max_delta must lie in [0, 1)");
    if (!(vmin_pu > 0.0 && vmax_pu > vmin_pu)) fail("voltage band is invalid");
}

// The defaulted ptree::get swallows parse errors; this one does not.
template <class T>
static void read_key(const boost::property_tree::ptree& tree, const char* key, T& out)
{
    if (tree.find(key) != tree.not_found()) out = tree.get<T>(key);
}

ScenarioParams scenario_params_from_ptree(const boost::property_tree::ptree& tree, ScenarioParams p)
{
    static const std::set<std::string> known = {
        "n_users", "three_phase_share", "seed", "horizon", "step_minutes", "start_hour", "peak_kw_min",
        "peak_kw_max", "power_factor", "ev_share", "ev_power_kva", "ev_phase_policy", "ev_start_mean_h",
        "ev_start_sd_h", "ev_late_share", "ev_late_mean_h", "ev_late_sd_h", "ev_min_duration_h",
        "ev_max_duration_h", "congestion_target", "p_gtd_kw", "congestion_margin", "max_delta", "vmin_pu",
        "vmax_pu"};
    for (const auto& [key, node] : tree)
        if (!node.empty() || !known.count(key)) throw std::invalid_argument("scenario: unknown key " + key);
    try {
        read_key(tree, "n_users", p.n_users);
        read_key(tree, "three_phase_share", p.three_phase_share);
        read_key(tree, "seed", p.seed);
        read_key(tree, "horizon", p.horizon);
        read_key(tree, "step_minutes", p.step_minutes);
        read_key(tree, "start_hour", p.start_hour);
        read_key(tree, "peak_kw_min", p.peak_kw_min);
        read_key(tree, "peak_kw_max", p.peak_kw_max);
        read_key(tree, "power_factor", p.power_factor);
        read_key(tree, "ev_share", p.ev_share);
        read_key(tree, "ev_power_kva", p.ev_power_kva);
        read_key(tree, "ev_phase_policy", p.ev_phase_policy);
        read_key(tree, "ev_start_mean_h", p.ev_start_mean_h);
        read_key(tree, "ev_start_sd_h", p.ev_start_sd_h);
        read_key(tree, "ev_late_share", p.ev_late_share);
        read_key(tree, "ev_late_mean_h", p.ev_late_mean_h);
        read_key(tree, "ev_late_sd_h", p.ev_late_sd_h);
        read_key(tree, "ev_min_duration_h", p.ev_min_duration_h);
        read_key(tree, "ev_max_duration_h", p.ev_max_duration_h);
        read_key(tree, "congestion_target", p.congestion_target);
        read_key(tree, "p_gtd_kw", p.p_gtd_kw);
        read_key(tree, "congestion_margin", p.congestion_margin);
        read_key(tree, "max_delta", p.max_delta);
        read_key(tree, "vmin_pu", p.vmin_pu);
        read_key(tree, "vmax_pu", p.vmax_pu);
    } catch (const boost::property_tree::ptree_bad_data& e) {
        throw std::invalid_argument(std::string("scenario: ") + e.what());
    }
    p.validate();
    return p;
}

ScenarioParams load_scenario_params(const std::filesystem::path& path)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw std::runtime_error(e.what());
    }
    return scenario_params_from_ptree(tree);
}

std::string scenario_params_to_ini(const ScenarioParams& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "n_users = " << p.n_users << "\nthree_phase_share = " << p.three_phase_share << "\nseed = " << p.seed
       << "\nhorizon = " << p.horizon << "\nstep_minutes = " << p.step_minutes << "\nstart_hour = " << p.start_hour
       << "\npeak_kw_min = " << p.peak_kw_min << "\npeak_kw_max = " << p.peak_kw_max
       << "\npower_factor = " << p.power_factor << "\nev_share = " << p.ev_share
       << "\nev_power_kva = " << p.ev_power_kva << "\nev_phase_policy = " << p.ev_phase_policy
       << "\nev_start_mean_h = " << p.ev_start_mean_h << "\nev_start_sd_h = " << p.ev_start_sd_h
       << "\nev_late_share = " << p.ev_late_share << "\nev_late_mean_h = " << p.ev_late_mean_h
       << "\nev_late_sd_h = " << p.ev_late_sd_h << "\nev_min_duration_h = " << p.ev_min_duration_h
       << "\nev_max_duration_h = " << p.ev_max_duration_h
       << "\ncongestion_target = " << (p.congestion_target ? "true" : "false") << "\np_gtd_kw = " << p.p_gtd_kw
       << "\ncongestion_margin = " << p.congestion_margin << "\nmax_delta = " << p.max_delta
       << "\nvmin_pu = " << p.vmin_pu << "\nvmax_pu = " << p.vmax_pu << "\n";
    return os.str();
}

Feeder generate_feeder(const ScenarioParams& params)
{
    params.validate();
    Rng rng(stream(params.seed, 1));
    Feeder f;
    const double vbase = f.base_voltage_v, sbase = f.base_power_va;
    auto add_bus = [&](const std::string& id, PhaseSet phases, bool source) {
        f.buses.push_back({id, phases, params.vmin_pu, params.vmax_pu, source});
    };
    add_bus("src", PhaseSet::all(), true);

    // Trunk: each node hangs off the previous one most of the time, otherwise
    // off a random earlier node, which yields a few laterals.
    const int trunk = std::max(1, (params.n_users + 1) / 2);
    const double trunk_kva = kTrunkAmps * vbase / 1000.0;
    std::vector<std::string> trunk_ids;
    // Long rural-style trunks run into voltage limits before thermal ones.
    const double stretch = rng.uniform(0.5, 2.5);
    for (int i = 1; i <= trunk; ++i) {
        const std::string id = padded('t', i);
        std::string parent = "src";
        if (!trunk_ids.empty()) parent = rng.uniform() < 0.75 ? trunk_ids.back() : trunk_ids[rng.below(static_cast<int>(trunk_ids.size()))];
        add_bus(id, PhaseSet::all(), false);
        f.branches.push_back(per_unit_convert(
            cable(parent, id, PhaseSet::all(), kTrunkR, kTrunkX, stretch * rng.uniform(20.0, 60.0), trunk_kva), vbase, sbase));
        trunk_ids.push_back(id);
    }

    const double service_kva = kServiceAmps * vbase / 1000.0;
    for (int u = 1; u <= params.n_users; ++u) {
        const std::string bus = padded('h', u);
        PhaseSet phases = PhaseSet::all();
        if (rng.uniform() >= params.three_phase_share) phases = PhaseSet{static_cast<Phase>(rng.below(3))};
        const std::string parent = trunk_ids[(u - 1) * trunk / params.n_users];
        add_bus(bus, phases, false);
        f.branches.push_back(per_unit_convert(
            cable(parent, bus, phases, kServiceR, kServiceX, rng.uniform(10.0, 30.0), service_kva), vbase, sbase));
        f.users.push_back({padded('u', u), bus, phases});
    }
    return f;
}

ProfileSet generate_baseline_profiles(const Feeder& feeder, const ScenarioParams& params)
{
    params.validate();
    Rng rng(stream(params.seed, 2));
    ProfileSet out(feeder, params.horizon, params.step_minutes);
    const double tanphi = std::tan(std::acos(params.power_factor));
    const double step_h = params.step_minutes / 60.0;
    auto bump = [](double h, double centre, double width) {
        // circular distance on the day so evening peaks wrap past midnight
        double d = std::fmod(std::abs(h - centre), 24.0);
        d = std::min(d, 24.0 - d);
        return std::exp(-0.5 * d * d / (width * width));
    };
    for (int u = 0; u < out.user_count(); ++u) {
        const double base = rng.uniform(0.15, 0.35);
        const double m_c = rng.normal(7.5, 0.5), m_w = rng.uniform(0.6, 1.2), m_a = rng.uniform(0.3, 0.7);
        const double e_c = rng.normal(19.0, 0.7), e_w = rng.uniform(1.0, 2.0), e_a = rng.uniform(0.7, 1.0);
        const double peak = rng.uniform(params.peak_kw_min, params.peak_kw_max);
        const PhaseSet phases = out.user_phases(u);
        double weight[3] = {0, 0, 0}, wsum = 0;
        for (Phase p : phases) wsum += weight[index(p)] = phases.size() == 1 ? 1.0 : rng.uniform(0.8, 1.2);

        // The shape is normalised over the whole day so truncated horizons keep
        // the same amplitude.
        auto shape = [&](double h) { return base + m_a * bump(h, m_c, m_w) + e_a * bump(h, e_c, e_w); };
        double top = 0.0;
        for (int k = 0; k < 24 * 60; ++k) top = std::max(top, shape(k / 60.0));
        for (int t = 0; t < out.horizon(); ++t) {
            const double kw = peak * shape(params.start_hour + (t + 0.5) * step_h) / top;
            for (Phase p : phases) {
                out.p_kw(u, p, t) = kw * weight[index(p)] / wsum;
                out.q_kvar(u, p, t) = out.p_kw(u, p, t) * tanphi;
            }
        }
    }
    return out;
}

ProfileSet attach_ev_sessions(const ProfileSet& profiles, const Feeder& feeder, const ScenarioParams& params)
{
    params.validate();
    profiles.check_against(feeder);
    ProfileSet out = profiles;
    const int n = profiles.user_count();
    const int count = static_cast<int>(std::lround(params.ev_share * n));
    if (count == 0) return out;
    Rng rng(stream(params.seed, 3));

    std::vector<int> pick(n);
    for (int i = 0; i < n; ++i) pick[i] = i;
    for (int i = 0; i < count; ++i) std::swap(pick[i], pick[i + rng.below(n - i)]);
    std::sort(pick.begin(), pick.begin() + count);

    const double step_h = profiles.step_minutes() / 60.0;
    const double span_h = profiles.horizon() * step_h;
    const double kw = params.ev_power_kva * params.power_factor;
    const double kvar = params.ev_power_kva * std::sqrt(1.0 - params.power_factor * params.power_factor);
    int balanced_next = 0;
    for (int k = 0; k < count; ++k) {
        const int u = pick[k];
        const PhaseSet phases = profiles.user_phases(u);
        Phase phase = *phases.begin();
        if (phases.size() > 1) {
            if (params.ev_phase_policy == "balanced")
                phase = static_cast<Phase>(balanced_next++ % 3);
            else
                phase = static_cast<Phase>(rng.below(3));
        }
        // Draw until the session overlaps the horizon.
        int first = 0, last = 0;
        for (int attempt = 0;; ++attempt) {
            const bool late = rng.uniform() < params.ev_late_share;
            const double start = late ? rng.normal(params.ev_late_mean_h, params.ev_late_sd_h)
                                      : rng.normal(params.ev_start_mean_h, params.ev_start_sd_h);
            const double dur = rng.uniform(params.ev_min_duration_h, params.ev_max_duration_h);
            double offset = std::fmod(start - params.start_hour, 24.0);
            if (offset < 0) offset += 24.0;
            if (offset < span_h) {
                first = static_cast<int>(std::floor(offset / step_h));
                last = std::min(profiles.horizon(), static_cast<int>(std::ceil((offset + dur) / step_h)));
                break;
            }
            if (attempt == 100) {
                first = 0;
                last = std::min(profiles.horizon(), static_cast<int>(std::ceil(dur / step_h)));
                break;
            }
        }
        for (int t = first; t < last; ++t) {
            out.p_kw(u, phase, t) += kw;
            out.q_kvar(u, phase, t) += kvar;
        }
    }
    return out;
}

bool forecast_congested(const Feeder& feeder, const ProfileSet& profiles)
{
    const RadialNetwork net(feeder);
    const AcPfSolution sol = solve_ac_pf(net, forecast_injections(feeder, profiles));
    if (!sol.converged) return true;
    return !detect_congestion(net, sol, Limits::from_feeder(feeder, profiles.horizon())).empty();
}

Scenario generate_scenario(const ScenarioParams& params)
{
    params.validate();
    Scenario sc;
    sc.feeder = generate_feeder(params);
    const ProfileSet unit = generate_baseline_profiles(sc.feeder, params);
    const ProfileSet zero(sc.feeder, params.horizon, params.step_minutes);
    const ProfileSet ev = attach_ev_sessions(zero, sc.feeder, params);

    if (params.congestion_target) {
        while (!guaranteed_state_ok(sc.feeder, params)) {
            if (++sc.strengthen_rounds > 40)
                throw std::runtime_error("scenario: guaranteed-power state stays congested; lower p_gtd_kw");
            strengthen(sc.feeder);
        }
        auto congested_at = [&](double scale) { return forecast_congested(sc.feeder, sum(scaled(unit, scale), ev)); };
        double lo = 0.3, hi = 8.0;
        if (congested_at(lo)) {
            hi = lo;
        } else if (!congested_at(hi)) {
            lo = hi;
        } else {
            for (int it = 0; it < 30; ++it) {
                const double mid = 0.5 * (lo + hi);
                (congested_at(mid) ? hi : lo) = mid;
            }
        }
        sc.baseline_scale = hi * params.congestion_margin;
    }
    sc.baseline = scaled(unit, sc.baseline_scale);
    sc.profiles = sum(sc.baseline, ev);
    sc.congested = forecast_congested(sc.feeder, sc.profiles);
    return sc;
}

}  // namespace lvdsm

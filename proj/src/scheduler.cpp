#include "lvdsm/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "lvdsm/acpf.hpp"
#include "lvdsm/mip/lp_format.hpp"

namespace lvdsm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Demand {
    double p_pu = 0.0;
    double q_pu = 0.0;
};

// Guaranteed per-phase demand in per unit, [user][phase].
std::vector<std::array<Demand, 3>> guaranteed_pu(const Feeder& feeder, const std::vector<Contract>& contracts)
{
    std::vector<std::array<Demand, 3>> out(feeder.users.size());
    for (std::size_t u = 0; u < feeder.users.size(); ++u)
        for (Phase p : feeder.users[u].phases) {
            out[u][index(p)].p_pu = feeder.kw_to_pu(phase_share(contracts[u].p_gtd_kw, feeder.users[u].phases));
            out[u][index(p)].q_pu = feeder.kw_to_pu(phase_share(contracts[u].q_gtd_kvar, feeder.users[u].phases));
        }
    return out;
}

void check_dimensions(const Feeder& feeder, const ProfileSet& profiles, const Limits& limits)
{
    profiles.check_against(feeder);
    if (limits.horizon != profiles.horizon())
        throw std::invalid_argument("horizon mismatch: profiles have " + std::to_string(profiles.horizon()) +
                                    " steps, limits " + std::to_string(limits.horizon));
    if (limits.vmin_pu.size() != feeder.buses.size() || limits.vmax_pu.size() != feeder.buses.size() ||
        limits.s_rated_pu.size() != feeder.branches.size())
        throw std::invalid_argument("limits do not match the feeder");
}

// Adds a block's rows to the problem, creating continuous free columns for
// names not registered yet.
void add_block(mip::Problem& prob, std::unordered_map<std::string, int>& lookup, const LinearConstraintBlock& block,
               bool lazy)
{
    std::vector<int> map(block.variables().size());
    for (std::size_t i = 0; i < map.size(); ++i) {
        const std::string& name = block.variables()[i];
        auto it = lookup.find(name);
        if (it == lookup.end()) {
            mip::Variable v;
            v.name = name;
            v.lower = -kInf;
            it = lookup.emplace(name, prob.add_variable(std::move(v))).first;
        }
        map[i] = it->second;
    }
    for (const LinearRow& row : block.rows()) {
        mip::Constraint c;
        c.name = row.label;
        c.lower = row.lower;
        c.upper = row.upper;
        c.lazy = lazy;
        for (const LinearTerm& t : row.terms) c.terms.push_back({map[t.var], t.coef});
        prob.add_constraint(std::move(c));
    }
}

// Network rows over s for the reduced form.
void add_reduced_network(MilpModel& m, const RadialNetwork& net, const Injections& fx,
                         const std::vector<std::array<Demand, 3>>& gtd, const Limits& limits,
                         const Tightening& tightening, int sides)
{
    const Feeder& f = net.feeder();
    const int T = fx.horizon();
    const int U = net.user_count();
    const LinPfSolution base = evaluate_lin_pf(net, fx);

    // Unit responses per user and phase: [user][phase][0 = P, 1 = Q] -> [bus][phase]
    std::vector<std::array<std::array<std::vector<std::array<double, 3>>, 2>, 3>> resp(U);
    for (int u = 0; u < U; ++u)
        for (Phase p : f.users[u].phases) {
            Vector3c e = Vector3c::Zero();
            e(index(p)) = 1.0;
            resp[u][index(p)][0] = voltage_response(net, net.user_bus(u), e);
            e(index(p)) = Complex(0.0, 1.0);
            resp[u][index(p)][1] = voltage_response(net, net.user_bus(u), e);
        }
    std::vector<std::vector<int>> downstream(net.branch_count());
    for (int u = 0; u < U; ++u)
        for (int br : net.path_to(net.user_bus(u))) downstream[br].push_back(u);

    auto add_row = [&](std::string name, std::vector<mip::Term> terms, double lo, double hi) {
        std::erase_if(terms, [](const mip::Term& t) { return std::abs(t.coef) < 1e-14; });
        double amin = 0.0, amax = 0.0;
        for (const mip::Term& t : terms) (t.coef < 0 ? amin : amax) += t.coef;
        if (amin >= lo) lo = -kInf;
        if (amax <= hi) hi = kInf;
        if (lo == -kInf && hi == kInf) return;
        mip::Constraint c;
        c.name = std::move(name);
        c.terms = std::move(terms);
        c.lower = lo;
        c.upper = hi;
        c.lazy = true;
        m.network_rows.push_back(m.problem.add_constraint(std::move(c)));
    };

    std::vector<Complex> delta(static_cast<std::size_t>(U) * 3);
    for (int t = 0; t < T; ++t) {
        for (int u = 0; u < U; ++u)
            for (int p = 0; p < 3; ++p)
                delta[u * 3 + p] = Complex(gtd[u][p].p_pu - fx.p(u, p, t), gtd[u][p].q_pu - fx.q(u, p, t));

        for (const auto& ob : net.order()) {
            if (ob.parent_branch < 0) continue;
            const int bus = ob.bus;
            const double lo = limits.vmin_pu[bus] + tightening.dv_low;
            const double hi = limits.vmax_pu[bus] - tightening.dv_high;
            for (int p = 0; p < 3; ++p) {
                if (!f.buses[bus].phases.contains(static_cast<Phase>(p))) continue;
                std::vector<mip::Term> terms;
                for (int u = 0; u < U; ++u) {
                    double c = 0.0;
                    for (Phase ph : f.users[u].phases) {
                        const int k = index(ph);
                        c += delta[u * 3 + k].real() * resp[u][k][0][bus][p] + delta[u * 3 + k].imag() * resp[u][k][1][bus][p];
                    }
                    terms.push_back({m.s(u, t), c});
                }
                const double u0 = base.u_at(bus, p, t);
                add_row("v(" + names::sanitize(f.buses[bus].id) + "," + "abc"[p] + "," + std::to_string(t) + ")",
                        std::move(terms), lo * lo - u0, hi * hi - u0);
            }
        }

        for (const auto& ob : net.order()) {
            const int br = ob.parent_branch;
            if (br < 0) continue;
            const auto polygon = thermal_polygon(limits.s_rated_pu[br], tightening.ds, sides);
            for (int p = 0; p < 3; ++p) {
                if (!f.branches[br].phases.contains(static_cast<Phase>(p))) continue;
                const Complex lam = base.lambda_at(br, p, t);
                for (std::size_t k = 0; k < polygon.size(); ++k) {
                    const PolygonRow& r = polygon[k];
                    std::vector<mip::Term> terms;
                    for (int u : downstream[br]) {
                        if (!f.users[u].phases.contains(static_cast<Phase>(p))) continue;
                        const Complex d = delta[u * 3 + p];
                        terms.push_back({m.s(u, t), r.cos_theta * d.real() + r.sin_theta * d.imag()});
                    }
                    add_row("f(" + names::sanitize(f.buses[ob.bus].id) + "," + "abc"[p] + "," + std::to_string(t) +
                                "," + std::to_string(k) + ")",
                            std::move(terms), -kInf, r.rhs - (r.cos_theta * lam.real() + r.sin_theta * lam.imag()));
                }
            }
        }
    }
}

std::vector<std::uint8_t> transitions_on(const std::vector<std::uint8_t>& s, int users, int horizon, bool up)
{
    std::vector<std::uint8_t> out(s.size(), 0);
    for (int u = 0; u < users; ++u)
        for (int t = 0; t < horizon; ++t) {
            const int cur = s[u * horizon + t];
            const int prev = t > 0 ? s[u * horizon + t - 1] : 0;
            out[u * horizon + t] = up ? (cur > prev) : (prev > cur);
        }
    return out;
}

}  // namespace

double phase_share(double total, PhaseSet phases)
{
    if (phases.empty()) throw std::invalid_argument("user without phases");
    return total / phases.size();
}

std::vector<Contract> contracts_for(const Feeder& feeder, const std::vector<Contract>& contracts)
{
    std::unordered_map<std::string, const Contract*> by_id;
    for (const Contract& c : contracts) {
        c.validate();
        if (!by_id.emplace(c.user_id, &c).second) throw std::invalid_argument("duplicate contract for " + c.user_id);
    }
    std::vector<Contract> out;
    for (const UserAttachment& ua : feeder.users) {
        auto it = by_id.find(ua.user_id);
        if (it == by_id.end()) throw std::invalid_argument("missing contract for user " + ua.user_id);
        out.push_back(*it->second);
        by_id.erase(it);
    }
    if (!by_id.empty()) throw std::invalid_argument("contract for unknown user " + by_id.begin()->first);
    return out;
}

LinearConstraintBlock user_response_rows(const Feeder& feeder, const ProfileSet& profiles,
                                         const std::vector<Contract>& contracts)
{
    profiles.check_against(feeder);
    const std::vector<Contract> ordered = contracts_for(feeder, contracts);
    const ProfileSet aligned = profiles.aligned_to(feeder);
    const Injections fx = forecast_injections(feeder, aligned);
    const auto gtd = guaranteed_pu(feeder, ordered);
    LinearConstraintBlock block;
    for (int t = 0; t < aligned.horizon(); ++t)
        for (std::size_t u = 0; u < feeder.users.size(); ++u)
            for (Phase ph : feeder.users[u].phases) {
                const int p = index(ph);
                const int ui = static_cast<int>(u);
                const int s = block.variable(names::s(feeder.users[u].user_id, t));
                const std::string tag = names::sanitize(feeder.users[u].user_id) + "," + phase_char(ph) + "," +
                                        std::to_string(t) + ")";
                LinearRow rp{"resp_p(" + tag, {{block.variable(names::p(feeder, ui, p, t)), 1.0},
                                               {s, -(gtd[u][p].p_pu - fx.p(ui, p, t))}},
                             fx.p(ui, p, t), fx.p(ui, p, t)};
                LinearRow rq{"resp_q(" + tag, {{block.variable(names::q(feeder, ui, p, t)), 1.0},
                                               {s, -(gtd[u][p].q_pu - fx.q(ui, p, t))}},
                             fx.q(ui, p, t), fx.q(ui, p, t)};
                block.add_row(std::move(rp));
                block.add_row(std::move(rq));
            }
    return block;
}

LinearConstraintBlock comfort_rows(const std::vector<Contract>& contracts, int horizon)
{
    if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
    LinearConstraintBlock block;
    for (const Contract& c : contracts) {
        c.validate();
        const std::string tag = names::sanitize(c.user_id);
        std::vector<int> s(horizon), y, z;
        for (int t = 0; t < horizon; ++t) s[t] = block.variable(names::s(c.user_id, t));
        if (c.needs_transitions()) {
            for (int t = 0; t < horizon; ++t) {
                y.push_back(block.variable(names::y(c.user_id, t)));
                z.push_back(block.variable(names::z(c.user_id, t)));
            }
            // s_t - s_{t-1} = y_t - z_t with nothing active before the horizon
            block.add_row({"trans(" + tag + ",0)", {{s[0], 1.0}, {y[0], -1.0}}, 0.0, 0.0});
            block.add_row({"zinit(" + tag + ")", {{z[0], 1.0}}, 0.0, 0.0});
            for (int t = 1; t < horizon; ++t)
                block.add_row({"trans(" + tag + "," + std::to_string(t) + ")",
                               {{s[t], 1.0}, {s[t - 1], -1.0}, {y[t], -1.0}, {z[t], 1.0}},
                               0.0,
                               0.0});
            if (c.eta != kUnlimited) {
                LinearRow row{"act(" + tag + ")", {}, -kInf, static_cast<double>(c.eta)};
                for (int t = 0; t < horizon; ++t) row.terms.push_back({y[t], 1.0});
                block.add_row(std::move(row));
            }
            for (int t = 0; t < horizon; ++t) {
                LinearRow row{"gap(" + tag + "," + std::to_string(t) + ")", {{s[t], 1.0}}, -kInf, 1.0};
                for (int k = std::max(0, t - c.delta_steps); k <= t; ++k) row.terms.push_back({z[k], 1.0});
                block.add_row(std::move(row));
            }
        }
        if (c.alpha_steps != kUnlimited)
            for (int t = c.alpha_steps; t < horizon; ++t) {
                LinearRow row{"dur(" + tag + "," + std::to_string(t) + ")", {}, -kInf, static_cast<double>(c.alpha_steps)};
                for (int k = t - c.alpha_steps; k <= t; ++k) row.terms.push_back({s[k], 1.0});
                block.add_row(std::move(row));
            }
    }
    return block;
}

MilpModel build_milp(const Feeder& feeder, const ProfileSet& profiles, const std::vector<Contract>& contracts,
                     const Limits& limits, const Tightening& tightening, const BuildOptions& options)
{
    tightening.validate();
    check_dimensions(feeder, profiles, limits);
    const RadialNetwork net(feeder);

    MilpModel m;
    m.form = options.form;
    m.horizon = profiles.horizon();
    m.step_minutes = profiles.step_minutes();
    m.forecast = profiles.aligned_to(feeder);
    m.contracts = contracts_for(feeder, contracts);
    const int T = m.horizon;
    const int U = static_cast<int>(feeder.users.size());
    for (const UserAttachment& ua : feeder.users) m.user_ids.push_back(ua.user_id);

    std::unordered_map<std::string, int> lookup;
    auto binary = [&](const std::string& name, int priority) {
        mip::Variable v;
        v.name = name;
        v.upper = 1.0;
        v.integer = true;
        v.branch_priority = priority;
        const int idx = m.problem.add_variable(std::move(v), priority == 1 ? 1.0 : 0.0);
        lookup.emplace(name, idx);
        ++m.beta;
        return idx;
    };
    m.s_index.assign(static_cast<std::size_t>(U) * T, -1);
    m.y_index.assign(m.s_index.size(), -1);
    m.z_index.assign(m.s_index.size(), -1);
    for (int u = 0; u < U; ++u)
        for (int t = 0; t < T; ++t) m.s_index[u * T + t] = binary(names::s(m.user_ids[u], t), 1);
    for (int u = 0; u < U; ++u)
        if (m.contracts[u].needs_transitions())
            for (int t = 0; t < T; ++t) {
                m.y_index[u * T + t] = binary(names::y(m.user_ids[u], t), 0);
                m.z_index[u * T + t] = binary(names::z(m.user_ids[u], t), 0);
            }

    add_block(m.problem, lookup, comfort_rows(m.contracts, T), false);

    if (options.form == ModelForm::lifted) {
        for (int t = 0; t < T; ++t)
            for (int p = 0; p < 3; ++p) {
                mip::Variable v;
                v.name = names::u(feeder, net.source(), p, t);
                v.lower = v.upper = 1.0;
                const std::string key = v.name;
                lookup.emplace(key, m.problem.add_variable(std::move(v)));
            }
        add_block(m.problem, lookup, user_response_rows(feeder, m.forecast, m.contracts), false);
        add_block(m.problem, lookup, build_balance(net, T), false);
        add_block(m.problem, lookup, build_ohm(net, T), false);
        const std::size_t first = m.problem.constraints.size();
        add_block(m.problem, lookup, build_limits(net, limits, tightening, options.polygon_sides), false);
        for (std::size_t i = first; i < m.problem.constraints.size(); ++i) m.network_rows.push_back(static_cast<int>(i));
    } else {
        add_reduced_network(m, net, forecast_injections(feeder, m.forecast), guaranteed_pu(feeder, m.contracts),
                            limits, tightening, options.polygon_sides);
    }
    return m;
}

int Schedule::participants() const
{
    int count = 0;
    for (std::size_t u = 0; u < user_ids.size(); ++u)
        for (int t = 0; t < horizon; ++t)
            if (s_at(static_cast<int>(u), t)) {
                ++count;
                break;
            }
    return count;
}

Schedule make_schedule(const ProfileSet& forecast, const std::vector<Contract>& contracts,
                       const std::vector<std::uint8_t>& s)
{
    const int U = forecast.user_count();
    const int T = forecast.horizon();
    if (static_cast<int>(s.size()) != U * T) throw std::invalid_argument("status matrix does not match the profiles");
    if (static_cast<int>(contracts.size()) != U) throw std::invalid_argument("one contract per user required");
    Schedule out;
    out.user_ids = forecast.user_ids();
    out.horizon = T;
    out.s = s;
    out.y = transitions_on(s, U, T, true);
    out.z = transitions_on(s, U, T, false);
    out.demand = forecast;
    for (int u = 0; u < U; ++u) {
        if (contracts[u].user_id != out.user_ids[u]) throw std::invalid_argument("contracts not in profile user order");
        const PhaseSet phases = forecast.user_phases(u);
        for (int t = 0; t < T; ++t) {
            out.objective += s[u * T + t];
            if (!s[u * T + t]) continue;
            for (Phase p : phases) {
                out.demand.p_kw(u, p, t) = phase_share(contracts[u].p_gtd_kw, phases);
                out.demand.q_kvar(u, p, t) = phase_share(contracts[u].q_gtd_kvar, phases);
            }
        }
    }
    return out;
}

SolveResult solve_milp(const MilpModel& model, const mip::MipOptions& options)
{
    mip::Problem prob = model.problem;
    const int U = static_cast<int>(model.user_ids.size());
    const int T = model.horizon;

    // Which statuses can relieve a binding row side.
    std::vector<char> helpful(prob.variables.size(), 0);
    std::vector<char> is_status(prob.variables.size(), 0);
    for (int idx : model.s_index) is_status[idx] = 1;
    const bool status_only_rows = model.form == ModelForm::reduced;
    if (status_only_rows) {
        for (int r : model.network_rows) {
            const mip::Constraint& c = prob.constraints[r];
            double amin = 0.0, amax = 0.0;
            for (const mip::Term& t : c.terms) (t.coef < 0 ? amin : amax) += t.coef;
            const bool upper_binds = amax > c.upper;
            const bool lower_binds = amin < c.lower;
            for (const mip::Term& t : c.terms)
                if ((upper_binds && t.coef < 0) || (lower_binds && t.coef > 0)) helpful[t.var] = 1;
        }
    }
    long fixed = 0;
    if (status_only_rows) {
        auto fix_zero = [&](int var) {
            if (var < 0 || prob.variables[var].upper == 0.0) return;
            prob.variables[var].upper = 0.0;
            ++fixed;
        };
        for (int u = 0; u < U; ++u) {
            int first = T, last = -1;
            for (int t = 0; t < T; ++t)
                if (helpful[model.s(u, t)]) {
                    first = std::min(first, t);
                    last = t;
                }
            for (int t = 0; t < T; ++t)
                if (t < first || t > last) fix_zero(model.s(u, t));
            // y and z at their values implied by s wherever those are known
            for (int t = 0; t < T; ++t) {
                if (model.y(u, t) < 0) continue;
                if (prob.variables[model.s(u, t)].upper == 0.0) fix_zero(model.y(u, t));
                if (t == 0 || prob.variables[model.s(u, t - 1)].upper == 0.0) fix_zero(model.z(u, t));
            }
        }
    }

    const mip::MipResult r = mip::solve_mip(prob, options);
    SolveResult out;
    out.status = r.status;
    out.bound = r.bound;
    out.nodes = r.nodes;
    out.lp_iterations = r.lp_iterations;
    out.fixed_by_presolve = fixed;
    if (r.has_incumbent()) {
        std::vector<std::uint8_t> s(static_cast<std::size_t>(U) * T);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = r.x[model.s_index[i]] > 0.5;
        out.schedule = make_schedule(model.forecast, model.contracts, s);
        out.has_schedule = true;
    }
    return out;
}

mip::LpResult lp_relax_solve(const MilpModel& model, const std::vector<std::pair<int, double>>& fixings)
{
    return mip::solve_lp_relaxation(model.problem, fixings);
}

std::vector<Violation> verify_schedule(const Schedule& sch, const std::vector<Contract>& contracts, int horizon)
{
    std::vector<Violation> out;
    const int U = static_cast<int>(sch.user_ids.size());
    const std::size_t cells = static_cast<std::size_t>(U) * horizon;
    if (sch.horizon != horizon || sch.s.size() != cells || sch.y.size() != cells || sch.z.size() != cells) {
        out.push_back({"", 0, "value", "schedule dimensions do not match the horizon"});
        return out;
    }
    std::unordered_map<std::string, const Contract*> by_id;
    for (const Contract& c : contracts) by_id[c.user_id] = &c;
    for (int u = 0; u < U; ++u) {
        const std::string& id = sch.user_ids[u];
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            out.push_back({id, 0, "value", "no contract"});
            continue;
        }
        const Contract& c = *it->second;
        auto s = [&](int t) { return static_cast<int>(sch.s_at(u, t)); };
        auto y = [&](int t) { return static_cast<int>(sch.y_at(u, t)); };
        auto z = [&](int t) { return static_cast<int>(sch.z_at(u, t)); };
        bool binary = true;
        for (int t = 0; t < horizon; ++t)
            if (s(t) > 1 || y(t) > 1 || z(t) > 1) {
                out.push_back({id, t, "value", "non-binary entry"});
                binary = false;
            }
        if (!binary) continue;

        for (int t = 0; t < horizon; ++t) {
            const int prev = t > 0 ? s(t - 1) : 0;
            if (s(t) - prev != y(t) - z(t))
                out.push_back({id, t, "identity", "s change does not match y - z"});
            else if (y(t) && z(t))
                out.push_back({id, t, "identity", "activation and deactivation together"});
        }
        if (c.eta != kUnlimited) {
            int count = 0;
            for (int t = 0; t < horizon; ++t)
                if (y(t) && ++count == c.eta + 1)
                    out.push_back({id, t, "activations", "more than " + std::to_string(c.eta) + " activations"});
        }
        if (c.alpha_steps != kUnlimited)
            for (int t = c.alpha_steps; t < horizon; ++t) {
                int sum = 0;
                for (int k = t - c.alpha_steps; k <= t; ++k) sum += s(k);
                if (sum > c.alpha_steps)
                    out.push_back({id, t, "duration", "longer than " + std::to_string(c.alpha_steps) + " steps"});
            }
        for (int t = 0; t < horizon; ++t) {
            int sum = s(t);
            for (int k = std::max(0, t - c.delta_steps); k <= t; ++k) sum += z(k);
            if (sum > 1) out.push_back({id, t, "gap", "active within " + std::to_string(c.delta_steps) + " steps of a deactivation"});
        }
    }
    return out;
}

BruteForceResult brute_force_schedule(const Feeder& feeder, const ProfileSet& profiles,
                                      const std::vector<Contract>& contracts, const Limits& limits,
                                      const Tightening& tightening, const BruteForceOptions& options)
{
    tightening.validate();
    check_dimensions(feeder, profiles, limits);
    const int U = static_cast<int>(feeder.users.size());
    const int T = profiles.horizon();
    if (U * T > options.cap)
        throw std::invalid_argument("brute force over " + std::to_string(U * T) + " statuses exceeds the cap of " +
                                    std::to_string(options.cap));
    const RadialNetwork net(feeder);
    const ProfileSet forecast = profiles.aligned_to(feeder);
    const std::vector<Contract> ordered = contracts_for(feeder, contracts);

    // Network feasibility depends on one timestep's statuses only, so every
    // subset of reducing users is checked once per timestep.
    const int subsets = 1 << U;
    std::vector<char> ok(static_cast<std::size_t>(T) * subsets, 0);
    for (int mask = 0; mask < subsets; ++mask) {
        std::vector<std::uint8_t> s(static_cast<std::size_t>(U) * T, 0);
        for (int u = 0; u < U; ++u)
            if (mask >> u & 1)
                for (int t = 0; t < T; ++t) s[u * T + t] = 1;
        const Schedule sch = make_schedule(forecast, ordered, s);
        const Injections inj = forecast_injections(feeder, sch.demand);
        if (options.checker == Checker::lin) {
            const LinPfSolution sol = evaluate_lin_pf(net, inj);
            for (int t = 0; t < T; ++t) {
                LinPfSolution one;
                one.buses = sol.buses;
                one.branches = sol.branches;
                one.horizon = 1;
                for (int b = 0; b < sol.buses; ++b)
                    for (int p = 0; p < 3; ++p) one.u.push_back(sol.u_at(b, p, t));
                for (int br = 0; br < sol.branches; ++br)
                    for (int p = 0; p < 3; ++p) one.lambda.push_back(sol.lambda_at(br, p, t));
                ok[t * subsets + mask] =
                    lin_limit_violation(net, one, limits, tightening, options.polygon_sides) <= options.tol;
            }
        } else {
            const AcPfSolution sol = solve_ac_pf(net, inj);
            if (!sol.converged) continue;
            const CongestionReport rep = detect_congestion(net, sol, limits);
            std::vector<char> bad(T, 0);
            for (const auto& e : rep.undervoltage) bad[e.t] = 1;
            for (const auto& e : rep.overvoltage) bad[e.t] = 1;
            for (const auto& e : rep.overcurrent) bad[e.t] = 1;
            for (int t = 0; t < T; ++t) ok[t * subsets + mask] = !bad[t];
        }
    }

    BruteForceResult res;
    const long long total = 1LL << (U * T);
    int best = std::numeric_limits<int>::max();
    long long best_code = -1;
    std::vector<std::uint8_t> s(static_cast<std::size_t>(U) * T);
    Schedule probe;
    probe.user_ids = forecast.user_ids();
    probe.horizon = T;
    for (long long code = 0; code < total; ++code) {
        ++res.enumerated;
        const int ones = __builtin_popcountll(static_cast<unsigned long long>(code));
        if (ones >= best) continue;
        bool network = true;
        for (int t = 0; t < T && network; ++t) {
            int mask = 0;
            for (int u = 0; u < U; ++u)
                if (code >> (u * T + t) & 1) mask |= 1 << u;
            network = ok[t * subsets + mask];
        }
        if (!network) continue;
        for (int i = 0; i < U * T; ++i) s[i] = code >> i & 1;
        probe.s = s;
        probe.y = transitions_on(s, U, T, true);
        probe.z = transitions_on(s, U, T, false);
        if (!verify_schedule(probe, ordered, T).empty()) continue;
        ++res.improvements;
        best = ones;
        best_code = code;
    }
    if (best_code >= 0) {
        for (int i = 0; i < U * T; ++i) s[i] = best_code >> i & 1;
        res.feasible = true;
        res.schedule = make_schedule(forecast, ordered, s);
    }
    return res;
}

double relative_objective_error(int a, int b, int beta)
{
    if (beta <= 0) throw std::invalid_argument("beta must be positive");
    return std::abs(a - b) / static_cast<double>(beta);
}

Schedule schedule_from_assignment(const MilpModel& model, const std::unordered_map<std::string, double>& values)
{
    const int U = static_cast<int>(model.user_ids.size());
    const int T = model.horizon;
    std::vector<std::uint8_t> s(static_cast<std::size_t>(U) * T, 0);
    for (int u = 0; u < U; ++u)
        for (int t = 0; t < T; ++t) {
            const std::string& name = model.problem.variables[model.s(u, t)].name;
            auto it = values.find(name);
            if (it == values.end()) it = values.find(mip::lp_identifier(name));
            if (it != values.end()) s[u * T + t] = it->second > 0.5;
        }
    return make_schedule(model.forecast, model.contracts, s);
}

}  // namespace lvdsm

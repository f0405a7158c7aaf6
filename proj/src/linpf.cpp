#include "lvdsm/linpf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace lvdsm {

Matrix3c gamma_matrix()
{
    const Complex a = std::polar(1.0, -2.0 * std::numbers::pi / 3.0);
    const Complex a2 = a * a;
    Matrix3c g;
    g << 1.0, a2, a,
         a, 1.0, a2,
         a2, a, 1.0;
    return g;
}

Matrix3c offdiag_flow(const Vector3c& lambda)
{
    return gamma_matrix() * lambda.asDiagonal();
}

std::array<double, 3> lifted_drop(const Matrix3c& z, const Vector3c& lambda)
{
    static const Matrix3c gamma = gamma_matrix();
    std::array<double, 3> drop{};
    for (int p = 0; p < 3; ++p) {
        Complex acc{};
        for (int q = 0; q < 3; ++q) acc += gamma(p, q) * lambda(q) * std::conj(z(p, q));
        drop[p] = 2.0 * acc.real();
    }
    return drop;
}

Limits Limits::from_feeder(const Feeder& feeder, int horizon)
{
    if (horizon <= 0) throw std::invalid_argument("limits horizon must be positive");
    Limits out;
    out.horizon = horizon;
    for (const Bus& b : feeder.buses) {
        out.vmin_pu.push_back(b.vmin_pu);
        out.vmax_pu.push_back(b.vmax_pu);
    }
    for (const Branch& br : feeder.branches) out.s_rated_pu.push_back(br.s_rated_pu);
    return out;
}

void Tightening::validate() const
{
    if (!(dv_low >= 0.0) || !(dv_high >= 0.0)) throw std::invalid_argument("voltage tightening must be nonnegative");
    if (!(ds >= 0.0) || !(ds < 1.0)) throw std::invalid_argument("thermal tightening must lie in [0, 1)");
}

std::vector<PolygonRow> thermal_polygon(double s_rated, double ds, int sides)
{
    if (sides < 3) throw std::invalid_argument("thermal polygon needs at least 3 sides");
    if (!(ds >= 0.0) || !(ds < 1.0)) throw std::invalid_argument("thermal tightening must lie in [0, 1)");
    const double radius = s_rated * (1.0 - ds);
    const double half = std::numbers::pi / sides;
    std::vector<PolygonRow> rows;
    rows.reserve(sides);
    for (int k = 0; k < sides; ++k) {
        const double theta = 2.0 * half * k + half;
        rows.push_back({std::cos(theta), std::sin(theta), radius * std::cos(half)});
    }
    return rows;
}

LinPfSolution evaluate_lin_pf(const RadialNetwork& net, const Injections& demand)
{
    const Feeder& f = net.feeder();
    const int T = demand.horizon();
    LinPfSolution sol;
    sol.buses = net.bus_count();
    sol.branches = net.branch_count();
    sol.horizon = T;
    sol.u.assign(static_cast<std::size_t>(sol.buses) * 3 * T, 0.0);
    sol.lambda.assign(static_cast<std::size_t>(sol.branches) * 3 * T, Complex{});

    const auto& order = net.order();
    for (int t = 0; t < T; ++t) {
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int br = it->parent_branch;
            if (br < 0) continue;
            const int bus = it->bus;
            const PhaseSet phases = f.branches[br].phases;
            for (int p = 0; p < 3; ++p) {
                if (!phases.contains(static_cast<Phase>(p))) continue;
                Complex acc{};
                if (int u = net.bus_user(bus); u >= 0) acc += demand.s(u, p, t);
                for (int child : net.child_branches(bus)) acc += sol.lambda_at(child, p, t);
                sol.lambda_at(br, p, t) = acc;
            }
        }
        for (const auto& ob : order) {
            if (ob.parent_branch < 0) {
                for (int p = 0; p < 3; ++p) sol.u_at(ob.bus, p, t) = f.buses[ob.bus].phases.contains(static_cast<Phase>(p)) ? 1.0 : 0.0;
                continue;
            }
            const int br = ob.parent_branch;
            const int from = net.branch_from(br);
            Vector3c lam;
            for (int p = 0; p < 3; ++p) lam(p) = sol.lambda_at(br, p, t);
            const auto drop = lifted_drop(f.branches[br].z_pu, lam);
            for (int p = 0; p < 3; ++p) {
                sol.u_at(ob.bus, p, t) = f.buses[ob.bus].phases.contains(static_cast<Phase>(p))
                                             ? sol.u_at(from, p, t) - drop[p]
                                             : 0.0;
            }
        }
    }
    return sol;
}

std::vector<std::array<double, 3>> voltage_response(const RadialNetwork& net, int bus, const Vector3c& load_delta)
{
    const Feeder& f = net.feeder();
    std::vector<char> on_path(net.branch_count(), 0);
    for (int br : net.path_to(bus)) on_path[br] = 1;
    std::vector<std::array<double, 3>> du(net.bus_count(), {0.0, 0.0, 0.0});
    for (const auto& ob : net.order()) {
        if (ob.parent_branch < 0) continue;
        const int br = ob.parent_branch;
        du[ob.bus] = du[net.branch_from(br)];
        if (!on_path[br]) continue;
        Vector3c lam = load_delta;
        for (int p = 0; p < 3; ++p)
            if (!f.branches[br].phases.contains(static_cast<Phase>(p))) lam(p) = 0.0;
        const auto drop = lifted_drop(f.branches[br].z_pu, lam);
        for (int p = 0; p < 3; ++p) du[ob.bus][p] -= drop[p];
    }
    for (int b = 0; b < net.bus_count(); ++b)
        for (int p = 0; p < 3; ++p)
            if (!f.buses[b].phases.contains(static_cast<Phase>(p))) du[b][p] = 0.0;
    return du;
}

int LinearConstraintBlock::variable(const std::string& name)
{
    auto [it, fresh] = index_.emplace(name, static_cast<int>(variables_.size()));
    if (fresh) variables_.push_back(name);
    return it->second;
}

int LinearConstraintBlock::find(const std::string& name) const
{
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

void LinearConstraintBlock::append(const LinearConstraintBlock& other)
{
    for (const LinearRow& row : other.rows_) {
        LinearRow copy = row;
        for (auto& term : copy.terms) term.var = variable(other.variables_[term.var]);
        rows_.push_back(std::move(copy));
    }
}

double LinearConstraintBlock::max_violation(const std::unordered_map<std::string, double>& values) const
{
    double worst = 0.0;
    for (const LinearRow& row : rows_) {
        double activity = 0.0;
        for (const auto& term : row.terms) {
            auto it = values.find(variables_[term.var]);
            if (it != values.end()) activity += term.coef * it->second;
        }
        worst = std::max({worst, row.lower - activity, activity - row.upper});
    }
    return worst;
}

std::string LinearConstraintBlock::dump() const
{
    std::string out;
    char buf[64];
    for (const LinearRow& row : rows_) {
        for (const auto& term : row.terms) {
            std::snprintf(buf, sizeof buf, "%.17g", term.coef);
            out += row.label + "  " + variables_[term.var] + "  " + buf + "\n";
        }
        std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", row.lower, row.upper);
        out += row.label + "  " + buf + "\n";
    }
    return out;
}

namespace names {

std::string sanitize(const std::string& id)
{
    std::string out;
    out.reserve(id.size());
    for (char ch : id) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                        ch == '_' || ch == '.';
        out.push_back(ok ? ch : '_');
    }
    return out;
}

namespace {
std::string indexed(const char* prefix, const std::string& id, int phase, int t)
{
    std::string out = prefix;
    out += "(" + sanitize(id);
    if (phase >= 0) {
        out += ",";
        out += "abc"[phase];
    }
    out += "," + std::to_string(t) + ")";
    return out;
}
}  // namespace

std::string u(const Feeder& f, int bus, int phase, int t) { return indexed("u", f.buses[bus].id, phase, t); }
std::string lre(const RadialNetwork& net, int branch, int phase, int t)
{
    return indexed("lre", net.feeder().buses[net.branch_to(branch)].id, phase, t);
}
std::string lim(const RadialNetwork& net, int branch, int phase, int t)
{
    return indexed("lim", net.feeder().buses[net.branch_to(branch)].id, phase, t);
}
std::string p(const Feeder& f, int user, int phase, int t) { return indexed("p", f.users[user].user_id, phase, t); }
std::string q(const Feeder& f, int user, int phase, int t) { return indexed("q", f.users[user].user_id, phase, t); }
std::string s(const std::string& user, int t) { return indexed("s", user, -1, t); }
std::string y(const std::string& user, int t) { return indexed("y", user, -1, t); }
std::string z(const std::string& user, int t) { return indexed("z", user, -1, t); }

}  // namespace names

LinearConstraintBlock build_balance(const RadialNetwork& net, int horizon)
{
    const Feeder& f = net.feeder();
    LinearConstraintBlock block;
    for (int t = 0; t < horizon; ++t) {
        for (const auto& ob : net.order()) {
            if (ob.parent_branch < 0) continue;
            const int bus = ob.bus;
            const int user = net.bus_user(bus);
            for (int p = 0; p < 3; ++p) {
                if (!f.buses[bus].phases.contains(static_cast<Phase>(p))) continue;
                LinearRow re;
                LinearRow im;
                const std::string tag = names::sanitize(f.buses[bus].id) + "," + "abc"[p] + "," + std::to_string(t) + ")";
                re.label = "bal_re(" + tag;
                im.label = "bal_im(" + tag;
                auto add_flow = [&](int br, double sign) {
                    if (!f.branches[br].phases.contains(static_cast<Phase>(p))) return;
                    re.terms.push_back({block.variable(names::lre(net, br, p, t)), sign});
                    im.terms.push_back({block.variable(names::lim(net, br, p, t)), sign});
                };
                add_flow(ob.parent_branch, 1.0);
                for (int child : net.child_branches(bus)) add_flow(child, -1.0);
                if (user >= 0 && f.users[user].phases.contains(static_cast<Phase>(p))) {
                    // injection = -demand
                    re.terms.push_back({block.variable(names::p(f, user, p, t)), -1.0});
                    im.terms.push_back({block.variable(names::q(f, user, p, t)), -1.0});
                }
                block.add_row(std::move(re));
                block.add_row(std::move(im));
            }
        }
    }
    return block;
}

LinearConstraintBlock build_ohm(const RadialNetwork& net, int horizon)
{
    const Feeder& f = net.feeder();
    const Matrix3c gamma = gamma_matrix();
    LinearConstraintBlock block;
    for (int t = 0; t < horizon; ++t) {
        for (const auto& ob : net.order()) {
            const int br = ob.parent_branch;
            if (br < 0) continue;
            const int from = net.branch_from(br);
            const int to = ob.bus;
            const Branch& branch = f.branches[br];
            for (int p = 0; p < 3; ++p) {
                if (!branch.phases.contains(static_cast<Phase>(p))) continue;
                LinearRow row;
                row.label = "ohm(" + names::sanitize(f.buses[to].id) + "," + "abc"[p] + "," + std::to_string(t) + ")";
                row.terms.push_back({block.variable(names::u(f, to, p, t)), 1.0});
                row.terms.push_back({block.variable(names::u(f, from, p, t)), -1.0});
                for (int q = 0; q < 3; ++q) {
                    if (!branch.phases.contains(static_cast<Phase>(q))) continue;
                    const Complex g = gamma(p, q) * std::conj(branch.z_pu(p, q));
                    if (g.real() != 0.0) row.terms.push_back({block.variable(names::lre(net, br, q, t)), 2.0 * g.real()});
                    if (g.imag() != 0.0) row.terms.push_back({block.variable(names::lim(net, br, q, t)), -2.0 * g.imag()});
                }
                block.add_row(std::move(row));
            }
        }
    }
    return block;
}

LinearConstraintBlock build_limits(const RadialNetwork& net, const Limits& limits, const Tightening& tightening,
                                   int polygon_sides)
{
    tightening.validate();
    const Feeder& f = net.feeder();
    if (static_cast<int>(limits.vmin_pu.size()) != net.bus_count() ||
        static_cast<int>(limits.s_rated_pu.size()) != net.branch_count())
        throw std::invalid_argument("limits do not match the feeder");
    LinearConstraintBlock block;
    for (int t = 0; t < limits.horizon; ++t) {
        for (const auto& ob : net.order()) {
            if (ob.parent_branch < 0) continue;
            const int bus = ob.bus;
            const double lo = limits.vmin_pu[bus] + tightening.dv_low;
            const double hi = limits.vmax_pu[bus] - tightening.dv_high;
            for (int p = 0; p < 3; ++p) {
                if (!f.buses[bus].phases.contains(static_cast<Phase>(p))) continue;
                LinearRow row;
                row.label = "vlim(" + names::sanitize(f.buses[bus].id) + "," + "abc"[p] + "," + std::to_string(t) + ")";
                row.terms.push_back({block.variable(names::u(f, bus, p, t)), 1.0});
                row.lower = lo * lo;
                row.upper = hi * hi;
                block.add_row(std::move(row));
            }
        }
        for (const auto& ob : net.order()) {
            const int br = ob.parent_branch;
            if (br < 0) continue;
            const auto polygon = thermal_polygon(limits.s_rated_pu[br], tightening.ds, polygon_sides);
            for (int p = 0; p < 3; ++p) {
                if (!f.branches[br].phases.contains(static_cast<Phase>(p))) continue;
                const int re = block.variable(names::lre(net, br, p, t));
                const int im = block.variable(names::lim(net, br, p, t));
                for (std::size_t k = 0; k < polygon.size(); ++k) {
                    LinearRow row;
                    row.label = "slim(" + names::sanitize(f.buses[ob.bus].id) + "," + "abc"[p] + "," +
                                std::to_string(t) + "," + std::to_string(k) + ")";
                    row.terms.push_back({re, polygon[k].cos_theta});
                    row.terms.push_back({im, polygon[k].sin_theta});
                    row.lower = -std::numeric_limits<double>::infinity();
                    row.upper = polygon[k].rhs;
                    block.add_row(std::move(row));
                }
            }
        }
    }
    return block;
}

double lin_limit_violation(const RadialNetwork& net, const LinPfSolution& sol, const Limits& limits,
                           const Tightening& tightening, int polygon_sides)
{
    tightening.validate();
    const Feeder& f = net.feeder();
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& ob : net.order()) {
        if (ob.parent_branch < 0) continue;
        const double lo = limits.vmin_pu[ob.bus] + tightening.dv_low;
        const double hi = limits.vmax_pu[ob.bus] - tightening.dv_high;
        const auto polygon = thermal_polygon(limits.s_rated_pu[ob.parent_branch], tightening.ds, polygon_sides);
        for (int p = 0; p < 3; ++p) {
            const bool on_bus = f.buses[ob.bus].phases.contains(static_cast<Phase>(p));
            const bool on_branch = f.branches[ob.parent_branch].phases.contains(static_cast<Phase>(p));
            for (int t = 0; t < sol.horizon; ++t) {
                if (on_bus) {
                    const double u = sol.u_at(ob.bus, p, t);
                    worst = std::max({worst, lo * lo - u, u - hi * hi});
                }
                if (on_branch) {
                    const Complex lam = sol.lambda_at(ob.parent_branch, p, t);
                    for (const PolygonRow& r : polygon)
                        worst = std::max(worst, r.cos_theta * lam.real() + r.sin_theta * lam.imag() - r.rhs);
                }
            }
        }
    }
    return worst;
}

std::unordered_map<std::string, double> lin_pf_assignment(const RadialNetwork& net, const Injections& demand,
                                                          const LinPfSolution& sol)
{
    const Feeder& f = net.feeder();
    std::unordered_map<std::string, double> values;
    for (int t = 0; t < sol.horizon; ++t) {
        for (int b = 0; b < net.bus_count(); ++b)
            for (int p = 0; p < 3; ++p) values[names::u(f, b, p, t)] = sol.u_at(b, p, t);
        for (int br = 0; br < net.branch_count(); ++br) {
            for (int p = 0; p < 3; ++p) {
                values[names::lre(net, br, p, t)] = sol.lambda_at(br, p, t).real();
                values[names::lim(net, br, p, t)] = sol.lambda_at(br, p, t).imag();
            }
        }
        for (int u = 0; u < demand.user_count(); ++u) {
            for (int p = 0; p < 3; ++p) {
                values[names::p(f, u, p, t)] = demand.p(u, p, t);
                values[names::q(f, u, p, t)] = demand.q(u, p, t);
            }
        }
    }
    return values;
}

}  // namespace lvdsm

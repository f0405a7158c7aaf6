#include "lvdsm/acpf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>

namespace lvdsm {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

bool has(PhaseSet set, int p) { return set.contains(static_cast<Phase>(p)); }

}  // namespace

AcPfSolution solve_ac_pf(const RadialNetwork& net, const Injections& demand, const AcPfOptions& options)
{
    const Feeder& f = net.feeder();
    const int T = demand.horizon();
    const int B = net.bus_count();
    const int L = net.branch_count();
    if (demand.user_count() != net.user_count()) throw std::invalid_argument("injections do not match the feeder users");

    AcPfSolution sol;
    sol.buses = B;
    sol.branches = L;
    sol.horizon = T;
    sol.v.assign(static_cast<std::size_t>(B) * 3 * T, Complex{});
    sol.s_flow.assign(static_cast<std::size_t>(L) * 3 * T, Complex{});
    sol.current.assign(static_cast<std::size_t>(L) * 3 * T, Complex{});
    sol.converged = true;

    const Vector3c vs = source_voltage();
    const auto& order = net.order();
    std::vector<Vector3c> v(B), load_i(B), branch_i(L);

    for (int t = 0; t < T; ++t) {
        for (int br = 0; br < L; ++br) branch_i[br].setZero();
        for (int b = 0; b < B; ++b) {
            v[b].setZero();
            for (int p = 0; p < 3; ++p)
                if (has(f.buses[b].phases, p)) v[b](p) = vs(p);
        }
        auto update_load_currents = [&] {
            for (int b = 0; b < B; ++b) {
                load_i[b].setZero();
                const int u = net.bus_user(b);
                if (u < 0) continue;
                for (int p = 0; p < 3; ++p)
                    if (has(f.users[u].phases, p)) load_i[b](p) = std::conj(demand.s(u, p, t) / v[b](p));
            }
        };
        update_load_currents();
        double mismatch = 0.0;
        int iter = 0;
        bool ok = false;
        bool collapsed = false;
        while (iter < options.max_iter) {
            ++iter;
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                const int br = it->parent_branch;
                if (br < 0) continue;
                Vector3c acc = load_i[it->bus];
                for (int child : net.child_branches(it->bus)) acc += branch_i[child];
                for (int p = 0; p < 3; ++p)
                    if (!has(f.branches[br].phases, p)) acc(p) = 0.0;
                branch_i[br] = acc;
            }
            for (const auto& ob : order) {
                const int br = ob.parent_branch;
                if (br < 0) continue;
                const Vector3c drop = f.branches[br].z_pu * branch_i[br];
                const int from = net.branch_from(br);
                for (int p = 0; p < 3; ++p) {
                    if (!has(f.buses[ob.bus].phases, p)) continue;
                    v[ob.bus](p) = v[from](p) - drop(p);
                    if (std::abs(v[ob.bus](p)) < options.collapse_pu) collapsed = true;
                }
            }
            if (collapsed) break;
            mismatch = 0.0;
            for (int b = 0; b < B; ++b) {
                const int u = net.bus_user(b);
                if (u < 0) continue;
                for (int p = 0; p < 3; ++p)
                    if (has(f.users[u].phases, p))
                        mismatch = std::max(mismatch, std::abs(v[b](p) * std::conj(load_i[b](p)) - demand.s(u, p, t)));
            }
            if (mismatch <= options.tol * 1e-2) break;
            update_load_currents();
        }
        ok = !collapsed && mismatch <= options.tol;
        sol.iterations = std::max(sol.iterations, iter);
        sol.max_mismatch = std::max(sol.max_mismatch, mismatch);
        if (collapsed) {
            sol.collapsed = true;
            sol.converged = false;
            if (sol.message.empty()) sol.message = "voltage collapse at t=" + std::to_string(t);
        } else if (!ok) {
            sol.converged = false;
            if (sol.message.empty())
                sol.message = "no convergence at t=" + std::to_string(t) + " after " + std::to_string(options.max_iter) +
                              " iterations, residual " + std::to_string(mismatch);
        }
        for (int b = 0; b < B; ++b)
            for (int p = 0; p < 3; ++p) sol.v_at(b, p, t) = v[b](p);
        for (int br = 0; br < L; ++br) {
            const int from = net.branch_from(br);
            for (int p = 0; p < 3; ++p) {
                if (!has(f.branches[br].phases, p)) continue;
                sol.i_at(br, p, t) = branch_i[br](p);
                sol.s_at(br, p, t) = v[from](p) * std::conj(branch_i[br](p));
            }
        }
    }
    return sol;
}

double kirchhoff_mismatch(const RadialNetwork& net, const Injections& demand, const AcPfSolution& sol)
{
    const Feeder& f = net.feeder();
    double worst = 0.0;
    std::vector<Vector3c> j(net.branch_count());
    for (int t = 0; t < sol.horizon; ++t) {
        for (int br = 0; br < net.branch_count(); ++br) {
            const Branch& branch = f.branches[br];
            std::vector<int> idx;
            for (int p = 0; p < 3; ++p)
                if (has(branch.phases, p)) idx.push_back(p);
            const int k = static_cast<int>(idx.size());
            Eigen::MatrixXcd z(k, k);
            Eigen::VectorXcd dv(k);
            for (int a = 0; a < k; ++a) {
                dv(a) = sol.v_at(net.branch_from(br), idx[a], t) - sol.v_at(net.branch_to(br), idx[a], t);
                for (int b = 0; b < k; ++b) z(a, b) = branch.z_pu(idx[a], idx[b]);
            }
            const Eigen::VectorXcd cur = z.partialPivLu().solve(dv);
            j[br].setZero();
            for (int a = 0; a < k; ++a) j[br](idx[a]) = cur(a);
        }
        for (int b = 0; b < net.bus_count(); ++b) {
            const int parent = net.parent_branch(b);
            if (parent < 0) continue;
            Vector3c inj = j[parent];
            for (int child : net.child_branches(b)) inj -= j[child];
            const int u = net.bus_user(b);
            for (int p = 0; p < 3; ++p) {
                if (!has(f.buses[b].phases, p)) continue;
                const Complex expect = (u >= 0 && has(f.users[u].phases, p)) ? demand.s(u, p, t) : Complex{};
                const Complex drawn = sol.v_at(b, p, t) * std::conj(inj(p));
                worst = std::max(worst, std::abs(drawn - expect));
            }
        }
    }
    return worst;
}

CongestionReport detect_congestion(const RadialNetwork& net, const AcPfSolution& sol, const Limits& limits, double tol)
{
    if (!sol.converged) throw std::invalid_argument("congestion check needs a converged power flow: " + sol.message);
    const Feeder& f = net.feeder();
    CongestionReport rep;
    rep.worst_undervoltage_margin = kInfinity;
    rep.worst_overvoltage_margin = -kInfinity;
    rep.worst_overcurrent_margin = -kInfinity;
    for (int t = 0; t < sol.horizon; ++t) {
        for (int b = 0; b < net.bus_count(); ++b) {
            if (f.buses[b].is_source) continue;
            for (int p = 0; p < 3; ++p) {
                if (!has(f.buses[b].phases, p)) continue;
                const double mag = std::abs(sol.v_at(b, p, t));
                const double under = mag - limits.vmin_pu[b];
                const double over = mag - limits.vmax_pu[b];
                rep.worst_undervoltage_margin = std::min(rep.worst_undervoltage_margin, under);
                rep.worst_overvoltage_margin = std::max(rep.worst_overvoltage_margin, over);
                if (under < -tol) rep.undervoltage.push_back({f.buses[b].id, static_cast<Phase>(p), t, mag, under});
                if (over > tol) rep.overvoltage.push_back({f.buses[b].id, static_cast<Phase>(p), t, mag, over});
            }
        }
        for (int br = 0; br < net.branch_count(); ++br) {
            for (int p = 0; p < 3; ++p) {
                if (!has(f.branches[br].phases, p)) continue;
                const double mag = std::abs(sol.s_at(br, p, t));
                const double margin = mag - limits.s_rated_pu[br];
                rep.worst_overcurrent_margin = std::max(rep.worst_overcurrent_margin, margin);
                if (margin > tol)
                    rep.overcurrent.push_back({f.buses[net.branch_from(br)].id, f.buses[net.branch_to(br)].id,
                                               static_cast<Phase>(p), t, mag, margin});
            }
        }
    }
    return rep;
}

GapSummary lin_vs_ac_gap(const RadialNetwork& net, const Injections& demand, const AcPfOptions& options)
{
    const AcPfSolution ac = solve_ac_pf(net, demand, options);
    if (!ac.converged) throw std::runtime_error("AC power flow failed: " + ac.message);
    const LinPfSolution lin = evaluate_lin_pf(net, demand);
    const Feeder& f = net.feeder();
    GapSummary g;
    long nu = 0, nf = 0;
    for (int t = 0; t < lin.horizon; ++t) {
        for (int b = 0; b < net.bus_count(); ++b)
            for (int p = 0; p < 3; ++p) {
                if (!has(f.buses[b].phases, p)) continue;
                const double gap = std::abs(lin.u_at(b, p, t) - std::norm(ac.v_at(b, p, t)));
                g.max_u_gap = std::max(g.max_u_gap, gap);
                g.mean_u_gap += gap;
                ++nu;
            }
        for (int br = 0; br < net.branch_count(); ++br)
            for (int p = 0; p < 3; ++p) {
                if (!has(f.branches[br].phases, p)) continue;
                const double gap = std::abs(lin.lambda_at(br, p, t) - ac.s_at(br, p, t));
                g.max_flow_gap = std::max(g.max_flow_gap, gap);
                g.mean_flow_gap += gap;
                ++nf;
            }
    }
    if (nu) g.mean_u_gap /= nu;
    if (nf) g.mean_flow_gap /= nf;
    return g;
}

}  // namespace lvdsm

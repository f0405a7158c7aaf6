#include "lvdsm/mip/presolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lvdsm::mip {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr int kMaxPasses = 50;

struct Activity {
    double min = 0.0, max = 0.0;
    int min_inf = 0, max_inf = 0;
};

Activity activity_range(const Constraint& c, const std::vector<double>& lo, const std::vector<double>& up)
{
    Activity a;
    for (const Term& t : c.terms) {
        const double l = t.coef > 0 ? lo[t.var] : up[t.var];
        const double u = t.coef > 0 ? up[t.var] : lo[t.var];
        if (std::isfinite(l)) a.min += t.coef * l;
        else ++a.min_inf;
        if (std::isfinite(u)) a.max += t.coef * u;
        else ++a.max_inf;
    }
    return a;
}

}  // namespace

std::vector<double> Presolved::expand(std::span<const double> reduced_x) const
{
    std::vector<double> x(column_map.size());
    for (std::size_t j = 0; j < column_map.size(); ++j)
        x[j] = column_map[j] >= 0 ? reduced_x[column_map[j]] : fixed_value[j];
    return x;
}

Presolved presolve(const Problem& problem)
{
    Presolved out;
    const int n = problem.variable_count();
    std::vector<double> lo(n), up(n);
    for (int j = 0; j < n; ++j) {
        lo[j] = problem.variables[j].lower;
        up[j] = problem.variables[j].upper;
    }
    std::vector<Constraint> rows;
    rows.reserve(problem.constraints.size());
    for (const Constraint& c : problem.constraints) {
        Constraint r = c;
        std::sort(r.terms.begin(), r.terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
        std::vector<Term> merged;
        for (const Term& t : r.terms) {
            if (!merged.empty() && merged.back().var == t.var) merged.back().coef += t.coef;
            else merged.push_back(t);
        }
        std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
        r.terms = std::move(merged);
        rows.push_back(std::move(r));
    }
    std::vector<char> active(rows.size(), 1);
    auto is_int = [&](int j) { return problem.variables[j].integer; };

    auto tighten = [&](int j, double new_lo, double new_up) -> bool {
        bool changed = false;
        if (is_int(j)) {
            new_lo = std::ceil(new_lo - 1e-9);
            new_up = std::floor(new_up + 1e-9);
        }
        if (new_lo > lo[j] + (is_int(j) ? 0.5 : 1e-9)) {
            lo[j] = new_lo;
            changed = true;
        }
        if (new_up < up[j] - (is_int(j) ? 0.5 : 1e-9)) {
            up[j] = new_up;
            changed = true;
        }
        return changed;
    };

    for (int pass = 0; pass < kMaxPasses; ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!active[i]) continue;
            Constraint& r = rows[i];
            // fold fixed columns into the bounds
            double constant = 0.0;
            std::erase_if(r.terms, [&](const Term& t) {
                if (lo[t.var] == up[t.var]) {
                    constant += t.coef * lo[t.var];
                    return true;
                }
                return false;
            });
            if (constant != 0.0) {
                r.lower -= constant;
                r.upper -= constant;
            }
            if (r.terms.empty()) {
                if (r.lower > kFeasTol || r.upper < -kFeasTol) {
                    out.infeasible = true;
                    return out;
                }
                active[i] = 0;
                continue;
            }
            if (r.terms.size() == 1) {
                const Term t = r.terms[0];
                double a = r.lower / t.coef;
                double b = r.upper / t.coef;
                if (t.coef < 0) std::swap(a, b);
                changed |= tighten(t.var, std::max(lo[t.var], a), std::min(up[t.var], b));
                active[i] = 0;
                continue;
            }
            const Activity act = activity_range(r, lo, up);
            if ((act.min_inf == 0 && act.min > r.upper + kFeasTol) || (act.max_inf == 0 && act.max < r.lower - kFeasTol)) {
                out.infeasible = true;
                return out;
            }
            const bool lower_slack = !std::isfinite(r.lower) || (act.min_inf == 0 && act.min >= r.lower - kFeasTol);
            const bool upper_slack = !std::isfinite(r.upper) || (act.max_inf == 0 && act.max <= r.upper + kFeasTol);
            if (lower_slack && upper_slack) {
                active[i] = 0;
                changed = true;
                continue;
            }
            for (const Term& t : r.terms) {
                if (!is_int(t.var)) continue;
                const double cl = t.coef > 0 ? lo[t.var] : up[t.var];
                const double cu = t.coef > 0 ? up[t.var] : lo[t.var];
                double new_lo = lo[t.var], new_up = up[t.var];
                if (std::isfinite(r.upper)) {
                    double rest;
                    bool ok = true;
                    if (act.min_inf == 0) rest = act.min - t.coef * cl;
                    else if (act.min_inf == 1 && !std::isfinite(cl)) rest = act.min;
                    else ok = false;
                    if (ok) {
                        const double bound = (r.upper - rest) / t.coef;
                        if (t.coef > 0) new_up = std::min(new_up, bound);
                        else new_lo = std::max(new_lo, bound);
                    }
                }
                if (std::isfinite(r.lower)) {
                    double rest;
                    bool ok = true;
                    if (act.max_inf == 0) rest = act.max - t.coef * cu;
                    else if (act.max_inf == 1 && !std::isfinite(cu)) rest = act.max;
                    else ok = false;
                    if (ok) {
                        const double bound = (r.lower - rest) / t.coef;
                        if (t.coef > 0) new_lo = std::max(new_lo, bound);
                        else new_up = std::min(new_up, bound);
                    }
                }
                if (tighten(t.var, new_lo, new_up)) {
                    changed = true;
                    break;  // activity is stale now
                }
            }
        }
        for (int j = 0; j < n; ++j) {
            if (lo[j] > up[j] + kFeasTol) {
                out.infeasible = true;
                return out;
            }
            if (lo[j] > up[j]) up[j] = lo[j];
        }
        if (!changed) break;
    }

    out.column_map.assign(n, -1);
    out.fixed_value.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        if (lo[j] == up[j]) {
            out.fixed_value[j] = lo[j];
            out.reduced.objective_offset += problem.objective[j] * lo[j];
            continue;
        }
        Variable v = problem.variables[j];
        v.lower = lo[j];
        v.upper = up[j];
        out.column_map[j] = out.reduced.add_variable(std::move(v), problem.objective[j]);
    }
    out.reduced.objective_offset += problem.objective_offset;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!active[i]) continue;
        Constraint r = std::move(rows[i]);
        double constant = 0.0;
        std::vector<Term> terms;
        for (const Term& t : r.terms) {
            if (out.column_map[t.var] < 0) constant += t.coef * out.fixed_value[t.var];
            else terms.push_back({out.column_map[t.var], t.coef});
        }
        r.lower -= constant;
        r.upper -= constant;
        if (terms.empty()) {
            if (r.lower > kFeasTol || r.upper < -kFeasTol) {
                out.infeasible = true;
                return out;
            }
            continue;
        }
        r.terms = std::move(terms);
        out.reduced.add_constraint(std::move(r));
    }
    return out;
}

std::vector<Component> split_components(const Problem& problem)
{
    const int n = problem.variable_count();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Constraint& c : problem.constraints)
        for (std::size_t k = 1; k < c.terms.size(); ++k) {
            const int a = find(c.terms[0].var);
            const int b = find(c.terms[k].var);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::vector<int> comp_of_root(n, -1);
    std::vector<Component> comps;
    std::vector<int> local(n);
    for (int j = 0; j < n; ++j) {
        const int r = find(j);
        if (comp_of_root[r] < 0) {
            comp_of_root[r] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        Component& c = comps[comp_of_root[r]];
        local[j] = static_cast<int>(c.columns.size());
        c.columns.push_back(j);
        c.problem.add_variable(problem.variables[j], problem.objective[j]);
    }
    for (const Constraint& c : problem.constraints) {
        if (c.terms.empty()) continue;
        Constraint local_row = c;
        for (Term& t : local_row.terms) t.var = local[t.var];
        comps[comp_of_root[find(c.terms[0].var)]].problem.add_constraint(std::move(local_row));
    }
    if (!comps.empty()) comps[0].problem.objective_offset = problem.objective_offset;
    return comps;
}

}  // namespace lvdsm::mip

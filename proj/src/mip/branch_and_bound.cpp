#include "lvdsm/mip/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "lvdsm/mip/presolve.hpp"

namespace lvdsm::mip {

const char* to_string(MipStatus status)
{
    switch (status) {
    case MipStatus::optimal: return "optimal";
    case MipStatus::infeasible: return "infeasible";
    case MipStatus::timeout: return "timeout";
    case MipStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kRowTol = 1e-7;
constexpr double kCutTol = 1e-6;
constexpr std::size_t kLazyPerRound = 200;
constexpr std::size_t kCutsPerRound = 100;
constexpr int kGomoryRounds = 100;
constexpr int kGomoryPerRound = 50;
constexpr int kMirPerRound = 50;

struct BoundChange {
    int var;
    double lower;
    double upper;
};

struct Node {
    double bound;
    double key;
    int depth;
    long id;
    std::vector<BoundChange> changes;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const
    {
        if (a.key != b.key) return a.key > b.key;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.id > b.id;
    }
};

struct PoolRow {
    std::vector<Term> terms;
    double lower;
    double upper;
    bool added = false;
};

// Cardinality inequalities implied by a row over binaries: after complementing
// negative coefficients, sum |a| l >= L needs at least k literals and
// sum |a| l <= U admits at most k.
void cardinality_cuts(const Constraint& c, const Problem& p, std::vector<PoolRow>& out)
{
    if (c.terms.size() < 2) return;
    double neg_sum = 0.0;
    int neg_count = 0;
    std::vector<double> mags;
    for (const Term& t : c.terms) {
        const Variable& v = p.variables[t.var];
        if (!v.integer || v.lower != 0.0 || v.upper != 1.0) return;
        if (t.coef < 0) {
            neg_sum += t.coef;
            ++neg_count;
        }
        mags.push_back(std::abs(t.coef));
    }
    std::vector<Term> lits;
    for (const Term& t : c.terms) lits.push_back({t.var, t.coef > 0 ? 1.0 : -1.0});
    const int n = static_cast<int>(mags.size());
    if (std::isfinite(c.lower)) {
        const double need = c.lower - neg_sum;
        if (need > 1e-9) {
            std::vector<double> m = mags;
            std::sort(m.begin(), m.end(), std::greater<>());
            double acc = 0.0;
            int k = 0;
            while (k < n && acc < need - 1e-9) acc += m[k++];
            if (acc >= need - 1e-9 && k >= 1) out.push_back({lits, static_cast<double>(k - neg_count), kInf});
        }
    }
    if (std::isfinite(c.upper)) {
        const double room = c.upper - neg_sum;
        std::vector<double> m = mags;
        std::sort(m.begin(), m.end());
        double acc = 0.0;
        int k = 0;
        while (k < n && acc + m[k] <= room + 1e-9) acc += m[k++];
        if (k < n && room >= -1e-9) out.push_back({lits, -kInf, static_cast<double>(k - neg_count)});
    }
}

// A row over 0/1 columns in <= form.
struct Knapsack {
    std::vector<Term> terms;
    double rhs;
};

void collect_knapsacks(const Constraint& c, const Problem& p, std::vector<Knapsack>& out)
{
    if (c.terms.size() < 2) return;
    for (const Term& t : c.terms) {
        const Variable& v = p.variables[t.var];
        if (!v.integer || v.lower != 0.0 || v.upper != 1.0) return;
    }
    if (std::isfinite(c.upper)) out.push_back({c.terms, c.upper});
    if (std::isfinite(c.lower)) {
        Knapsack k{c.terms, -c.lower};
        for (Term& t : k.terms) t.coef = -t.coef;
        out.push_back(std::move(k));
    }
}

// Complemented mixed-integer rounding: columns above one half are
// complemented, the row is divided by a candidate coefficient and rounded.
// Returns the efficacy of the best violated cut, zero when none is found.
double mir_cut(const Knapsack& k, const std::vector<double>& x, PoolRow& out)
{
    const std::size_t n = k.terms.size();
    std::vector<double> a(n), v(n);
    std::vector<char> comp(n, 0);
    double b = k.rhs;
    for (std::size_t j = 0; j < n; ++j) {
        const Term& t = k.terms[j];
        a[j] = t.coef;
        v[j] = x[t.var];
        if (v[j] > 0.5) {
            comp[j] = 1;
            b -= a[j];
            a[j] = -a[j];
            v[j] = 1.0 - v[j];
        }
    }
    std::vector<double> deltas;
    for (std::size_t j = 0; j < n; ++j)
        if (v[j] > 1e-6 && std::abs(a[j]) > 1e-9) deltas.push_back(std::abs(a[j]));
    std::sort(deltas.begin(), deltas.end());
    deltas.erase(std::unique(deltas.begin(), deltas.end(), [](double p, double q) { return std::abs(p - q) <= 1e-9 * q; }),
                 deltas.end());

    double best = 0.0, best_delta = 0.0;
    auto evaluate = [&](double delta) {
        const double beta = b / delta;
        const double f = beta - std::floor(beta);
        if (f < 0.01 || f > 0.99) return 0.0;
        double lhs = 0.0, norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = a[j] / delta;
            const double fd = d - std::floor(d);
            const double g = std::floor(d) + std::max(0.0, fd - f) / (1.0 - f);
            lhs += g * v[j];
            norm += g * g;
        }
        const double viol = lhs - std::floor(beta);
        return norm > 0.0 && viol > 1e-6 ? viol / std::sqrt(norm) : 0.0;
    };
    auto consider = [&](double delta) {
        const double e = evaluate(delta);
        if (e > best) {
            best = e;
            best_delta = delta;
        }
    };
    for (double d : deltas) consider(d);
    if (best_delta > 0.0)
        for (double div : {2.0, 4.0, 8.0}) consider(best_delta / div);
    if (best <= 0.0) return 0.0;

    const double beta = b / best_delta;
    const double f = beta - std::floor(beta);
    double rhs = std::floor(beta);
    out.terms.clear();
    for (std::size_t j = 0; j < n; ++j) {
        const double d = a[j] / best_delta;
        const double fd = d - std::floor(d);
        double g = std::floor(d) + std::max(0.0, fd - f) / (1.0 - f);
        if (g == 0.0) continue;
        if (comp[j]) {
            rhs -= g;
            g = -g;
        }
        out.terms.push_back({k.terms[j].var, g});
    }
    out.lower = -kInf;
    out.upper = rhs;
    out.added = true;
    return best;
}

class Searcher {
public:
    Searcher(const Problem& p, const MipOptions& opt, Clock::time_point deadline, bool has_deadline)
        : p_(p), opt_(opt), deadline_(deadline), has_deadline_(has_deadline),
          lp_(p.variables, p.objective), integral_(p.integral_objective())
    {
        const int n = p.variable_count();
        root_lo_.resize(n);
        root_up_.resize(n);
        for (int j = 0; j < n; ++j) {
            root_lo_[j] = p.variables[j].lower;
            root_up_[j] = p.variables[j].upper;
        }
        for (int i = 0; i < p.constraint_count(); ++i) {
            const Constraint& c = p.constraints[i];
            if (c.lazy) lazy_.push_back({c.terms, c.lower, c.upper});
            else lp_.add_row(c.terms, c.lower, c.upper);
            if (opt.cuts) {
                cardinality_cuts(c, p, cuts_);
                collect_knapsacks(c, p, knapsacks_);
            }
        }
        changed_.assign(n, 0);
    }

    MipResult run()
    {
        MipResult res;
        std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
        open.push({-kInf, -kInf, 0, next_id_++, {}});
        bool failed = false;
        bool root_done = false;
        while (!open.empty()) {
            if (out_of_budget(res.nodes)) {
                res.status = MipStatus::timeout;
                res.bound = std::min(incumbent_, std::max(open.top().key, root_bound_));
                finish(res);
                return res;
            }
            Node node = open.top();
            open.pop();
            if (prunable(node.bound)) continue;
            ++res.nodes;
            apply(node.changes);
            double bound;
            std::vector<double> x;
            const Outcome oc = solve_node(bound, x);
            if (oc == Outcome::failed) {
                failed = true;
                continue;
            }
            if (oc == Outcome::infeasible || oc == Outcome::pruned) continue;
            if (oc == Outcome::integral) {
                accept(x, bound);
                continue;
            }
            if (!root_done) {
                root_done = true;
                if (opt_.cuts) {
                    const Outcome rc = root_cuts(bound, x);
                    if (rc == Outcome::integral) accept(x, bound);
                    if (rc == Outcome::failed) failed = true;
                    if (rc != Outcome::fractional) continue;
                }
                root_bound_ = bound;
                if (!has_incumbent()) {
                    dive();
                    --res.nodes;
                    node.bound = bound;
                    node.key = integral_ ? std::ceil(bound - 1e-6) : bound;
                    open.push(std::move(node));
                    continue;
                }
            }
            const int var = branching_variable(x);
            std::vector<BoundChange> fixes = reduced_cost_fixing(bound);
            const double v = x[var];
            const double key = integral_ ? std::ceil(bound - 1e-6) : bound;
            for (int dir = 0; dir < 2; ++dir) {
                Node child{bound, key, node.depth + 1, next_id_++, node.changes};
                child.changes.insert(child.changes.end(), fixes.begin(), fixes.end());
                if (dir == 0) child.changes.push_back({var, std::ceil(v), kInf});
                else child.changes.push_back({var, -kInf, std::floor(v)});
                open.push(std::move(child));
            }
        }
        if (has_incumbent()) {
            res.status = MipStatus::optimal;
            res.bound = incumbent_;
        } else {
            res.status = failed ? MipStatus::numerical_failure : MipStatus::infeasible;
            res.bound = failed ? -kInf : kInf;
        }
        if (failed && has_incumbent()) res.status = MipStatus::numerical_failure;
        finish(res);
        return res;
    }

private:
    enum class Outcome { infeasible, pruned, integral, fractional, failed };

    bool has_incumbent() const { return !best_x_.empty(); }

    bool out_of_budget(long nodes) const
    {
        if (opt_.node_limit >= 0 && nodes >= opt_.node_limit) return true;
        return has_deadline_ && Clock::now() > deadline_;
    }

    bool prunable(double bound) const
    {
        if (!has_incumbent()) return false;
        if (integral_) return std::ceil(bound - 1e-6) >= incumbent_ - opt_.gap_tol - 1e-9;
        return bound >= incumbent_ - opt_.gap_tol - 1e-9;
    }

    void finish(MipResult& res)
    {
        res.lp_iterations = lp_.iterations();
        res.lazy_rows_added = lazy_added_;
        res.cuts_added = cuts_added_;
        if (has_incumbent()) {
            res.x = best_x_;
            res.objective = incumbent_;
        }
    }

    void apply(const std::vector<BoundChange>& changes)
    {
        for (int j : touched_) {
            changed_[j] = 0;
            lp_.set_bounds(j, root_lo_[j], root_up_[j]);
        }
        touched_.clear();
        for (const BoundChange& c : changes) {
            const double lo = std::max(lp_.lower(c.var), c.lower);
            const double up = std::min(lp_.upper(c.var), c.upper);
            if (!changed_[c.var]) {
                changed_[c.var] = 1;
                touched_.push_back(c.var);
            }
            if (lo > up) {
                // conflicting branch: make the node infeasible through an empty box
                lp_.set_bounds(c.var, lo, lo);
                empty_box_ = true;
            } else {
                lp_.set_bounds(c.var, lo, up);
            }
        }
    }

    int separate(const std::vector<double>& x)
    {
        int added = 0;
        auto scan = [&](std::vector<PoolRow>& pool, double tol, std::size_t cap, long& counter) {
            std::vector<std::pair<double, int>> viol;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (pool[i].added) continue;
                double a = 0.0;
                for (const Term& t : pool[i].terms) a += t.coef * x[t.var];
                const double v = std::max(pool[i].lower - a, a - pool[i].upper);
                if (v > tol) viol.push_back({-v, static_cast<int>(i)});
            }
            std::sort(viol.begin(), viol.end());
            for (std::size_t k = 0; k < viol.size() && k < cap; ++k) {
                PoolRow& r = pool[viol[k].second];
                lp_.add_row(r.terms, r.lower, r.upper);
                r.added = true;
                ++counter;
                ++added;
            }
        };
        scan(lazy_, kRowTol, kLazyPerRound, lazy_added_);
        if (added == 0) scan(cuts_, kCutTol, kCutsPerRound, cuts_added_);
        return added;
    }

    Outcome solve_node(double& bound, std::vector<double>& x)
    {
        if (empty_box_) {
            empty_box_ = false;
            return Outcome::infeasible;
        }
        for (;;) {
            const LpStatus st = lp_.solve();
            if (st == LpStatus::infeasible) return Outcome::infeasible;
            if (st != LpStatus::optimal) return Outcome::failed;
            bound = lp_.objective() + p_.objective_offset;
            if (prunable(bound)) return Outcome::pruned;
            x = lp_.primal();
            if (separate(x) == 0) break;
        }
        for (int j = 0; j < p_.variable_count(); ++j) {
            if (!p_.variables[j].integer) continue;
            if (std::abs(x[j] - std::round(x[j])) > opt_.int_tol) return Outcome::fractional;
        }
        return Outcome::integral;
    }

    int add_mir_cuts(const std::vector<double>& x)
    {
        std::vector<std::pair<double, PoolRow>> found;
        for (const Knapsack& k : knapsacks_) {
            PoolRow row;
            const double e = mir_cut(k, x, row);
            if (e > 1e-4) found.push_back({-e, std::move(row)});
        }
        std::stable_sort(found.begin(), found.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
        int added = 0;
        for (auto& [e, row] : found) {
            if (added >= kMirPerRound) break;
            root_cut_rows_.push_back(lp_.add_row(row.terms, row.lower, row.upper));
            ++added;
        }
        cuts_added_ += added;
        return added;
    }

    // Rounds of Gomory cuts on the root LP until the bound stalls.
    Outcome root_cuts(double& bound, std::vector<double>& x)
    {
        std::vector<char> integer(p_.variable_count());
        for (int j = 0; j < p_.variable_count(); ++j) integer[j] = p_.variables[j].integer;
        int stalled = 0;
        for (int round = 0; round < kGomoryRounds; ++round) {
            if (has_deadline_ && Clock::now() > deadline_) break;
            const int mir = add_mir_cuts(x);
            const auto cuts = lp_.gomory_cuts(integer, kGomoryPerRound);
            if (cuts.empty() && mir == 0) break;
            for (const auto& c : cuts) root_cut_rows_.push_back(lp_.add_row(c.terms, c.rhs, kInf));
            cuts_added_ += static_cast<long>(cuts.size());
            const double before = bound;
            const Outcome oc = solve_node(bound, x);
            if (oc != Outcome::fractional) return oc;
            const bool moved = integral_ ? std::ceil(bound - 1e-6) > std::ceil(before - 1e-6) : false;
            if (!moved && bound - before < 1e-3 * (1.0 + std::abs(bound))) {
                if (++stalled >= 10) break;
            } else {
                stalled = 0;
            }
        }
        drop_slack_cuts();
        return Outcome::fractional;
    }

    // Root cuts whose logical is basic carry no dual weight; removing them
    // leaves the optimum unchanged and keeps the tableau small.
    void drop_slack_cuts()
    {
        std::sort(root_cut_rows_.begin(), root_cut_rows_.end());
        std::vector<int> kept;
        for (int r : root_cut_rows_)
            if (!lp_.row_is_basic(r)) kept.push_back(r);
        lp_.remove_basic_rows(root_cut_rows_);
        // surviving cut rows shift down past every removed row before them
        std::vector<int> shifted;
        std::size_t removed_before = 0, k = 0;
        for (int r : root_cut_rows_) {
            if (k < kept.size() && kept[k] == r) {
                shifted.push_back(r - static_cast<int>(removed_before));
                ++k;
            } else {
                ++removed_before;
            }
        }
        root_cut_rows_ = std::move(shifted);
    }

    void accept(std::vector<double> x, double bound)
    {
        for (int j = 0; j < p_.variable_count(); ++j)
            if (p_.variables[j].integer) x[j] = std::round(x[j]);
        double obj = integral_ ? std::round(bound) : bound;
        if (integral_) obj = p_.objective_value(x);
        if (!has_incumbent() || obj < incumbent_ - 1e-9) {
            incumbent_ = obj;
            best_x_ = std::move(x);
        }
    }

    int branching_variable(const std::vector<double>& x) const
    {
        int best = -1;
        int best_prio = 0;
        double best_frac = -1.0;
        for (int j = 0; j < p_.variable_count(); ++j) {
            const Variable& v = p_.variables[j];
            if (!v.integer) continue;
            const double f = std::abs(x[j] - std::round(x[j]));
            if (f <= opt_.int_tol) continue;
            if (best < 0 || v.branch_priority > best_prio || (v.branch_priority == best_prio && f > best_frac + 1e-12)) {
                best = j;
                best_prio = v.branch_priority;
                best_frac = f;
            }
        }
        return best;
    }

    std::vector<BoundChange> reduced_cost_fixing(double bound) const
    {
        std::vector<BoundChange> out;
        if (!has_incumbent()) return out;
        const double limit = integral_ ? incumbent_ - 1.0 + 1e-6 : incumbent_ - opt_.gap_tol - 1e-9;
        const std::vector<double> d = lp_.reduced_costs();
        for (int j = 0; j < p_.variable_count(); ++j) {
            if (!p_.variables[j].integer) continue;
            const double lo = lp_.lower(j), up = lp_.upper(j);
            if (lo == up) continue;
            if (d[j] > 0 && bound + d[j] > limit) out.push_back({j, lo, lo});
            else if (d[j] < 0 && bound - d[j] > limit) out.push_back({j, up, up});
        }
        return out;
    }

    // Fractional diving from the current node for a first incumbent.
    void dive()
    {
        const int n = p_.variable_count();
        std::vector<BoundChange> path;
        for (int step = 0; step < 2 * n + 10; ++step) {
            if (has_deadline_ && Clock::now() > deadline_) return;
            double bound;
            std::vector<double> x;
            apply(path);
            Outcome oc = solve_node(bound, x);
            if (oc == Outcome::integral) {
                accept(x, bound);
                return;
            }
            if (oc != Outcome::fractional) {
                // undo the last fixing and try the opposite rounding once
                if (path.empty() || path.back().lower != path.back().upper || flipped_) return;
                BoundChange& last = path.back();
                const double other = 1.0 - last.lower;
                if (other < root_lo_[last.var] || other > root_up_[last.var]) return;
                last.lower = last.upper = other;
                flipped_ = true;
                continue;
            }
            flipped_ = false;
            int pick = -1;
            double pick_frac = 2.0;
            int pick_prio = 0;
            for (int j = 0; j < n; ++j) {
                const Variable& v = p_.variables[j];
                if (!v.integer) continue;
                const double f = std::abs(x[j] - std::round(x[j]));
                if (f <= opt_.int_tol) continue;
                if (pick < 0 || v.branch_priority > pick_prio || (v.branch_priority == pick_prio && f < pick_frac - 1e-12)) {
                    pick = j;
                    pick_frac = f;
                    pick_prio = v.branch_priority;
                }
            }
            const double val = std::ceil(x[pick] - 0.5 + 1e-9);
            path.push_back({pick, val, val});
        }
    }

    const Problem& p_;
    const MipOptions& opt_;
    Clock::time_point deadline_;
    bool has_deadline_;
    DualSimplex lp_;
    bool integral_;
    std::vector<PoolRow> lazy_;
    std::vector<PoolRow> cuts_;
    std::vector<Knapsack> knapsacks_;
    std::vector<int> root_cut_rows_;
    std::vector<double> root_lo_, root_up_;
    std::vector<char> changed_;
    std::vector<int> touched_;
    bool empty_box_ = false;
    bool flipped_ = false;
    double incumbent_ = kInf;
    double root_bound_ = -kInf;
    std::vector<double> best_x_;
    long next_id_ = 0;
    long lazy_added_ = 0;
    long cuts_added_ = 0;
};

MipResult solve_trivial(const Problem& p)
{
    MipResult r;
    r.x.resize(p.variable_count());
    for (int j = 0; j < p.variable_count(); ++j) {
        const Variable& v = p.variables[j];
        const double c = p.objective[j];
        double val = c > 0 ? v.lower : c < 0 ? v.upper : (std::isfinite(v.lower) ? v.lower : std::isfinite(v.upper) ? v.upper : 0.0);
        if (!std::isfinite(val)) {
            r.status = MipStatus::numerical_failure;
            r.x.clear();
            return r;
        }
        r.x[j] = val;
    }
    r.status = MipStatus::optimal;
    r.objective = r.bound = p.objective_value(r.x);
    return r;
}

}  // namespace

MipResult solve_mip(const Problem& problem, const MipOptions& options)
{
    const bool has_deadline = options.time_limit_s > 0;
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(has_deadline ? options.time_limit_s : 0.0));
    Presolved pre;
    const Problem* work = &problem;
    if (options.presolve) {
        pre = presolve(problem);
        if (pre.infeasible) {
            MipResult r;
            r.status = MipStatus::infeasible;
            r.bound = kInf;
            return r;
        }
        work = &pre.reduced;
    }
    std::vector<Component> comps;
    if (options.decompose) {
        comps = split_components(*work);
    } else {
        Component all;
        all.problem = *work;
        for (int j = 0; j < work->variable_count(); ++j) all.columns.push_back(j);
        if (work->variable_count() > 0) comps.push_back(std::move(all));
    }

    MipResult total;
    total.status = MipStatus::optimal;
    total.objective = 0.0;
    total.bound = 0.0;
    std::vector<double> xw(work->variable_count(), 0.0);
    bool complete = true;
    for (const Component& c : comps) {
        MipResult r = c.problem.constraints.empty() ? solve_trivial(c.problem)
                                                    : Searcher(c.problem, options, deadline, has_deadline).run();
        total.nodes += r.nodes;
        total.lp_iterations += r.lp_iterations;
        total.lazy_rows_added += r.lazy_rows_added;
        total.cuts_added += r.cuts_added;
        if (r.status == MipStatus::infeasible) {
            MipResult inf;
            inf.status = MipStatus::infeasible;
            inf.bound = kInf;
            inf.nodes = total.nodes;
            inf.lp_iterations = total.lp_iterations;
            return inf;
        }
        if (r.status != MipStatus::optimal && total.status == MipStatus::optimal) total.status = r.status;
        total.bound += r.bound;
        if (r.has_incumbent()) {
            total.objective += r.objective;
            for (std::size_t k = 0; k < c.columns.size(); ++k) xw[c.columns[k]] = r.x[k];
        } else {
            complete = false;
        }
    }
    if (!complete) {
        total.objective = kInf;
        return total;
    }
    total.x = options.presolve ? pre.expand(xw) : xw;
    total.objective = problem.objective_value(total.x);
    if (total.status == MipStatus::optimal) total.bound = total.objective;
    return total;
}

LpResult solve_lp_relaxation(const Problem& problem, std::span<const std::pair<int, double>> fixings)
{
    std::vector<Variable> cols = problem.variables;
    for (const auto& [j, v] : fixings) cols.at(j).lower = cols.at(j).upper = v;
    for (Variable& v : cols)
        if (v.lower > v.upper) {
            LpResult r;
            r.status = LpStatus::infeasible;
            return r;
        }
    DualSimplex lp(cols, problem.objective);
    for (const Constraint& c : problem.constraints) lp.add_row(c.terms, c.lower, c.upper);
    LpResult r;
    r.status = lp.solve();
    if (r.status == LpStatus::optimal) {
        r.x = lp.primal();
        r.objective = lp.objective() + problem.objective_offset;
    } else if (r.status == LpStatus::infeasible) {
        r.farkas = lp.farkas();
    }
    return r;
}

bool farkas_certifies(const Problem& problem, std::span<const double> y, std::span<const std::pair<int, double>> fixings)
{
    if (y.size() != problem.constraints.size()) return false;
    std::vector<double> lo(problem.variable_count()), up(problem.variable_count());
    for (int j = 0; j < problem.variable_count(); ++j) {
        lo[j] = problem.variables[j].lower;
        up[j] = problem.variables[j].upper;
    }
    for (const auto& [j, v] : fixings) lo[j] = up[j] = v;
    std::vector<double> coef(problem.variable_count(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i)
        for (const Term& t : problem.constraints[i].terms) coef[t.var] += y[i] * t.coef;
    double mn = 0.0, mx = 0.0;
    auto add = [&](double c, double l, double u) {
        if (std::abs(c) < 1e-12) return;
        mn += c > 0 ? c * l : c * u;
        mx += c > 0 ? c * u : c * l;
    };
    for (int j = 0; j < problem.variable_count(); ++j) add(coef[j], lo[j], up[j]);
    for (std::size_t i = 0; i < y.size(); ++i) add(-y[i], problem.constraints[i].lower, problem.constraints[i].upper);
    return mn > 1e-7 || mx < -1e-7;
}

}  // namespace lvdsm::mip

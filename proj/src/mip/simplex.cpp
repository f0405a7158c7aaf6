#include "lvdsm/mip/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace lvdsm::mip {

const char* to_string(LpStatus status)
{
    switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

namespace {
constexpr double kDrop = 1e-13;
constexpr long kResidualCheckEvery = 100;
constexpr long kReinvertEvery = 3000;
constexpr int kMaxRecoveries = 2;
}  // namespace

DualSimplex::DualSimplex(std::span<const Variable> columns, std::span<const double> cost, SimplexOptions options)
    : opt_(options), n_(static_cast<int>(columns.size()))
{
    if (cost.size() != columns.size()) throw std::invalid_argument("one cost per column required");
    lo_.resize(n_);
    up_.resize(n_);
    work_lo_.resize(n_);
    work_up_.resize(n_);
    true_cost_.assign(cost.begin(), cost.end());
    cost_ = true_cost_;
    cols_.resize(n_);
    status_.resize(n_);
    where_.resize(n_);
    x_.assign(n_, 0.0);
    nonbasic_.resize(n_);
    d_.resize(n_);
    for (int j = 0; j < n_; ++j) {
        lo_[j] = columns[j].lower;
        up_[j] = columns[j].upper;
        if (lo_[j] > up_[j]) throw std::invalid_argument("column " + columns[j].name + " has empty bounds");
        work_lo_[j] = std::isfinite(lo_[j]) ? lo_[j] : -opt_.artificial_bound;
        work_up_[j] = std::isfinite(up_[j]) ? up_[j] : opt_.artificial_bound;
        nonbasic_[j] = j;
        place_nonbasic(j, j, cost_[j]);
    }
}

void DualSimplex::place_nonbasic(int v, int k, double d)
{
    const double lo = var_lower(v);
    const double up = var_upper(v);
    where_[v] = k;
    d_[k] = d;
    if (lo == up) {
        status_[v] = Status::fixed;
        x_[v] = lo;
    } else if (d > 0.0 || (d == 0.0 && std::isfinite(lo))) {
        if (std::isfinite(lo)) {
            status_[v] = Status::at_lower;
            x_[v] = lo;
        } else if (std::isfinite(up)) {
            status_[v] = Status::at_upper;
            x_[v] = up;
        } else {
            status_[v] = Status::free_zero;
            x_[v] = 0.0;
        }
    } else {
        if (std::isfinite(up)) {
            status_[v] = Status::at_upper;
            x_[v] = up;
        } else if (std::isfinite(lo)) {
            status_[v] = Status::at_lower;
            x_[v] = lo;
        } else {
            status_[v] = Status::free_zero;
            x_[v] = 0.0;
        }
    }
}

void DualSimplex::set_bounds(int column, double lower, double upper)
{
    if (lower > upper) throw std::invalid_argument("set_bounds: lower above upper");
    lo_[column] = lower;
    up_[column] = upper;
    work_lo_[column] = std::isfinite(lower) ? lower : -opt_.artificial_bound;
    work_up_[column] = std::isfinite(upper) ? upper : opt_.artificial_bound;
    if (status_[column] == Status::basic) return;
    const int k = where_[column];
    const double old = x_[column];
    const Status prev = status_[column];
    const double lo = work_lo_[column];
    const double up = work_up_[column];
    if (lo == up) {
        status_[column] = Status::fixed;
        x_[column] = lo;
    } else if (prev == Status::at_lower) {
        x_[column] = lo;
    } else if (prev == Status::at_upper) {
        x_[column] = up;
    } else {
        place_nonbasic(column, k, d_[k]);
    }
    const double delta = x_[column] - old;
    if (delta != 0.0)
        for (int i = 0; i < m_; ++i)
            if (const double t = tab_[i][k]; t != 0.0) x_[head_[i]] -= t * delta;
}

int DualSimplex::add_row(std::span<const Term> terms, double lower, double upper)
{
    if (lower > upper) throw std::invalid_argument("add_row: lower above upper");
    const int v = n_ + m_;
    std::vector<double> row(n_, 0.0);
    double value = 0.0;
    for (const Term& t : terms) {
        if (t.var < 0 || t.var >= n_) throw std::invalid_argument("add_row: bad column index");
        if (t.coef == 0.0) continue;
        value += t.coef * x_[t.var];
        if (status_[t.var] == Status::basic) {
            const auto& src = tab_[where_[t.var]];
            for (int k = 0; k < n_; ++k)
                if (src[k] != 0.0) row[k] += t.coef * src[k];
        } else {
            row[where_[t.var]] -= t.coef;
        }
        cols_[t.var].push_back({m_, t.coef});
    }
    double w = 1.0;
    for (double& e : row) {
        if (std::abs(e) < kDrop) e = 0.0;
        w += e * e;
    }
    rows_.push_back({std::vector<Term>(terms.begin(), terms.end())});
    row_lo_.push_back(lower);
    row_up_.push_back(upper);
    tab_.push_back(std::move(row));
    weight_.push_back(w);
    head_.push_back(v);
    where_.push_back(m_);
    status_.push_back(Status::basic);
    x_.push_back(value);
    cost_.push_back(0.0);
    true_cost_.push_back(0.0);
    ++m_;
    return m_ - 1;
}

int DualSimplex::remove_basic_rows(std::span<const int> rows)
{
    std::vector<char> drop(m_, 0);
    int count = 0;
    for (int i : rows)
        if (i >= 0 && i < m_ && !drop[i] && status_[n_ + i] == Status::basic) {
            drop[i] = 1;
            ++count;
        }
    if (count == 0) return 0;
    std::vector<int> new_index(m_, -1);
    int next = 0;
    for (int i = 0; i < m_; ++i)
        if (!drop[i]) new_index[i] = next++;
    auto remap = [&](int v) { return v < n_ ? v : n_ + new_index[v - n_]; };

    // tableau rows of the dropped logicals go away with them
    std::vector<std::vector<double>> tab;
    std::vector<double> weight;
    std::vector<int> head;
    for (int r = 0; r < m_; ++r) {
        const int v = head_[r];
        if (v >= n_ && drop[v - n_]) continue;
        tab.push_back(std::move(tab_[r]));
        weight.push_back(weight_[r]);
        head.push_back(remap(v));
    }
    tab_ = std::move(tab);
    weight_ = std::move(weight);
    head_ = std::move(head);
    for (int& v : nonbasic_) v = remap(v);

    std::vector<int> where(n_ + next);
    std::vector<Status> status(n_ + next);
    std::vector<double> x(n_ + next), cost(n_ + next), true_cost(n_ + next);
    for (int v = 0; v < n_ + m_; ++v) {
        if (v >= n_ && drop[v - n_]) continue;
        const int w = remap(v);
        status[w] = status_[v];
        x[w] = x_[v];
        cost[w] = cost_[v];
        true_cost[w] = true_cost_[v];
    }
    for (int r = 0; r < static_cast<int>(head_.size()); ++r) where[head_[r]] = r;
    for (int k = 0; k < n_; ++k) where[nonbasic_[k]] = k;
    where_ = std::move(where);
    status_ = std::move(status);
    x_ = std::move(x);
    cost_ = std::move(cost);
    true_cost_ = std::move(true_cost);

    std::vector<RowData> kept_rows;
    std::vector<double> lo, up;
    for (int i = 0; i < m_; ++i) {
        if (drop[i]) continue;
        kept_rows.push_back(std::move(rows_[i]));
        lo.push_back(row_lo_[i]);
        up.push_back(row_up_[i]);
    }
    rows_ = std::move(kept_rows);
    row_lo_ = std::move(lo);
    row_up_ = std::move(up);
    for (auto& col : cols_) {
        std::vector<Term> kept;
        for (const Term& t : col)
            if (!drop[t.var]) kept.push_back({new_index[t.var], t.coef});
        col = std::move(kept);
    }
    m_ = next;
    return count;
}

double DualSimplex::infeasibility(int r) const
{
    const int v = head_[r];
    const double x = x_[v];
    const double lo = var_lower(v);
    const double up = var_upper(v);
    if (x < lo - opt_.primal_tol) return lo - x;
    if (x > up + opt_.primal_tol) return x - up;
    return 0.0;
}

void DualSimplex::pivot(int r, int q)
{
    auto& prow = tab_[r];
    const double piv = prow[q];
    nz_.clear();
    for (int k = 0; k < n_; ++k)
        if (k != q && prow[k] != 0.0) nz_.push_back(k);

    const double inv = 1.0 / piv;
    for (int k : nz_) prow[k] *= inv;
    prow[q] = inv;
    double wr = 1.0 + inv * inv;
    for (int k : nz_) wr += prow[k] * prow[k];
    weight_[r] = wr;

    for (int i = 0; i < m_; ++i) {
        if (i == r) continue;
        auto& row = tab_[i];
        const double f = row[q];
        if (f == 0.0) continue;
        double w = weight_[i];
        for (int k : nz_) {
            const double old = row[k];
            double nw = old - f * prow[k];
            if (std::abs(nw) < kDrop) nw = 0.0;
            row[k] = nw;
            w += nw * nw - old * old;
        }
        const double nq = -f * inv;
        w += nq * nq - f * f;
        row[q] = nq;
        weight_[i] = std::max(w, 1.0);
    }

    const double dq = d_[q];
    if (dq != 0.0) {
        for (int k : nz_) d_[k] -= dq * prow[k];
        d_[q] = -dq * inv;
    }

    const int entering = nonbasic_[q];
    const int leaving = head_[r];
    head_[r] = entering;
    nonbasic_[q] = leaving;
    where_[entering] = r;
    where_[leaving] = q;
    status_[entering] = Status::basic;
}

void DualSimplex::recompute_basic_values()
{
    for (int i = 0; i < m_; ++i) {
        double acc = 0.0;
        const auto& row = tab_[i];
        for (int k = 0; k < n_; ++k)
            if (row[k] != 0.0) acc -= row[k] * x_[nonbasic_[k]];
        x_[head_[i]] = acc;
    }
}

void DualSimplex::recompute_reduced_costs()
{
    for (int k = 0; k < n_; ++k) d_[k] = cost_[nonbasic_[k]];
    for (int i = 0; i < m_; ++i) {
        const double cb = cost_[head_[i]];
        if (cb == 0.0) continue;
        const auto& row = tab_[i];
        for (int k = 0; k < n_; ++k)
            if (row[k] != 0.0) d_[k] -= cb * row[k];
    }
}

double DualSimplex::primal_residual() const
{
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
        double acc = -x_[n_ + i];
        double scale = std::abs(x_[n_ + i]);
        for (const Term& t : rows_[i].terms) {
            acc += t.coef * x_[t.var];
            scale = std::max(scale, std::abs(t.coef * x_[t.var]));
        }
        worst = std::max(worst, std::abs(acc) / (1.0 + scale));
    }
    return worst;
}

bool DualSimplex::reinvert()
{
    ++reinversions_;
    since_reinvert_ = 0;
    if (m_ == 0) return true;
    using Sparse = Eigen::SparseMatrix<double>;
    std::vector<Eigen::Triplet<double>> trip;
    auto column_entries = [&](int v, int col) {
        if (v < n_) {
            for (const Term& t : cols_[v]) trip.emplace_back(t.var, col, t.coef);
        } else {
            trip.emplace_back(v - n_, col, -1.0);
        }
    };
    for (int i = 0; i < m_; ++i) column_entries(head_[i], i);
    Sparse basis(m_, m_);
    basis.setFromTriplets(trip.begin(), trip.end());
    basis.makeCompressed();
    Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(basis);
    if (lu.info() != Eigen::Success) return false;

    Eigen::VectorXd rhs(m_);
    for (int k = 0; k < n_; ++k) {
        rhs.setZero();
        const int v = nonbasic_[k];
        if (v < n_) {
            for (const Term& t : cols_[v]) rhs[t.var] += t.coef;
        } else {
            rhs[v - n_] = -1.0;
        }
        Eigen::VectorXd col = lu.solve(rhs);
        if (lu.info() != Eigen::Success) return false;
        for (int i = 0; i < m_; ++i) tab_[i][k] = std::abs(col[i]) < kDrop ? 0.0 : col[i];
    }
    for (int i = 0; i < m_; ++i) {
        double w = 1.0;
        for (double e : tab_[i]) w += e * e;
        weight_[i] = w;
    }
    recompute_basic_values();
    recompute_reduced_costs();
    return true;
}

void DualSimplex::crash_free_columns()
{
    crashed_ = true;
    for (int j = 0; j < n_; ++j) {
        if (std::isfinite(lo_[j]) || std::isfinite(up_[j]) || status_[j] == Status::basic) continue;
        const int k = where_[j];
        int best = -1;
        double best_abs = 0.0;
        double col_max = 0.0;
        for (int i = 0; i < m_; ++i) col_max = std::max(col_max, std::abs(tab_[i][k]));
        for (int i = 0; i < m_; ++i) {
            const int v = head_[i];
            if (v < n_ || row_lo_[v - n_] != row_up_[v - n_]) continue;
            const double a = std::abs(tab_[i][k]);
            if (a > best_abs && a >= 0.1 * col_max) {
                best_abs = a;
                best = i;
            }
        }
        if (best < 0 || best_abs < 1e-7) continue;
        const int leaving = head_[best];
        pivot(best, k);
        status_[leaving] = Status::fixed;
        x_[leaving] = row_lo_[leaving - n_];
    }
    recompute_basic_values();
    recompute_reduced_costs();
}

void DualSimplex::slack_basis()
{
    for (int j = 0; j < n_; ++j) nonbasic_[j] = j;
    for (int i = 0; i < m_; ++i) {
        const int v = n_ + i;
        head_[i] = v;
        where_[v] = i;
        status_[v] = Status::basic;
        auto& row = tab_[i];
        std::fill(row.begin(), row.end(), 0.0);
        double w = 1.0;
        for (const Term& t : rows_[i].terms) row[t.var] -= t.coef;
        for (double e : row) w += e * e;
        weight_[i] = w;
    }
    cost_ = true_cost_;
    perturbed_ = false;
    for (int j = 0; j < n_; ++j) {
        status_[j] = Status::at_lower;
        place_nonbasic(j, j, cost_[j]);
    }
    recompute_basic_values();
    recompute_reduced_costs();
    since_reinvert_ = 0;
}

bool DualSimplex::recover()
{
    if (++recoveries_ > kMaxRecoveries) return false;
    slack_basis();
    crash_free_columns();
    perturb_costs();
    return true;
}

void DualSimplex::perturb_costs()
{
    if (perturbed_ || opt_.cost_perturbation <= 0.0) return;
    perturbed_ = true;
    for (int k = 0; k < n_; ++k) {
        const int v = nonbasic_[k];
        // splitmix64
        rng_state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = rng_state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
        const double eps = opt_.cost_perturbation * (1.0 + u) * (1.0 + std::abs(cost_[v]));
        if (status_[v] == Status::at_lower) {
            cost_[v] += eps;
            d_[k] += eps;
        } else if (status_[v] == Status::at_upper) {
            cost_[v] -= eps;
            d_[k] -= eps;
        }
    }
}

void DualSimplex::remove_perturbation()
{
    if (!perturbed_) return;
    perturbed_ = false;
    cost_ = true_cost_;
    recompute_reduced_costs();
}

bool DualSimplex::primal_cleanup()
{
    for (;;) {
        if (iterations_ >= opt_.max_iterations) return false;
        int q = -1;
        int best_var = var_count();
        int sigma = 0;
        for (int k = 0; k < n_; ++k) {
            const int v = nonbasic_[k];
            const Status st = status_[v];
            int dir = 0;
            if ((st == Status::at_lower || st == Status::free_zero) && d_[k] < -opt_.dual_tol) dir = 1;
            else if ((st == Status::at_upper || st == Status::free_zero) && d_[k] > opt_.dual_tol) dir = -1;
            if (dir != 0 && v < best_var) {
                best_var = v;
                q = k;
                sigma = dir;
            }
        }
        if (q < 0) return true;
        ++iterations_;
        ++since_reinvert_;
        const int entering = nonbasic_[q];
        const double range = var_upper(entering) - var_lower(entering);
        double step = kInf;
        int leave = -1;
        int leave_var = var_count();
        for (int i = 0; i < m_; ++i) {
            const double g = -tab_[i][q] * sigma;
            if (std::abs(g) <= opt_.pivot_tol) continue;
            const int v = head_[i];
            double room;
            if (g > 0.0) {
                if (!std::isfinite(var_upper(v))) continue;
                room = (var_upper(v) - x_[v]) / g;
            } else {
                if (!std::isfinite(var_lower(v))) continue;
                room = (x_[v] - var_lower(v)) / -g;
            }
            room = std::max(room, 0.0);
            if (room < step - 1e-12 || (room <= step + 1e-12 && v < leave_var)) {
                step = room;
                leave = i;
                leave_var = v;
            }
        }
        if (std::isfinite(range) && range <= step) {
            const double delta = sigma * range;
            x_[entering] += delta;
            status_[entering] = sigma > 0 ? Status::at_upper : Status::at_lower;
            for (int i = 0; i < m_; ++i)
                if (const double t = tab_[i][q]; t != 0.0) x_[head_[i]] -= t * delta;
            continue;
        }
        if (leave < 0) return false;  // unbounded ray inside artificial boxes
        const double delta = sigma * step;
        x_[entering] += delta;
        for (int i = 0; i < m_; ++i)
            if (const double t = tab_[i][q]; t != 0.0) x_[head_[i]] -= t * delta;
        const int lv = head_[leave];
        const double g = -tab_[leave][q] * sigma;
        const bool to_upper = g > 0.0;
        x_[lv] = to_upper ? var_upper(lv) : var_lower(lv);
        pivot(leave, q);
        if (var_lower(lv) == var_upper(lv)) status_[lv] = Status::fixed;
        else status_[lv] = to_upper ? Status::at_upper : Status::at_lower;
    }
}

void DualSimplex::make_farkas(int r)
{
    farkas_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
        const int v = n_ + i;
        if (status_[v] == Status::basic) {
            farkas_[i] = (where_[v] == r) ? -1.0 : 0.0;
        } else {
            farkas_[i] = -tab_[r][where_[v]];
        }
    }
}

LpStatus DualSimplex::dual_phase()
{
    struct Candidate {
        double ratio;
        int k;
        double alpha;
    };
    std::vector<Candidate> cands;
    std::vector<int> flips;

    for (;;) {
        if (iterations_ >= opt_.max_iterations) return LpStatus::iteration_limit;
        if (since_reinvert_ >= kReinvertEvery) {
            if (!reinvert() && !recover()) return LpStatus::numerical_failure;
        } else if (since_reinvert_ > 0 && since_reinvert_ % kResidualCheckEvery == 0) {
            recompute_basic_values();
            if (primal_residual() > 1e-9) {
                if (!reinvert() && !recover()) return LpStatus::numerical_failure;
            }
        }

        int r = -1;
        double best = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double inf = infeasibility(i);
            if (inf <= 0.0) continue;
            const double score = inf * inf / weight_[i];
            if (score > best) {
                best = score;
                r = i;
            }
        }
        if (r < 0) return LpStatus::optimal;

        const int lv = head_[r];
        const double xv = x_[lv];
        const bool to_lower = xv < var_lower(lv);
        const double target = to_lower ? var_lower(lv) : var_upper(lv);
        const double dir = to_lower ? 1.0 : -1.0;
        double slope = std::abs(target - xv);

        const auto& row = tab_[r];
        cands.clear();
        for (int k = 0; k < n_; ++k) {
            if (row[k] == 0.0) continue;
            const int v = nonbasic_[k];
            const Status st = status_[v];
            if (st == Status::fixed) continue;
            const double a = -row[k] * dir;
            double dk;
            if (st == Status::at_lower && a > opt_.pivot_tol) dk = std::max(d_[k], 0.0);
            else if (st == Status::at_upper && a < -opt_.pivot_tol) dk = std::max(-d_[k], 0.0);
            else if (st == Status::free_zero && std::abs(a) > opt_.pivot_tol) dk = std::abs(d_[k]);
            else continue;
            cands.push_back({dk / std::abs(a), k, std::abs(a)});
        }
        if (cands.empty()) {
            make_farkas(r);
            return LpStatus::infeasible;
        }
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            return a.ratio != b.ratio ? a.ratio < b.ratio : a.k < b.k;
        });

        flips.clear();
        std::size_t idx = 0;
        int q = -1;
        while (idx < cands.size()) {
            double bound = kInf;
            for (std::size_t j = idx; j < cands.size() && cands[j].ratio <= bound; ++j)
                bound = std::min(bound, cands[j].ratio + opt_.dual_tol / cands[j].alpha);
            std::size_t end = idx;
            double range_sum = 0.0;
            while (end < cands.size() && cands[end].ratio <= bound) {
                const int v = nonbasic_[cands[end].k];
                range_sum += cands[end].alpha * (var_upper(v) - var_lower(v));
                ++end;
            }
            if (std::isfinite(range_sum) && slope - range_sum > opt_.primal_tol && end < cands.size()) {
                for (std::size_t j = idx; j < end; ++j) flips.push_back(cands[j].k);
                slope -= range_sum;
                idx = end;
                continue;
            }
            if (std::isfinite(range_sum) && slope - range_sum > opt_.primal_tol && end == cands.size()) {
                // every breakpoint passed and the row still cannot reach its bound
                make_farkas(r);
                return LpStatus::infeasible;
            }
            double amax = -1.0;
            for (std::size_t j = idx; j < end; ++j) {
                if (cands[j].alpha > amax) {
                    amax = cands[j].alpha;
                    q = cands[j].k;
                }
            }
            break;
        }
        if (q < 0) {
            make_farkas(r);
            return LpStatus::infeasible;
        }

        ++iterations_;
        ++since_reinvert_;
        for (int k : flips) {
            const int v = nonbasic_[k];
            double delta;
            if (status_[v] == Status::at_lower) {
                delta = var_upper(v) - x_[v];
                x_[v] = var_upper(v);
                status_[v] = Status::at_upper;
            } else {
                delta = var_lower(v) - x_[v];
                x_[v] = var_lower(v);
                status_[v] = Status::at_lower;
            }
            for (int i = 0; i < m_; ++i)
                if (const double t = tab_[i][k]; t != 0.0) x_[head_[i]] -= t * delta;
        }

        const int entering = nonbasic_[q];
        const double alpha_q = -tab_[r][q];
        const double step = (target - x_[lv]) / alpha_q;
        x_[entering] += step;
        for (int i = 0; i < m_; ++i)
            if (const double t = tab_[i][q]; t != 0.0) x_[head_[i]] -= t * step;
        x_[lv] = target;
        pivot(r, q);
        if (var_lower(lv) == var_upper(lv)) status_[lv] = Status::fixed;
        else status_[lv] = to_lower ? Status::at_lower : Status::at_upper;
    }
}

LpStatus DualSimplex::solve()
{
    farkas_.clear();
    recoveries_ = 0;
    if (!crashed_) crash_free_columns();
    perturb_costs();
    for (int attempt = 0; attempt < 3; ++attempt) {
        LpStatus status = dual_phase();
        if (status == LpStatus::infeasible) {
            // Confirm on a fresh factorisation before reporting.
            if (since_reinvert_ > 0 && attempt == 0) {
                if (!reinvert() && !recover()) return LpStatus::numerical_failure;
                continue;
            }
            remove_perturbation();
            return status;
        }
        if (status != LpStatus::optimal) {
            remove_perturbation();
            return status;
        }
        remove_perturbation();
        if (!primal_cleanup()) return iterations_ >= opt_.max_iterations ? LpStatus::iteration_limit
                                                                         : LpStatus::numerical_failure;
        recompute_basic_values();
        if (primal_residual() > 1e-8) {
            if (!reinvert() && !recover()) return LpStatus::numerical_failure;
            perturb_costs();
            continue;
        }
        bool feasible = true;
        for (int i = 0; i < m_ && feasible; ++i) feasible = infeasibility(i) <= 10.0 * opt_.primal_tol;
        if (!feasible) {
            perturb_costs();
            continue;
        }
        for (int j = 0; j < n_; ++j) {
            if ((!std::isfinite(lo_[j]) && x_[j] <= work_lo_[j]) || (!std::isfinite(up_[j]) && x_[j] >= work_up_[j]))
                return LpStatus::numerical_failure;
        }
        return LpStatus::optimal;
    }
    return LpStatus::numerical_failure;
}

std::vector<double> DualSimplex::primal() const
{
    return std::vector<double>(x_.begin(), x_.begin() + n_);
}

double DualSimplex::objective() const
{
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) acc += true_cost_[j] * x_[j];
    return acc;
}

std::vector<double> DualSimplex::reduced_costs() const
{
    std::vector<double> out(n_, 0.0);
    for (int j = 0; j < n_; ++j)
        if (status_[j] != Status::basic) out[j] = d_[where_[j]];
    return out;
}

std::vector<DualSimplex::Cut> DualSimplex::gomory_cuts(std::span<const char> integer_column, int max_cuts) const
{
    std::vector<Cut> out;
    if (static_cast<int>(integer_column.size()) != n_ || max_cuts <= 0) return out;
    auto integral = [](double v) { return std::abs(v - std::round(v)) < 1e-9; };
    std::vector<char> int_row(m_, 1);
    for (int i = 0; i < m_; ++i)
        for (const Term& t : rows_[i].terms)
            if (!integer_column[t.var] || !integral(t.coef)) {
                int_row[i] = 0;
                break;
            }
    auto is_int = [&](int v) { return v < n_ ? integer_column[v] != 0 : int_row[v - n_] != 0; };

    std::vector<std::pair<double, int>> cand;
    for (int r = 0; r < m_; ++r) {
        const int v = head_[r];
        if (v >= n_ || !integer_column[v]) continue;
        const double f0 = x_[v] - std::floor(x_[v]);
        if (f0 < 0.005 || f0 > 0.995) continue;
        cand.push_back({-std::min(f0, 1.0 - f0), r});
    }
    std::sort(cand.begin(), cand.end());

    std::vector<double> coef(n_);
    for (const auto& [score, r] : cand) {
        if (static_cast<int>(out.size()) >= max_cuts) break;
        const double f0 = x_[head_[r]] - std::floor(x_[head_[r]]);
        std::fill(coef.begin(), coef.end(), 0.0);
        double rhs = 1.0;
        bool ok = true;
        for (int k = 0; k < n_ && ok; ++k) {
            const double t = tab_[r][k];
            if (std::abs(t) < 1e-11) continue;
            const int v = nonbasic_[k];
            const Status st = status_[v];
            if (st == Status::fixed) continue;
            if (st == Status::free_zero) {
                ok = false;
                break;
            }
            const double lo = v < n_ ? lo_[v] : row_lo_[v - n_];
            const double up = v < n_ ? up_[v] : row_up_[v - n_];
            const double sigma = st == Status::at_lower ? 1.0 : -1.0;
            const double b = sigma > 0 ? lo : up;
            if (!std::isfinite(b)) {
                ok = false;
                break;
            }
            const double a = sigma * t;
            double g;
            if (is_int(v) && integral(b)) {
                const double f = a - std::floor(a);
                g = f <= f0 ? f / f0 : (1.0 - f) / (1.0 - f0);
            } else {
                g = a >= 0 ? a / f0 : -a / (1.0 - f0);
            }
            if (g == 0.0) continue;
            // g * x' with x' = sigma * (v - b)
            rhs += g * sigma * b;
            if (v < n_) coef[v] += g * sigma;
            else
                for (const Term& term : rows_[v - n_].terms) coef[term.var] += g * sigma * term.coef;
        }
        if (!ok) continue;
        double big = 0.0;
        for (double c : coef) big = std::max(big, std::abs(c));
        if (big <= 0.0) continue;
        Cut cut;
        double small = kInf;
        for (int j = 0; j < n_ && ok; ++j) {
            const double c = coef[j];
            if (c == 0.0) continue;
            if (std::abs(c) < 1e-9 * big) {
                // drop the term, relaxing the right-hand side by its largest value
                const double hi = std::max(c * lo_[j], c * up_[j]);
                if (!std::isfinite(hi)) ok = false;
                rhs -= hi;
                continue;
            }
            small = std::min(small, std::abs(c));
            cut.terms.push_back({j, c});
        }
        if (!ok || cut.terms.empty() || big / small > 1e6) continue;
        double lhs = 0.0;
        for (const Term& t : cut.terms) lhs += t.coef * x_[t.var];
        if (lhs > rhs - 1e-6 * (1.0 + std::abs(rhs))) continue;
        // Scale so the largest coefficient is one.
        for (Term& t : cut.terms) t.coef /= big;
        cut.rhs = rhs / big;
        out.push_back(std::move(cut));
    }
    return out;
}

double DualSimplex::dual_bound() const
{
    double acc = 0.0;
    for (int k = 0; k < n_; ++k) {
        const int v = nonbasic_[k];
        const double d = d_[k];
        if (d == 0.0) continue;
        const double bound = d > 0.0 ? var_lower(v) : var_upper(v);
        if (!std::isfinite(bound)) return -kInf;
        acc += d * bound;
    }
    return acc;
}

}  // namespace lvdsm::mip

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lvdsm/mip/problem.hpp"

namespace lvdsm::mip {

enum class LpStatus { optimal, infeasible, iteration_limit, numerical_failure };

const char* to_string(LpStatus status);

struct SimplexOptions {
    double primal_tol = 1e-9;
    double dual_tol = 1e-9;
    double pivot_tol = 1e-7;
    long max_iterations = 1'000'000;
    // Nonbasic costs are shifted by up to this amount while iterating to break
    // dual degeneracy; the shifts are removed before a solve returns.
    double cost_perturbation = 1e-7;
    // Bound used in place of an infinite bound on free structural columns that
    // cannot be pivoted into the basis up front.
    double artificial_bound = 1e7;
};

// Bounded dual simplex on a condensed dense tableau T = B^-1 N. Unbounded
// problems surface as numerical_failure once a column hits its artificial box.
//
// Rows are stored as A x - w = 0 with one logical column w per row carrying
// the row bounds, so every constraint is a variable bound. The basis is kept
// across calls to solve(): bound changes and appended rows preserve dual
// feasibility, which makes re-solves after branching or cut separation cheap.
class DualSimplex {
public:
    DualSimplex(std::span<const Variable> columns, std::span<const double> cost,
                SimplexOptions options = {});

    int column_count() const { return n_; }
    int row_count() const { return m_; }

    // Structural column bounds; integrality is ignored here.
    void set_bounds(int column, double lower, double upper);
    double lower(int column) const { return lo_[column]; }
    double upper(int column) const { return up_[column]; }

    // Appends lower <= terms . x <= upper; returns its row index.
    int add_row(std::span<const Term> terms, double lower, double upper);

    LpStatus solve();

    // Deletes the listed rows whose logical column is basic, so the remaining
    // basis stays valid; other listed rows are kept. Later rows shift down.
    // Returns the number removed.
    int remove_basic_rows(std::span<const int> rows);
    bool row_is_basic(int row) const { return status_[n_ + row] == Status::basic; }

    // Structural values of the last solve.
    std::vector<double> primal() const;
    double objective() const;
    // Lagrangian lower bound from the current reduced costs; equals objective()
    // at an optimal basis and stays valid for any basis.
    double dual_bound() const;
    // Row multipliers y (per row) proving infeasibility after an infeasible
    // solve: no x within the column bounds satisfies every row bound once the
    // rows are combined with y. Empty otherwise.
    const std::vector<double>& farkas() const { return farkas_; }
    // Reduced cost per structural column (zero when basic).
    std::vector<double> reduced_costs() const;

    // Gomory mixed-integer cuts read off the rows of the current optimal
    // tableau whose basic column is integer and fractional. Each cut is
    // sum(terms) >= rhs over structural columns and is valid for every point
    // within the current bounds, so cuts taken at the root are global.
    struct Cut {
        std::vector<Term> terms;
        double rhs = 0.0;
    };
    std::vector<Cut> gomory_cuts(std::span<const char> integer_column, int max_cuts) const;

    long iterations() const { return iterations_; }
    long reinversions() const { return reinversions_; }

private:
    enum class Status : std::uint8_t { basic, at_lower, at_upper, fixed, free_zero };

    struct RowData {
        std::vector<Term> terms;
    };

    int var_count() const { return n_ + m_; }
    double var_lower(int v) const { return v < n_ ? work_lo_[v] : row_lo_[v - n_]; }
    double var_upper(int v) const { return v < n_ ? work_up_[v] : row_up_[v - n_]; }
    double cost_of(int v) const { return v < n_ ? cost_[v] : 0.0; }

    void place_nonbasic(int v, int k, double d);
    void pivot(int r, int q);
    void recompute_basic_values();
    void recompute_reduced_costs();
    bool reinvert();
    double primal_residual() const;
    void crash_free_columns();
    // Drops the current basis for the all-logical one; every structural goes
    // to the bound its cost prefers, so the start is dual feasible.
    void slack_basis();
    bool recover();
    void perturb_costs();
    void remove_perturbation();
    bool primal_cleanup();
    LpStatus dual_phase();
    void make_farkas(int r);
    double infeasibility(int r) const;

    SimplexOptions opt_;
    int n_ = 0;
    int m_ = 0;
    std::vector<double> lo_, up_;            // user bounds on structurals
    std::vector<double> work_lo_, work_up_;  // with artificial boxes
    std::vector<double> true_cost_;
    std::vector<double> cost_;  // possibly shifted
    std::vector<double> row_lo_, row_up_;
    std::vector<RowData> rows_;
    std::vector<std::vector<Term>> cols_;  // structural columns

    std::vector<std::vector<double>> tab_;  // m rows of n entries
    std::vector<double> weight_;            // 1 + |T_r|^2
    std::vector<int> head_;                 // basic variable of each row
    std::vector<int> nonbasic_;             // variable at each nonbasic position
    std::vector<int> where_;                // row (basic) or position (nonbasic) per variable
    std::vector<Status> status_;            // per variable
    std::vector<double> x_;                 // value per variable
    std::vector<double> d_;                 // reduced cost per nonbasic position
    std::vector<double> farkas_;
    std::vector<int> nz_;                   // scratch

    bool perturbed_ = false;
    bool crashed_ = false;
    long iterations_ = 0;
    long since_reinvert_ = 0;
    long reinversions_ = 0;
    int recoveries_ = 0;
    std::uint64_t rng_state_ = 0x9E3779B97F4A7C15ull;
};

}  // namespace lvdsm::mip

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lvdsm/mip/problem.hpp"
#include "lvdsm/mip/simplex.hpp"

namespace lvdsm::mip {

enum class MipStatus { optimal, infeasible, timeout, numerical_failure };

const char* to_string(MipStatus status);

struct MipOptions {
    double int_tol = 1e-6;
    double gap_tol = 0.0;        // absolute
    double time_limit_s = 60.0;  // <= 0 disables the limit
    long node_limit = -1;
    bool presolve = true;
    bool cuts = true;
    bool decompose = true;
};

struct MipResult {
    MipStatus status = MipStatus::infeasible;
    std::vector<double> x;  // empty when no incumbent exists
    double objective = kInf;
    double bound = -kInf;
    long nodes = 0;
    long lp_iterations = 0;
    long lazy_rows_added = 0;
    long cuts_added = 0;
    bool has_incumbent() const { return !x.empty(); }
};

MipResult solve_mip(const Problem& problem, const MipOptions& options = {});

struct LpResult {
    LpStatus status = LpStatus::numerical_failure;
    std::vector<double> x;
    double objective = kInf;
    // Row multipliers over problem.constraints certifying infeasibility.
    std::vector<double> farkas;
};

// LP relaxation with every row (lazy included) and integrality dropped;
// fixings override column bounds.
LpResult solve_lp_relaxation(const Problem& problem, std::span<const std::pair<int, double>> fixings = {});

// True when the multipliers prove that no point within the column bounds
// satisfies all rows of the problem.
bool farkas_certifies(const Problem& problem, std::span<const double> y,
                      std::span<const std::pair<int, double>> fixings = {});

}  // namespace lvdsm::mip

#pragma once

#include <span>
#include <vector>

#include "lvdsm/mip/problem.hpp"

namespace lvdsm::mip {

// Removes fixed columns, turns singleton rows into bounds, drops rows that
// cannot bind and tightens integer bounds by activity propagation.
struct Presolved {
    bool infeasible = false;
    Problem reduced;
    std::vector<int> column_map;       // original column -> reduced column, -1 if removed
    std::vector<double> fixed_value;   // value of removed columns

    std::vector<double> expand(std::span<const double> reduced_x) const;
};

Presolved presolve(const Problem& problem);

// Independent blocks of a problem: columns linked through shared rows.
struct Component {
    Problem problem;
    std::vector<int> columns;  // indices into the parent problem
};

std::vector<Component> split_components(const Problem& problem);

}  // namespace lvdsm::mip

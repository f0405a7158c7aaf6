#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace lvdsm::mip {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    bool integer = false;
    // Fractional variables of the highest priority class are branched on first.
    int branch_priority = 0;
};

struct Term {
    int var = -1;
    double coef = 0.0;
};

// lower <= sum(coef * x) <= upper. Lazy rows are kept out of the LP until a
// relaxation solution violates them.
struct Constraint {
    std::string name;
    std::vector<Term> terms;
    double lower = -kInf;
    double upper = kInf;
    bool lazy = false;
};

// Minimisation problem.
struct Problem {
    std::vector<Variable> variables;
    std::vector<Constraint> constraints;
    std::vector<double> objective;  // one coefficient per variable
    double objective_offset = 0.0;

    int add_variable(Variable v, double cost = 0.0);
    int add_constraint(Constraint c);

    int variable_count() const { return static_cast<int>(variables.size()); }
    int constraint_count() const { return static_cast<int>(constraints.size()); }
    int integer_count() const;

    double objective_value(std::span<const double> x) const;
    // Largest violation of any constraint (lazy included) or variable bound.
    double max_violation(std::span<const double> x) const;
    // Largest distance of an integer variable from the nearest integer.
    double max_fractionality(std::span<const double> x) const;
    // True when every objective coefficient is integral and sits on an integer
    // variable, so every feasible objective value is an integer.
    bool integral_objective() const;
};

double activity(const Constraint& c, std::span<const double> x);

}  // namespace lvdsm::mip

#include "lvdsm/mip/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lvdsm::mip {

int Problem::add_variable(Variable v, double cost)
{
    if (v.integer) {
        v.lower = std::ceil(v.lower);
        v.upper = std::floor(v.upper);
    }
    variables.push_back(std::move(v));
    objective.push_back(cost);
    return static_cast<int>(variables.size()) - 1;
}

int Problem::add_constraint(Constraint c)
{
    for (const Term& t : c.terms)
        if (t.var < 0 || t.var >= variable_count())
            throw std::invalid_argument("constraint " + c.name + " references an unregistered variable");
    constraints.push_back(std::move(c));
    return static_cast<int>(constraints.size()) - 1;
}

int Problem::integer_count() const
{
    return static_cast<int>(std::count_if(variables.begin(), variables.end(), [](const Variable& v) { return v.integer; }));
}

double Problem::objective_value(std::span<const double> x) const
{
    double acc = objective_offset;
    for (std::size_t j = 0; j < variables.size(); ++j) acc += objective[j] * x[j];
    return acc;
}

double activity(const Constraint& c, std::span<const double> x)
{
    double acc = 0.0;
    for (const Term& t : c.terms) acc += t.coef * x[t.var];
    return acc;
}

double Problem::max_violation(std::span<const double> x) const
{
    double worst = 0.0;
    for (std::size_t j = 0; j < variables.size(); ++j)
        worst = std::max({worst, variables[j].lower - x[j], x[j] - variables[j].upper});
    for (const Constraint& c : constraints) {
        const double a = activity(c, x);
        worst = std::max({worst, c.lower - a, a - c.upper});
    }
    return worst;
}

double Problem::max_fractionality(std::span<const double> x) const
{
    double worst = 0.0;
    for (std::size_t j = 0; j < variables.size(); ++j)
        if (variables[j].integer) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
    return worst;
}

bool Problem::integral_objective() const
{
    if (objective_offset != std::round(objective_offset)) return false;
    for (std::size_t j = 0; j < variables.size(); ++j) {
        if (objective[j] == 0.0) continue;
        if (!variables[j].integer || objective[j] != std::round(objective[j])) return false;
    }
    return true;
}

}  // namespace lvdsm::mip

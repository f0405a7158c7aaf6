#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "lvdsm/feeder.hpp"
#include "lvdsm/injections.hpp"

namespace lvdsm {

/// Phase-rotation matrix used to approximate the off-diagonal entries of the
/// branch power matrix under nearly balanced voltages:
/// rows [1, a^2, a; a, 1, a^2; a^2, a, 1] with a = exp(-i 2pi/3).
Matrix3c gamma_matrix();

/// Full branch power matrix reconstructed from its diagonal:
/// element (p, q) = gamma(p, q) * lambda(q).
Matrix3c offdiag_flow(const Vector3c& lambda);

/// Per-phase voltage drop (in squared-magnitude units) caused by a diagonal
/// branch flow `lambda` through impedance `z`: 2 Re(row_p(gamma diagm(lambda)) . conj(row_p(z))).
std::array<double, 3> lifted_drop(const Matrix3c& z, const Vector3c& lambda);

// Limit values used by the optimisation, dimensioned by horizon.
struct Limits {
    int horizon = 0;
    std::vector<double> vmin_pu;     // per bus
    std::vector<double> vmax_pu;     // per bus
    std::vector<double> s_rated_pu;  // per branch

    static Limits from_feeder(const Feeder& feeder, int horizon);
};

// Bound tightening applied inside the linear model.
struct Tightening {
    double dv_low = 0.0;   // raises the voltage floor, p.u.
    double dv_high = 0.0;  // lowers the voltage ceiling, p.u.
    double ds = 0.0;       // thermal fraction, ratings scaled by (1 - ds)

    // Throws std::invalid_argument for negative values or ds >= 1.
    void validate() const;
    bool operator==(const Tightening&) const = default;
};

struct PolygonRow {
    double cos_theta = 0.0;
    double sin_theta = 0.0;
    double rhs = 0.0;
};

// Regular K-gon inscribed in the circle of radius s_rated * (1 - ds); vertices
// sit at angles 2 pi k / K, so the edge normals are offset by pi / K.
std::vector<PolygonRow> thermal_polygon(double s_rated, double ds, int sides);

struct LinPfSolution {
    int buses = 0;
    int branches = 0;
    int horizon = 0;
    std::vector<double> u;         // [bus][phase][t], squared magnitude
    std::vector<Complex> lambda;   // [branch][phase][t]

    double& u_at(int bus, int phase, int t) { return u[(static_cast<std::size_t>(bus) * 3 + phase) * horizon + t]; }
    double u_at(int bus, int phase, int t) const { return u[(static_cast<std::size_t>(bus) * 3 + phase) * horizon + t]; }
    Complex& lambda_at(int br, int phase, int t) { return lambda[(static_cast<std::size_t>(br) * 3 + phase) * horizon + t]; }
    Complex lambda_at(int br, int phase, int t) const
    {
        return lambda[(static_cast<std::size_t>(br) * 3 + phase) * horizon + t];
    }
};

/// Solves the lossless balance and lifted Ohm's law for fixed demand by a
/// backward accumulation of branch flows followed by a forward voltage pass
/// from the source (u = 1).
LinPfSolution evaluate_lin_pf(const RadialNetwork& net, const Injections& demand);

// Change of squared voltage at every bus when `bus` draws an extra `load_delta`
// (p.u., per phase) in the linear model; indexed [bus][phase].
std::vector<std::array<double, 3>> voltage_response(const RadialNetwork& net, int bus, const Vector3c& load_delta);

struct LinearTerm {
    int var = -1;
    double coef = 0.0;
};

struct LinearRow {
    std::string label;
    std::vector<LinearTerm> terms;
    double lower = 0.0;
    double upper = 0.0;
};

// Rows over a named variable set. Variables are registered on first use.
class LinearConstraintBlock {
public:
    int variable(const std::string& name);
    int find(const std::string& name) const;
    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<LinearRow>& rows() const { return rows_; }

    void add_row(LinearRow row) { rows_.push_back(std::move(row)); }
    void append(const LinearConstraintBlock& other);

    // Largest bound violation over all rows for the given assignment; variables
    // absent from the map count as zero.
    double max_violation(const std::unordered_map<std::string, double>& values) const;

    // "label  variable  coefficient" per nonzero, then "label  [lower, upper]".
    std::string dump() const;

private:
    std::vector<std::string> variables_;
    std::unordered_map<std::string, int> index_;
    std::vector<LinearRow> rows_;
};

namespace names {
std::string sanitize(const std::string& id);
std::string u(const Feeder& f, int bus, int phase, int t);
std::string lre(const RadialNetwork& net, int branch, int phase, int t);
std::string lim(const RadialNetwork& net, int branch, int phase, int t);
std::string p(const Feeder& f, int user, int phase, int t);
std::string q(const Feeder& f, int user, int phase, int t);
std::string s(const std::string& user, int t);
std::string y(const std::string& user, int t);
std::string z(const std::string& user, int t);
}  // namespace names

// Lossless power balance: two real rows per (non-source bus, phase, time).
LinearConstraintBlock build_balance(const RadialNetwork& net, int horizon);
// Diagonal real part of the lifted Ohm's law: one row per (branch, phase, time).
LinearConstraintBlock build_ohm(const RadialNetwork& net, int horizon);
// Voltage bands on u and K-gon thermal rows per (branch, phase, time).
LinearConstraintBlock build_limits(const RadialNetwork& net, const Limits& limits, const Tightening& tightening,
                                   int polygon_sides = 8);

// Largest signed excess of a linear solution over the voltage bands and
// thermal polygons of build_limits; negative when every row holds strictly.
double lin_limit_violation(const RadialNetwork& net, const LinPfSolution& sol, const Limits& limits,
                           const Tightening& tightening, int polygon_sides = 8);

// Variable assignment matching the block names, for self-consistency checks.
std::unordered_map<std::string, double> lin_pf_assignment(const RadialNetwork& net, const Injections& demand,
                                                          const LinPfSolution& sol);

}  // namespace lvdsm

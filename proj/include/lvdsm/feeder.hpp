#pragma once

#include <complex>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "lvdsm/phase.hpp"

namespace lvdsm {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

struct Bus {
    std::string id;
    PhaseSet phases = PhaseSet::all();
    double vmin_pu = 0.9;
    double vmax_pu = 1.1;
    bool is_source = false;
};

// Impedance is stored as a full 3x3 matrix indexed by network phase; rows and
// columns of phases absent from the branch are zero.
struct Branch {
    std::string from;
    std::string to;
    PhaseSet phases = PhaseSet::all();
    Matrix3c z_pu = Matrix3c::Zero();
    double s_rated_pu = 0.0;  // per phase
};

struct UserAttachment {
    std::string user_id;
    std::string bus_id;
    PhaseSet phases;
};

struct Feeder {
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<UserAttachment> users;
    double base_voltage_v = 230.0;  // line-to-neutral
    double base_power_va = 10000.0;  // per phase

    double base_impedance_ohm() const { return base_voltage_v * base_voltage_v / base_power_va; }
    double kw_to_pu(double kw) const { return kw * 1000.0 / base_power_va; }
    double pu_to_kw(double pu) const { return pu * base_power_va / 1000.0; }
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
    bool mentions(std::string_view needle) const;
};

ValidationReport validate_feeder(const Feeder& feeder);

struct OrderedBus {
    int bus = -1;
    int parent_branch = -1;  // -1 for the source bus
};

// Breadth-first order from the source, children visited by ascending id.
// Throws std::invalid_argument("non-radial ...") when the branch graph is not a
// tree spanning every bus from the source.
std::vector<OrderedBus> radial_ordering(const Feeder& feeder);

// Branch data in physical units, as found in feeder files.
struct PhysicalBranch {
    std::string from;
    std::string to;
    PhaseSet phases = PhaseSet::all();
    Eigen::Matrix3d r_ohm = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d x_ohm = Eigen::Matrix3d::Zero();
    double s_rated_kva = 0.0;
};

Branch per_unit_convert(const PhysicalBranch& branch, double base_voltage_v, double base_power_va);
PhysicalBranch to_physical(const Branch& branch, double base_voltage_v, double base_power_va);

// Index-based view of a validated feeder shared by the power-flow routines.
class RadialNetwork {
public:
    explicit RadialNetwork(Feeder feeder);

    const Feeder& feeder() const { return feeder_; }
    int bus_count() const { return static_cast<int>(feeder_.buses.size()); }
    int branch_count() const { return static_cast<int>(feeder_.branches.size()); }
    int user_count() const { return static_cast<int>(feeder_.users.size()); }

    int source() const { return source_; }
    const std::vector<OrderedBus>& order() const { return order_; }
    int parent_branch(int bus) const { return parent_branch_[bus]; }
    int parent_bus(int bus) const;
    int branch_from(int branch) const { return branch_from_[branch]; }
    int branch_to(int branch) const { return branch_to_[branch]; }
    const std::vector<int>& child_branches(int bus) const { return children_[bus]; }
    int user_bus(int user) const { return user_bus_[user]; }
    // -1 when no user is attached.
    int bus_user(int bus) const { return bus_user_[bus]; }
    int bus_index(const std::string& id) const;
    int user_index(const std::string& id) const;
    // Branches from the source down to `bus`, root first.
    std::vector<int> path_to(int bus) const;

private:
    Feeder feeder_;
    int source_ = -1;
    std::vector<OrderedBus> order_;
    std::vector<int> parent_branch_;
    std::vector<int> branch_from_;
    std::vector<int> branch_to_;
    std::vector<std::vector<int>> children_;
    std::vector<int> user_bus_;
    std::vector<int> bus_user_;
    std::unordered_map<std::string, int> bus_lookup_;
    std::unordered_map<std::string, int> user_lookup_;
};

// Source phasors: 1.0 p.u. with a at 0, b at -120 and c at +120 degrees.
Vector3c source_voltage();

}  // namespace lvdsm

#include "lvdsm/feeder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <utility>
#include <stdexcept>

namespace lvdsm {

namespace {

constexpr double kSymmetryTol = 1e-12;

struct Adjacency {
    // (neighbour bus, branch) per bus, sorted by neighbour id
    std::vector<std::vector<std::pair<int, int>>> edges;
};

// Returns false when the branch graph is not a spanning tree rooted at `source`.
bool bfs_tree(const Feeder& feeder, const std::map<std::string, int>& index, int source,
              std::vector<OrderedBus>& order)
{
    const int n = static_cast<int>(feeder.buses.size());
    if (static_cast<int>(feeder.branches.size()) != n - 1) return false;

    Adjacency adj;
    adj.edges.resize(n);
    for (int k = 0; k < static_cast<int>(feeder.branches.size()); ++k) {
        const auto& br = feeder.branches[k];
        auto fi = index.find(br.from);
        auto ti = index.find(br.to);
        if (fi == index.end() || ti == index.end() || fi->second == ti->second) return false;
        adj.edges[fi->second].emplace_back(ti->second, k);
        adj.edges[ti->second].emplace_back(fi->second, k);
    }
    for (auto& list : adj.edges) {
        std::sort(list.begin(), list.end(), [&](const auto& lhs, const auto& rhs) {
            const auto& a = feeder.buses[lhs.first].id;
            const auto& b = feeder.buses[rhs.first].id;
            return a != b ? a < b : lhs.second < rhs.second;
        });
    }

    order.clear();
    std::vector<int> parent(n, -2);
    std::queue<int> queue;
    queue.push(source);
    parent[source] = -1;
    order.push_back({source, -1});
    while (!queue.empty()) {
        int bus = queue.front();
        queue.pop();
        for (auto [next, branch] : adj.edges[bus]) {
            if (branch == parent[bus]) continue;
            if (parent[next] != -2) return false;  // cycle
            parent[next] = branch;
            order.push_back({next, branch});
            queue.push(next);
        }
    }
    return static_cast<int>(order.size()) == n;
}

}  // namespace

bool ValidationReport::mentions(std::string_view needle) const
{
    return std::any_of(issues.begin(), issues.end(),
                       [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

ValidationReport validate_feeder(const Feeder& feeder)
{
    ValidationReport report;
    auto issue = [&](std::string text) { report.issues.push_back(std::move(text)); };

    if (!(feeder.base_voltage_v > 0.0) || !(feeder.base_power_va > 0.0))
        issue("non-positive base quantities");

    std::map<std::string, int> index;
    int sources = 0;
    int source = -1;
    for (int i = 0; i < static_cast<int>(feeder.buses.size()); ++i) {
        const Bus& bus = feeder.buses[i];
        if (!index.emplace(bus.id, i).second) issue("duplicate bus id '" + bus.id + "'");
        if (bus.phases.empty()) issue("bus '" + bus.id + "' has no phases");
        if (!(bus.vmin_pu > 0.0 && bus.vmin_pu < bus.vmax_pu))
            issue("bus '" + bus.id + "' voltage band invalid");
        if (bus.is_source) {
            ++sources;
            source = i;
        }
    }
    if (sources != 1) issue("expected exactly one source bus, found " + std::to_string(sources));

    for (const Branch& br : feeder.branches) {
        const std::string name = br.from + "->" + br.to;
        auto fi = index.find(br.from);
        auto ti = index.find(br.to);
        if (fi == index.end() || ti == index.end()) {
            issue("branch " + name + " references an unknown bus");
            continue;
        }
        if (br.phases.empty()) issue("branch " + name + " has no phases");
        if (!br.phases.subset_of(feeder.buses[fi->second].phases) ||
            !br.phases.subset_of(feeder.buses[ti->second].phases))
            issue("phase mismatch on branch " + name);
        if (!(br.s_rated_pu > 0.0)) issue("branch " + name + " rating must be positive");
        for (int p = 0; p < kPhaseCount; ++p) {
            for (int q = 0; q < kPhaseCount; ++q) {
                const bool present = br.phases.contains(static_cast<Phase>(p)) &&
                                     br.phases.contains(static_cast<Phase>(q));
                if (!present && std::abs(br.z_pu(p, q)) != 0.0)
                    issue("branch " + name + " has impedance on an absent phase");
                if (std::abs(br.z_pu(p, q) - br.z_pu(q, p)) > kSymmetryTol * (1.0 + std::abs(br.z_pu(p, q))))
                    issue("impedance asymmetry on branch " + name);
            }
            if (br.phases.contains(static_cast<Phase>(p)) && !(br.z_pu(p, p).real() > 0.0))
                issue("non-positive resistance on branch " + name);
        }
    }

    if (source >= 0 && sources == 1) {
        std::vector<OrderedBus> order;
        if (!bfs_tree(feeder, index, source, order)) {
            issue("non-radial branch graph");
        } else {
            for (std::size_t k = 1; k < order.size(); ++k) {
                const Bus& bus = feeder.buses[order[k].bus];
                if (!bus.phases.subset_of(feeder.branches[order[k].parent_branch].phases))
                    issue("phase mismatch: bus '" + bus.id + "' has phases not carried by its supply branch");
            }
        }
    }

    std::set<std::string> user_ids;
    std::map<std::string, std::string> hosted;
    for (const UserAttachment& user : feeder.users) {
        if (!user_ids.insert(user.user_id).second) issue("duplicate user id '" + user.user_id + "'");
        auto bi = index.find(user.bus_id);
        if (bi == index.end()) {
            issue("user '" + user.user_id + "' attached to unknown bus '" + user.bus_id + "'");
            continue;
        }
        if (auto [it, fresh] = hosted.emplace(user.bus_id, user.user_id); !fresh)
            issue("injective mapping violated: bus '" + user.bus_id + "' hosts '" + it->second + "' and '" +
                  user.user_id + "'");
        if (feeder.buses[bi->second].is_source) issue("user '" + user.user_id + "' attached to the source bus");
        if (user.phases.empty() || !user.phases.subset_of(feeder.buses[bi->second].phases))
            issue("phase mismatch for user '" + user.user_id + "'");
    }
    return report;
}

std::vector<OrderedBus> radial_ordering(const Feeder& feeder)
{
    std::map<std::string, int> index;
    int source = -1;
    for (int i = 0; i < static_cast<int>(feeder.buses.size()); ++i) {
        if (!index.emplace(feeder.buses[i].id, i).second)
            throw std::invalid_argument("non-radial: duplicate bus id " + feeder.buses[i].id);
        if (feeder.buses[i].is_source) {
            if (source >= 0) throw std::invalid_argument("non-radial: multiple source buses");
            source = i;
        }
    }
    if (source < 0) throw std::invalid_argument("non-radial: no source bus");
    std::vector<OrderedBus> order;
    if (!bfs_tree(feeder, index, source, order)) throw std::invalid_argument("non-radial branch graph");
    return order;
}

Branch per_unit_convert(const PhysicalBranch& branch, double base_voltage_v, double base_power_va)
{
    if (!(base_voltage_v > 0.0) || !(base_power_va > 0.0))
        throw std::invalid_argument("per-unit bases must be positive");
    const double z_base = base_voltage_v * base_voltage_v / base_power_va;
    Branch out;
    out.from = branch.from;
    out.to = branch.to;
    out.phases = branch.phases;
    for (int p = 0; p < kPhaseCount; ++p) {
        for (int q = 0; q < kPhaseCount; ++q) {
            const bool present = branch.phases.contains(static_cast<Phase>(p)) &&
                                 branch.phases.contains(static_cast<Phase>(q));
            out.z_pu(p, q) = present ? Complex(branch.r_ohm(p, q), branch.x_ohm(p, q)) / z_base : Complex{};
        }
        if (branch.phases.contains(static_cast<Phase>(p)) && !(branch.r_ohm(p, p) > 0.0))
            throw std::invalid_argument("branch " + branch.from + "->" + branch.to +
                                        ": resistance must be positive");
    }
    out.s_rated_pu = branch.s_rated_kva * 1000.0 / base_power_va;
    return out;
}

PhysicalBranch to_physical(const Branch& branch, double base_voltage_v, double base_power_va)
{
    if (!(base_voltage_v > 0.0) || !(base_power_va > 0.0))
        throw std::invalid_argument("per-unit bases must be positive");
    const double z_base = base_voltage_v * base_voltage_v / base_power_va;
    PhysicalBranch out;
    out.from = branch.from;
    out.to = branch.to;
    out.phases = branch.phases;
    out.r_ohm = branch.z_pu.real() * z_base;
    out.x_ohm = branch.z_pu.imag() * z_base;
    out.s_rated_kva = branch.s_rated_pu * base_power_va / 1000.0;
    return out;
}

RadialNetwork::RadialNetwork(Feeder feeder) : feeder_(std::move(feeder))
{
    auto report = validate_feeder(feeder_);
    if (!report.ok()) {
        std::string text = "invalid feeder:";
        for (const auto& s : report.issues) text += " [" + s + "]";
        throw std::invalid_argument(text);
    }
    order_ = radial_ordering(feeder_);
    for (int i = 0; i < bus_count(); ++i) bus_lookup_.emplace(feeder_.buses[i].id, i);
    for (int u = 0; u < user_count(); ++u) user_lookup_.emplace(feeder_.users[u].user_id, u);
    const int nb = bus_count();
    const int nl = branch_count();
    source_ = order_.front().bus;
    parent_branch_.assign(nb, -1);
    branch_from_.assign(nl, -1);
    branch_to_.assign(nl, -1);
    children_.assign(nb, {});
    for (std::size_t k = 1; k < order_.size(); ++k) {
        const int bus = order_[k].bus;
        const int br = order_[k].parent_branch;
        parent_branch_[bus] = br;
        const int a = bus_index(feeder_.branches[br].from);
        const int b = bus_index(feeder_.branches[br].to);
        branch_to_[br] = bus;
        branch_from_[br] = (a == bus) ? b : a;
        children_[branch_from_[br]].push_back(br);
    }
    user_bus_.resize(feeder_.users.size());
    bus_user_.assign(nb, -1);
    for (int u = 0; u < user_count(); ++u) {
        user_bus_[u] = bus_index(feeder_.users[u].bus_id);
        bus_user_[user_bus_[u]] = u;
    }
}

int RadialNetwork::parent_bus(int bus) const
{
    const int br = parent_branch_[bus];
    return br < 0 ? -1 : branch_from_[br];
}

int RadialNetwork::bus_index(const std::string& id) const
{
    if (auto it = bus_lookup_.find(id); it != bus_lookup_.end()) return it->second;
    throw std::out_of_range("unknown bus '" + id + "'");
}

int RadialNetwork::user_index(const std::string& id) const
{
    if (auto it = user_lookup_.find(id); it != user_lookup_.end()) return it->second;
    throw std::out_of_range("unknown user '" + id + "'");
}

std::vector<int> RadialNetwork::path_to(int bus) const
{
    std::vector<int> path;
    for (int b = bus; parent_branch_[b] >= 0; b = branch_from_[parent_branch_[b]]) path.push_back(parent_branch_[b]);
    std::reverse(path.begin(), path.end());
    return path;
}

Vector3c source_voltage()
{
    const double shift = 2.0 * std::numbers::pi / 3.0;
    return Vector3c(std::polar(1.0, 0.0), std::polar(1.0, -shift), std::polar(1.0, shift));
}

}  // namespace lvdsm

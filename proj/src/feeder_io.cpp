#include "lvdsm/feeder_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lvdsm {

using nlohmann::json;

namespace {

PhaseSet phases_from_json(const json& j, const std::string& what)
{
    std::string text;
    if (j.is_string()) {
        text = j.get<std::string>();
    } else if (j.is_array()) {
        for (const auto& item : j) text += item.get<std::string>();
    } else {
        throw std::invalid_argument(what + ": phases must be a string or a list");
    }
    auto set = PhaseSet::parse(text);
    if (!set) throw std::invalid_argument(what + ": invalid phases '" + text + "'");
    return *set;
}

std::vector<Phase> members(PhaseSet set)
{
    std::vector<Phase> out;
    for (Phase p : kAllPhases)
        if (set.contains(p)) out.push_back(p);
    return out;
}

Eigen::Matrix3d matrix_from_json(const json& j, PhaseSet phases, const std::string& what)
{
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    const auto idx = members(phases);
    const std::size_t n = idx.size();
    if (!j.is_array() || j.size() != n) throw std::invalid_argument(what + ": expected " + std::to_string(n) + " rows");
    if (!j.empty() && j[0].is_number()) {
        for (std::size_t k = 0; k < n; ++k) m(index(idx[k]), index(idx[k])) = j[k].get<double>();
        return m;
    }
    for (std::size_t r = 0; r < n; ++r) {
        if (!j[r].is_array() || j[r].size() != n) throw std::invalid_argument(what + ": matrix must be square");
        for (std::size_t c = 0; c < n; ++c) m(index(idx[r]), index(idx[c])) = j[r][c].get<double>();
    }
    return m;
}

json matrix_to_json(const Eigen::Matrix3d& m, PhaseSet phases)
{
    const auto idx = members(phases);
    json rows = json::array();
    for (Phase r : idx) {
        json row = json::array();
        for (Phase c : idx) row.push_back(m(index(r), index(c)));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

Feeder parse_feeder_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("feeder json: ") + e.what());
    }
    try {
        Feeder feeder;
        const auto& base = doc.at("base");
        feeder.base_voltage_v = base.at("voltage_v").get<double>();
        feeder.base_power_va = base.at("power_va").get<double>();
        if (!(feeder.base_voltage_v > 0.0) || !(feeder.base_power_va > 0.0))
            throw std::invalid_argument("feeder json: non-positive base quantities");

        for (const auto& jb : doc.at("buses")) {
            Bus bus;
            bus.id = jb.at("id").get<std::string>();
            bus.phases = phases_from_json(jb.value("phases", json("abc")), "bus " + bus.id);
            bus.vmin_pu = jb.value("vmin_pu", 0.9);
            bus.vmax_pu = jb.value("vmax_pu", 1.1);
            bus.is_source = jb.value("source", false);
            feeder.buses.push_back(std::move(bus));
        }
        for (const auto& jl : doc.at("branches")) {
            PhysicalBranch pb;
            pb.from = jl.at("from").get<std::string>();
            pb.to = jl.at("to").get<std::string>();
            const std::string name = "branch " + pb.from + "->" + pb.to;
            pb.phases = phases_from_json(jl.value("phases", json("abc")), name);
            pb.r_ohm = matrix_from_json(jl.at("r"), pb.phases, name + " r");
            if (jl.contains("x")) pb.x_ohm = matrix_from_json(jl.at("x"), pb.phases, name + " x");
            pb.s_rated_kva = jl.at("s_rated_kva").get<double>();
            feeder.branches.push_back(per_unit_convert(pb, feeder.base_voltage_v, feeder.base_power_va));
        }
        if (doc.contains("users")) {
            for (const auto& ju : doc.at("users")) {
                UserAttachment user;
                user.user_id = ju.at("id").get<std::string>();
                user.bus_id = ju.at("bus").get<std::string>();
                user.phases = phases_from_json(ju.at("phases"), "user " + user.user_id);
                feeder.users.push_back(std::move(user));
            }
        }
        return feeder;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("feeder json: ") + e.what());
    }
}

std::string feeder_to_json(const Feeder& feeder)
{
    json doc;
    doc["base"] = {{"voltage_v", feeder.base_voltage_v}, {"power_va", feeder.base_power_va}};
    json buses = json::array();
    for (const Bus& b : feeder.buses) {
        buses.push_back({{"id", b.id},
                         {"phases", b.phases.to_string()},
                         {"vmin_pu", b.vmin_pu},
                         {"vmax_pu", b.vmax_pu},
                         {"source", b.is_source}});
    }
    doc["buses"] = std::move(buses);
    json branches = json::array();
    for (const Branch& br : feeder.branches) {
        const auto pb = to_physical(br, feeder.base_voltage_v, feeder.base_power_va);
        branches.push_back({{"from", pb.from},
                            {"to", pb.to},
                            {"phases", pb.phases.to_string()},
                            {"r", matrix_to_json(pb.r_ohm, pb.phases)},
                            {"x", matrix_to_json(pb.x_ohm, pb.phases)},
                            {"s_rated_kva", pb.s_rated_kva}});
    }
    doc["branches"] = std::move(branches);
    json users = json::array();
    for (const UserAttachment& u : feeder.users)
        users.push_back({{"id", u.user_id}, {"bus", u.bus_id}, {"phases", u.phases.to_string()}});
    doc["users"] = std::move(users);
    return doc.dump(2) + "\n";
}

Feeder load_feeder(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feeder file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_feeder_json(buffer.str());
}

void save_feeder(const Feeder& feeder, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write feeder file " + path.string());
    out << feeder_to_json(feeder);
}

}  // namespace lvdsm

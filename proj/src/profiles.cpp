#include "lvdsm/profiles.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace lvdsm {

ProfileSet::ProfileSet(std::vector<std::string> user_ids, std::vector<PhaseSet> user_phases, int horizon,
                       int step_minutes)
    : user_ids_(std::move(user_ids)), user_phases_(std::move(user_phases)), horizon_(horizon),
      step_minutes_(step_minutes)
{
    if (horizon_ <= 0) throw std::invalid_argument("profile horizon must be positive");
    if (step_minutes_ <= 0) throw std::invalid_argument("step_minutes must be positive");
    if (user_phases_.size() != user_ids_.size()) throw std::invalid_argument("one phase set per user required");
    const std::size_t n = user_ids_.size() * kPhaseCount * static_cast<std::size_t>(horizon_);
    p_.assign(n, 0.0);
    q_.assign(n, 0.0);
}

namespace {
std::vector<std::string> ids_of(const Feeder& f)
{
    std::vector<std::string> out;
    for (const auto& u : f.users) out.push_back(u.user_id);
    return out;
}
std::vector<PhaseSet> phases_of(const Feeder& f)
{
    std::vector<PhaseSet> out;
    for (const auto& u : f.users) out.push_back(u.phases);
    return out;
}
}  // namespace

ProfileSet::ProfileSet(const Feeder& feeder, int horizon, int step_minutes)
    : ProfileSet(ids_of(feeder), phases_of(feeder), horizon, step_minutes)
{
}

int ProfileSet::user_index(const std::string& id) const
{
    for (int u = 0; u < user_count(); ++u)
        if (user_ids_[u] == id) return u;
    return -1;
}

void ProfileSet::check_against(const Feeder& feeder) const
{
    for (const auto& id : user_ids_) {
        bool known = false;
        for (const auto& u : feeder.users) known |= (u.user_id == id);
        if (!known) throw std::invalid_argument("profile user '" + id + "' is not attached to the feeder");
    }
    for (const auto& u : feeder.users) {
        const int k = user_index(u.user_id);
        if (k < 0) throw std::invalid_argument("no profile for user '" + u.user_id + "'");
        if (!(user_phases_[k] == u.phases))
            throw std::invalid_argument("profile phases of user '" + u.user_id + "' differ from its attachment");
    }
}

ProfileSet ProfileSet::aligned_to(const Feeder& feeder) const
{
    check_against(feeder);
    ProfileSet out(feeder, horizon_, step_minutes_);
    for (int u = 0; u < out.user_count(); ++u) {
        const int k = user_index(out.user_ids_[u]);
        for (Phase p : kAllPhases) {
            for (int t = 0; t < horizon_; ++t) {
                out.p_kw(u, p, t) = p_kw(k, p, t);
                out.q_kvar(u, p, t) = q_kvar(k, p, t);
            }
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r' && ch != ' ' && ch != '\t') {
            field.push_back(ch);
        }
    }
    out.push_back(field);
    return out;
}

bool parse_double(const std::string& s, double& out)
{
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

ProfileSet parse_profiles_csv(const std::string& text, int step_minutes)
{
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;

    struct Row {
        int t;
        int user;
        Phase phase;
        double p;
        double q;
    };
    std::vector<Row> rows;
    std::vector<std::string> users;
    std::map<std::string, int> user_lookup;
    std::set<std::tuple<int, int, int>> seen;
    int max_t = -1;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (!header_seen) {
            if (fields != std::vector<std::string>{"t", "user", "phase", "p_kw", "q_kvar"})
                throw std::invalid_argument("profiles csv: header must be t,user,phase,p_kw,q_kvar");
            header_seen = true;
            continue;
        }
        const std::string where = "profiles csv line " + std::to_string(line_no);
        if (fields.size() != 5) throw std::invalid_argument(where + ": malformed row (expected 5 fields)");
        int t = -1;
        auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), t);
        if (ec != std::errc() || ptr != fields[0].data() + fields[0].size() || t < 0)
            throw std::invalid_argument(where + ": malformed timestep '" + fields[0] + "'");
        if (fields[1].empty()) throw std::invalid_argument(where + ": malformed row (empty user)");
        auto phase = parse_phase(fields[2]);
        if (!phase) throw std::invalid_argument(where + ": malformed phase '" + fields[2] + "'");
        double p = 0.0;
        double q = 0.0;
        if (!parse_double(fields[3], p) || !parse_double(fields[4], q))
            throw std::invalid_argument(where + ": malformed power value");
        auto [it, fresh] = user_lookup.emplace(fields[1], static_cast<int>(users.size()));
        if (fresh) users.push_back(fields[1]);
        if (!seen.emplace(t, it->second, index(*phase)).second)
            throw std::invalid_argument(where + ": duplicate row (t=" + std::to_string(t) + ", user=" + fields[1] +
                                        ", phase=" + fields[2] + ")");
        rows.push_back({t, it->second, *phase, p, q});
        max_t = std::max(max_t, t);
    }
    if (!header_seen) throw std::invalid_argument("profiles csv: missing header");
    if (rows.empty()) throw std::invalid_argument("profiles csv: no data rows");

    const int horizon = max_t + 1;
    std::vector<PhaseSet> phases(users.size());
    std::vector<std::array<int, 3>> counts(users.size(), {0, 0, 0});
    for (const Row& r : rows) {
        phases[r.user].insert(r.phase);
        ++counts[r.user][index(r.phase)];
    }
    for (std::size_t u = 0; u < users.size(); ++u) {
        for (Phase p : kAllPhases) {
            if (phases[u].contains(p) && counts[u][index(p)] != horizon)
                throw std::invalid_argument("profiles csv: inconsistent horizon for user '" + users[u] + "' phase " +
                                            phase_char(p) + " (" + std::to_string(counts[u][index(p)]) + " of " +
                                            std::to_string(horizon) + " steps)");
        }
    }

    ProfileSet out(users, phases, horizon, step_minutes);
    for (const Row& r : rows) {
        out.p_kw(r.user, r.phase, r.t) = r.p;
        out.q_kvar(r.user, r.phase, r.t) = r.q;
    }
    return out;
}

ProfileSet load_profiles(const std::filesystem::path& path, int step_minutes)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profiles file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_profiles_csv(buffer.str(), step_minutes);
}

std::string profiles_to_csv(const ProfileSet& profiles)
{
    std::string out = "t,user,phase,p_kw,q_kvar\n";
    char buf[128];
    for (int t = 0; t < profiles.horizon(); ++t) {
        for (int u = 0; u < profiles.user_count(); ++u) {
            for (Phase p : kAllPhases) {
                if (!profiles.user_phases(u).contains(p)) continue;
                std::snprintf(buf, sizeof buf, "%d,%s,%c,%.17g,%.17g\n", t, profiles.user_ids()[u].c_str(),
                              phase_char(p), profiles.p_kw(u, p, t), profiles.q_kvar(u, p, t));
                out += buf;
            }
        }
    }
    return out;
}

void save_profiles(const ProfileSet& profiles, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write profiles file " + path.string());
    out << profiles_to_csv(profiles);
}

}  // namespace lvdsm

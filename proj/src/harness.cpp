#include "lvdsm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "lvdsm/contracts.hpp"
#include "lvdsm/json_io.hpp"
#include "lvdsm/tightening.hpp"

namespace lvdsm {

namespace {

constexpr const char* kMetricsHeader =
    "config_hash,feeder,seed,users,modality,status,feasible,objective,reduction_minutes,participant_fraction,"
    "ac_feasible_at_zero,restored,delta_star,final_objective,blocker,note";
constexpr const char* kTimingsHeader = "config_hash,feeder,modality,generate_s,build_s,milp_s,ac_s,total_s";

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string clean(std::string s)
{
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
    return s;
}

std::string feeder_name(int i)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "f%03d", i);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void parallel_for(int n, int workers, const std::function<void(int)>& body)
{
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) body(i);
        });
    for (std::thread& t : pool) t.join();
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    boost::split(out, line, boost::is_any_of(","));
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string metrics_line(const MetricsRow& r)
{
    std::ostringstream os;
    os << r.config_hash << ',' << r.feeder << ',' << r.seed << ',' << r.users << ',' << r.modality << ','
       << r.status << ',' << (r.feasible ? 1 : 0) << ',' << r.objective << ',' << fmt("%.4f", r.reduction_minutes)
       << ',' << fmt("%.6f", r.participant_fraction) << ',' << (r.ac_feasible_at_zero ? 1 : 0) << ','
       << (r.restored ? 1 : 0) << ',' << (r.restored ? fmt("%.4f", r.delta_star) : "") << ',' << r.final_objective
       << ',' << clean(r.blocker) << ',' << clean(r.note);
    return os.str();
}

std::string timing_line(const std::string& hash, const TimingRow& t)
{
    std::ostringstream os;
    os << hash << ',' << t.feeder << ',' << t.modality << ',' << fmt("%.6f", t.generate_s) << ','
       << fmt("%.6f", t.build_s) << ',' << fmt("%.6f", t.milp_s) << ',' << fmt("%.6f", t.ac_s) << ','
       << fmt("%.6f", t.total_s);
    return os.str();
}

// Linear interpolation between order statistics.
double quantile(std::vector<double> v, double q)
{
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

nlohmann::json quartiles(const std::vector<double>& v)
{
    if (v.empty()) return nullptr;
    return {{"count", v.size()}, {"q1", quantile(v, 0.25)}, {"median", quantile(v, 0.5)}, {"q3", quantile(v, 0.75)}};
}

double pct(int k, int n) { return n == 0 ? 0.0 : 100.0 * k / n; }

std::string canonical(const SweepConfig& c)
{
    std::string text = c.to_ini();
    const auto cut = text.find("[output]");
    return cut == std::string::npos ? text : text.substr(0, cut);
}

struct Cell {
    MetricsRow row;
    TimingRow timing;
    std::string trace;
};

Cell run_cell(const Scenario& sc, const SweepConfig& config, int feeder, const std::string& modality,
              const std::vector<double>& grid, const std::string& hash)
{
    Cell cell;
    MetricsRow& row = cell.row;
    row.config_hash = hash;
    row.feeder = feeder_name(feeder);
    row.seed = config.seed_for(feeder);
    row.users = static_cast<int>(sc.feeder.users.size());
    row.modality = modality;
    cell.timing.feeder = row.feeder;
    cell.timing.modality = modality;

    const auto t0 = std::chrono::steady_clock::now();
    try {
        const int step = sc.profiles.step_minutes();
        const auto contracts = uniform_contracts(sc.feeder, find_preset(modality, step), config.scenario.p_gtd_kw);
        TighteningOptions opt;
        opt.grid = grid;
        opt.mip.time_limit_s = config.time_limit_s;
        opt.mip.node_limit = config.node_limit;
        const TighteningResult res = tighten_and_resolve(sc.feeder, sc.profiles, contracts,
                                                         Limits::from_feeder(sc.feeder, sc.profiles.horizon()), opt);
        const TighteningStep& first = res.trace.front();
        row.status = mip::to_string(first.milp_status);
        row.feasible = first.milp_status == mip::MipStatus::optimal;
        row.ac_feasible_at_zero = first.ac_feasible;
        if (res.has_initial) {
            const Schedule& s = res.initial;
            row.objective = s.objective;
            const int part = s.participants();
            row.participant_fraction = row.users == 0 ? 0.0 : static_cast<double>(part) / row.users;
            row.reduction_minutes = part == 0 ? 0.0 : static_cast<double>(step) * s.objective / part;
        }
        row.restored = res.found;
        if (res.found) {
            row.delta_star = res.delta_star;
            row.final_objective = res.schedule.objective;
        } else {
            bool infeasible = false, limit = false, solver = false;
            for (const TighteningStep& st : res.trace) {
                infeasible |= st.milp_status == mip::MipStatus::infeasible;
                limit |= st.milp_status == mip::MipStatus::timeout && !st.has_schedule;
                solver |= st.milp_status == mip::MipStatus::numerical_failure;
            }
            row.blocker = infeasible ? "milp_infeasible" : limit ? "timeout" : solver ? "solver" : "ac";
            row.note = res.trace.back().note;
        }
        cell.timing.build_s = first.build_s;
        cell.timing.milp_s = first.milp_s;
        cell.timing.ac_s = first.ac_s;
        cell.trace = to_json(res).dump();
    } catch (const std::exception& e) {
        row.status = "error";
        row.blocker = "error";
        row.note = e.what();
    }
    cell.timing.total_s = seconds_since(t0);
    return cell;
}

}  // namespace

void SweepConfig::validate() const
{
    if (feeder_count <= 0) throw std::invalid_argument("sweep: cohort count must be positive");
    if (min_users <= 0 || max_users < min_users) throw std::invalid_argument("sweep: bad user range");
    if (modalities.empty()) throw std::invalid_argument("sweep: modality list is empty");
    std::set<std::string> seen;
    for (const std::string& m : modalities) {
        find_preset(m, scenario.step_minutes);
        if (!seen.insert(m).second) throw std::invalid_argument("sweep: modality '" + m + "' listed twice");
    }
    if (node_limit == 0) throw std::invalid_argument("sweep: node_limit must be positive or -1");
    ScenarioParams p = scenario;
    p.n_users = min_users;
    p.validate();
}

int SweepConfig::users_for(int feeder) const
{
    const auto span = static_cast<std::uint64_t>(max_users - min_users + 1);
    return min_users + static_cast<int>(splitmix(seed_for(feeder) ^ 0x5eedULL) % span);
}

std::vector<double> SweepConfig::grid() const { return delta_grid.empty() ? default_delta_grid() : delta_grid; }

std::string SweepConfig::to_ini() const
{
    std::ostringstream os;
    os << "[cohort]\ncount = " << feeder_count << "\nmin_users = " << min_users << "\nmax_users = " << max_users
       << "\nseed = " << seed << "\n\n[modalities]\nlist = " << boost::join(modalities, ",")
       << "\n\n[tightening]\ngrid = ";
    const auto g = grid();
    for (std::size_t i = 0; i < g.size(); ++i) os << (i ? "," : "") << fmt("%.17g", g[i]);
    os << "\n\n[solver]\ntime_limit_s = " << fmt("%.17g", time_limit_s) << "\nnode_limit = " << node_limit
       << "\n\n[scenario]\n";
    ScenarioParams p = scenario;
    p.n_users = min_users;
    p.seed = seed;
    std::istringstream lines(scenario_params_to_ini(p));
    for (std::string line; std::getline(lines, line);)
        if (line.rfind("n_users", 0) != 0 && line.rfind("seed", 0) != 0) os << line << '\n';
    os << "\n[output]\ndir = " << out_dir.string() << '\n';
    return os.str();
}

std::string SweepConfig::hash() const
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical(*this)) h = (h ^ c) * 1099511628211ULL;
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SweepConfig load_sweep_config(const std::filesystem::path& path)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw std::runtime_error(e.what());
    }
    static const std::map<std::string, std::set<std::string>> known = {
        {"cohort", {"count", "min_users", "max_users", "seed"}},
        {"modalities", {"list"}},
        {"tightening", {"grid"}},
        {"solver", {"time_limit_s", "node_limit"}},
        {"output", {"dir"}},
        {"scenario", {}},
    };
    for (const auto& [section, node] : tree) {
        auto it = known.find(section);
        if (it == known.end() || node.empty()) throw std::invalid_argument("sweep: unknown section " + section);
        if (section == "scenario") continue;
        for (const auto& [key, value] : node)
            if (!it->second.count(key)) throw std::invalid_argument("sweep: unknown key " + section + "." + key);
    }

    SweepConfig c;
    try {
        auto take = [&](const char* key, auto& out) {
            if (auto v = tree.get_optional<std::remove_reference_t<decltype(out)>>(key)) out = *v;
            else if (tree.get_child_optional(key)) throw std::invalid_argument(std::string("sweep: bad value for ") + key);
        };
        take("cohort.count", c.feeder_count);
        take("cohort.min_users", c.min_users);
        take("cohort.max_users", c.max_users);
        take("cohort.seed", c.seed);
        take("solver.time_limit_s", c.time_limit_s);
        take("solver.node_limit", c.node_limit);
        if (auto list = tree.get_optional<std::string>("modalities.list")) {
            std::vector<std::string> names;
            boost::split(names, *list, boost::is_any_of(","));
            c.modalities.clear();
            for (std::string& n : names) {
                boost::trim(n);
                if (!n.empty()) c.modalities.push_back(n);
            }
        }
        if (auto grid = tree.get_optional<std::string>("tightening.grid")) {
            std::vector<std::string> parts;
            boost::split(parts, *grid, boost::is_any_of(","));
            for (std::string& s : parts) {
                boost::trim(s);
                std::size_t used = 0;
                double v = 0.0;
                try {
                    v = std::stod(s, &used);
                } catch (const std::logic_error&) {
                    used = std::string::npos;
                }
                if (used != s.size()) throw std::invalid_argument("sweep: bad grid value '" + s + "'");
                c.delta_grid.push_back(v);
            }
        }
        if (auto dir = tree.get_optional<std::string>("output.dir")) {
            std::filesystem::path d = *dir;
            c.out_dir = d.is_relative() ? path.parent_path() / d : d;
        }
        if (auto sc = tree.get_child_optional("scenario")) c.scenario = scenario_params_from_ptree(*sc);
    } catch (const boost::property_tree::ptree_bad_data& e) {
        throw std::invalid_argument(std::string("sweep: ") + e.what());
    }
    const auto g = c.grid();
    if (g.empty() || g.front() != 0.0 || !std::is_sorted(g.begin(), g.end()) ||
        std::adjacent_find(g.begin(), g.end()) != g.end() || g.back() >= 1.0)
        throw std::invalid_argument("sweep: grid must start at 0, ascend strictly and stay below 1");
    c.validate();
    return c;
}

int worker_count_from_env()
{
    if (const char* env = std::getenv("LVDSM_WORKERS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
        throw std::invalid_argument(std::string("LVDSM_WORKERS must be a positive integer, got '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

MetricsTable run_sweep(const SweepConfig& config, const SweepOptions& options)
{
    config.validate();
    const std::string hash = config.hash();
    const auto grid = config.grid();
    const int workers = options.workers > 0 ? options.workers : worker_count_from_env();
    const auto& dir = config.out_dir;
    std::filesystem::create_directories(dir);
    if (options.write_traces) std::filesystem::create_directories(dir / "traces");

    const int F = config.feeder_count;
    const int M = static_cast<int>(config.modalities.size());
    std::vector<std::optional<MetricsRow>> rows(static_cast<std::size_t>(F) * M);
    std::vector<TimingRow> timings(rows.size());
    auto slot = [&](const std::string& feeder, const std::string& modality) -> int {
        if (feeder.size() != 4 || feeder[0] != 'f') return -1;
        const int f = std::atoi(feeder.c_str() + 1);
        const auto it = std::find(config.modalities.begin(), config.modalities.end(), modality);
        if (f < 0 || f >= F || it == config.modalities.end() || feeder_name(f) != feeder) return -1;
        return f * M + static_cast<int>(it - config.modalities.begin());
    };

    if (options.resume && std::filesystem::exists(dir / "metrics.csv")) {
        for (MetricsRow& r : parse_metrics_csv(read_file(dir / "metrics.csv"))) {
            const int k = slot(r.feeder, r.modality);
            if (r.config_hash == hash && k >= 0) rows[k] = std::move(r);
        }
        if (std::filesystem::exists(dir / "timings.csv")) {
            std::istringstream in(read_file(dir / "timings.csv"));
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                const auto f = split_csv_line(line);
                if (f.size() != 8 || f[0] != hash) continue;
                const int k = slot(f[1], f[2]);
                if (k >= 0 && rows[k]) timings[k] = parse_timings_csv(std::string(kTimingsHeader) + "\n" + line).front();
            }
        }
    }

    // Start the incremental files from the reusable rows.
    std::mutex io;
    std::ofstream metrics_out, timings_out;
    {
        std::string m = std::string(kMetricsHeader) + "\n", t = std::string(kTimingsHeader) + "\n";
        for (std::size_t k = 0; k < rows.size(); ++k)
            if (rows[k]) {
                m += metrics_line(*rows[k]) + "\n";
                t += timing_line(hash, timings[k]) + "\n";
            }
        write_file(dir / "metrics.csv", m);
        write_file(dir / "timings.csv", t);
        metrics_out.open(dir / "metrics.csv", std::ios::app | std::ios::binary);
        timings_out.open(dir / "timings.csv", std::ios::app | std::ios::binary);
    }

    std::vector<int> feeders;
    for (int f = 0; f < F; ++f)
        for (int m = 0; m < M; ++m)
            if (!rows[f * M + m]) {
                feeders.push_back(f);
                break;
            }

    std::vector<std::optional<Scenario>> scenarios(F);
    std::vector<std::string> gen_error(F);
    std::vector<double> gen_time(F, 0.0);
    parallel_for(static_cast<int>(feeders.size()), workers, [&](int i) {
        const int f = feeders[i];
        ScenarioParams p = config.scenario;
        p.n_users = config.users_for(f);
        p.seed = config.seed_for(f);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            scenarios[f] = generate_scenario(p);
        } catch (const std::exception& e) {
            gen_error[f] = e.what();
        }
        gen_time[f] = seconds_since(t0);
    });

    std::vector<int> todo;
    for (int k = 0; k < F * M; ++k)
        if (!rows[k]) todo.push_back(k);
    parallel_for(static_cast<int>(todo.size()), workers, [&](int i) {
        const int k = todo[i];
        const int f = k / M;
        const std::string& modality = config.modalities[k % M];
        Cell cell;
        if (scenarios[f]) {
            cell = run_cell(*scenarios[f], config, f, modality, grid, hash);
        } else {
            MetricsRow& r = cell.row;
            r.config_hash = hash;
            r.feeder = feeder_name(f);
            r.seed = config.seed_for(f);
            r.users = config.users_for(f);
            r.modality = modality;
            r.status = "error";
            r.blocker = "error";
            r.note = "scenario: " + gen_error[f];
            cell.timing.feeder = r.feeder;
            cell.timing.modality = modality;
        }
        cell.timing.generate_s = gen_time[f];
        std::lock_guard lock(io);
        metrics_out << metrics_line(cell.row) << '\n' << std::flush;
        timings_out << timing_line(hash, cell.timing) << '\n' << std::flush;
        if (options.write_traces && !cell.trace.empty()) {
            try {
                write_file(dir / "traces" / (cell.row.feeder + "_" + modality + ".json"), cell.trace + "\n");
            } catch (const std::exception&) {
                // traces are a convenience; the row already carries the outcome
            }
        }
        rows[k] = std::move(cell.row);
        timings[k] = std::move(cell.timing);
    });

    MetricsTable table;
    table.config_hash = hash;
    table.grid = grid;
    table.modalities = config.modalities;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        table.rows.push_back(std::move(*rows[k]));
        table.timings.push_back(std::move(timings[k]));
    }
    return table;
}

std::string metrics_to_csv(const MetricsTable& table)
{
    std::string out = std::string(kMetricsHeader) + "\n";
    for (const MetricsRow& r : table.rows) out += metrics_line(r) + "\n";
    return out;
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader) throw std::invalid_argument("metrics.csv: unexpected header");
    std::vector<MetricsRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 16) throw std::invalid_argument("metrics.csv: line " + std::to_string(lineno) + " has " +
                                                        std::to_string(f.size()) + " fields");
        try {
            MetricsRow r;
            r.config_hash = f[0];
            r.feeder = f[1];
            r.seed = std::stoull(f[2]);
            r.users = std::stoi(f[3]);
            r.modality = f[4];
            r.status = f[5];
            r.feasible = f[6] == "1";
            r.objective = std::stoi(f[7]);
            r.reduction_minutes = std::stod(f[8]);
            r.participant_fraction = std::stod(f[9]);
            r.ac_feasible_at_zero = f[10] == "1";
            r.restored = f[11] == "1";
            r.delta_star = f[12].empty() ? -1.0 : std::stod(f[12]);
            r.final_objective = std::stoi(f[13]);
            r.blocker = f[14];
            r.note = f[15];
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw std::invalid_argument("metrics.csv: bad number on line " + std::to_string(lineno));
        }
    }
    return rows;
}

std::vector<TimingRow> parse_timings_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kTimingsHeader) throw std::invalid_argument("timings.csv: unexpected header");
    std::vector<TimingRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8) throw std::invalid_argument("timings.csv: wrong field count");
        try {
            rows.push_back({f[1], f[2], std::stod(f[3]), std::stod(f[4]), std::stod(f[5]), std::stod(f[6]),
                            std::stod(f[7])});
        } catch (const std::logic_error&) {
            throw std::invalid_argument("timings.csv: bad number");
        }
    }
    return rows;
}

void emit_report(const MetricsTable& table, const std::filesystem::path& dir)
{
    if (table.rows.empty()) throw std::invalid_argument("report: metrics table is empty");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    write_file(dir / "metrics.csv", metrics_to_csv(table));

    std::string t = std::string(kTimingsHeader) + "\n";
    for (const TimingRow& r : table.timings) t += timing_line(table.config_hash, r) + "\n";
    write_file(dir / "timings.csv", t);

    nlohmann::json modalities = nlohmann::json::object();
    std::string curve = "modality,delta,cumulative_feasible_pct\n";
    for (const std::string& m : table.modalities) {
        std::vector<const MetricsRow*> rows;
        for (const MetricsRow& r : table.rows)
            if (r.modality == m) rows.push_back(&r);
        const int n = static_cast<int>(rows.size());
        int feasible = 0, ac0 = 0, restored = 0;
        std::vector<double> reduction, fraction, deltas, milp_s;
        std::map<std::string, int> blockers;
        for (const MetricsRow* r : rows) {
            feasible += r->feasible;
            ac0 += r->ac_feasible_at_zero;
            restored += r->restored;
            if (r->feasible) {
                fraction.push_back(r->participant_fraction);
                if (r->objective > 0) reduction.push_back(r->reduction_minutes);
            }
            if (r->restored) deltas.push_back(r->delta_star);
            if (!r->blocker.empty()) ++blockers[r->blocker];
        }
        for (const TimingRow& tr : table.timings)
            if (tr.modality == m) milp_s.push_back(tr.milp_s);
        double mean = 0.0;
        for (double v : fraction) mean += v;
        if (!fraction.empty()) mean /= static_cast<double>(fraction.size());
        nlohmann::json pf = quartiles(fraction);
        if (!pf.is_null()) pf["mean"] = mean;
        modalities[m] = {
            {"cells", n},
            {"feasible_pct", pct(feasible, n)},
            {"ac_feasible_at_zero_pct", pct(ac0, n)},
            {"restored_pct", pct(restored, n)},
            {"reduction_minutes_per_participant", quartiles(reduction)},
            {"participant_fraction", pf},
            {"delta_star_max", deltas.empty() ? nlohmann::json(nullptr)
                                              : nlohmann::json(*std::max_element(deltas.begin(), deltas.end()))},
            {"blockers", blockers},
            {"milp_seconds", quartiles(milp_s)},
        };
        for (double d : table.grid) {
            int k = 0;
            for (const MetricsRow* r : rows) k += r->restored && r->delta_star <= d + 1e-12;
            curve += m + "," + fmt("%.4f", d) + "," + fmt("%.2f", pct(k, n)) + "\n";
        }
    }
    nlohmann::json summary = {
        {"config_hash", table.config_hash},
        {"cells", table.rows.size()},
        {"modalities", modalities},
    };
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    write_file(dir / "tightening_curve.csv", curve);
}

MetricsTable load_report_table(const std::filesystem::path& dir)
{
    MetricsTable table;
    table.rows = parse_metrics_csv(read_file(dir / "metrics.csv"));
    if (table.rows.empty()) throw std::invalid_argument("metrics.csv has no rows");
    table.config_hash = table.rows.front().config_hash;
    for (const MetricsRow& r : table.rows) {
        if (r.config_hash != table.config_hash) throw std::invalid_argument("metrics.csv mixes config hashes");
        if (std::find(table.modalities.begin(), table.modalities.end(), r.modality) == table.modalities.end())
            table.modalities.push_back(r.modality);
    }
    if (std::filesystem::exists(dir / "timings.csv")) table.timings = parse_timings_csv(read_file(dir / "timings.csv"));
    if (std::filesystem::exists(dir / "tightening_curve.csv")) {
        std::istringstream in(read_file(dir / "tightening_curve.csv"));
        std::string line;
        std::getline(in, line);
        std::set<double> grid;
        while (std::getline(in, line)) {
            const auto f = split_csv_line(line);
            if (f.size() == 3) grid.insert(std::stod(f[1]));
        }
        table.grid.assign(grid.begin(), grid.end());
    }
    if (table.grid.empty()) table.grid = default_delta_grid();
    return table;
}

}  // namespace lvdsm

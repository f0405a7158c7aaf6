#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lvdsm/scenario.hpp"

namespace lvdsm {

struct SweepConfig {
    // Feeder i (0-based) uses seed + i and a user count drawn from
    // [min_users, max_users] by that seed.
    int feeder_count = 20;
    int min_users = 10;
    int max_users = 30;
    std::uint64_t seed = 1;
    ScenarioParams scenario;  // n_users and seed are overridden per feeder

    std::vector<std::string> modalities = {"simple", "single", "double", "double_delta", "triple_delta"};
    std::vector<double> delta_grid;  // empty means the default grid

    double time_limit_s = 60.0;
    // Deterministic budget; a cell that exhausts it is a timeout row no
    // matter how fast the machine is.
    long node_limit = 200000;

    std::filesystem::path out_dir = "sweep_out";

    void validate() const;
    int users_for(int feeder) const;
    std::uint64_t seed_for(int feeder) const { return seed + static_cast<std::uint64_t>(feeder); }
    std::vector<double> grid() const;
    // Hex digest of everything that influences results (not out_dir).
    std::string hash() const;
    std::string to_ini() const;
};

// Sections: [cohort] count, min_users, max_users, seed; [modalities] list;
// [tightening] grid; [solver] time_limit_s, node_limit; [output] dir;
// [scenario] any scenario key. Relative output dirs resolve against the
// config file's directory.
SweepConfig load_sweep_config(const std::filesystem::path& path);

struct MetricsRow {
    std::string config_hash;
    std::string feeder;  // f000, f001, ...
    std::uint64_t seed = 0;
    int users = 0;
    std::string modality;
    std::string status;  // MILP status at delta 0, or "error"
    bool feasible = false;
    int objective = -1;
    double reduction_minutes = 0.0;  // per participant
    double participant_fraction = 0.0;
    bool ac_feasible_at_zero = false;
    bool restored = false;  // some grid point gave an AC-clean schedule
    double delta_star = -1.0;
    int final_objective = -1;
    // Why no grid point worked: milp_infeasible, timeout, ac, error.
    std::string blocker;
    std::string note;
};

struct TimingRow {
    std::string feeder;
    std::string modality;
    double generate_s = 0.0;
    double build_s = 0.0;  // delta 0
    double milp_s = 0.0;   // delta 0
    double ac_s = 0.0;     // delta 0
    double total_s = 0.0;  // whole tightening loop
};

struct MetricsTable {
    std::string config_hash;
    std::vector<double> grid;
    std::vector<std::string> modalities;  // report order
    std::vector<MetricsRow> rows;         // sorted by feeder, then modality order
    std::vector<TimingRow> timings;
};

struct SweepOptions {
    int workers = 0;  // 0: LVDSM_WORKERS, else the hardware concurrency
    bool resume = true;
    bool write_traces = true;  // traces/<feeder>_<modality>.json
};

int worker_count_from_env();

// Runs every feeder x modality cell; failures become rows, never exceptions.
// Completed rows are appended to out_dir/metrics.csv as they finish so an
// interrupted sweep resumes; rows with a matching config hash are reused.
MetricsTable run_sweep(const SweepConfig& config, const SweepOptions& options = {});

// metrics.csv, timings.csv, summary.json and tightening_curve.csv.
void emit_report(const MetricsTable& table, const std::filesystem::path& dir);

std::string metrics_to_csv(const MetricsTable& table);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);
std::vector<TimingRow> parse_timings_csv(const std::string& text);

// Rebuilds a table from a directory written by emit_report; modality order
// follows first appearance and the grid comes from tightening_curve.csv.
MetricsTable load_report_table(const std::filesystem::path& dir);

}  // namespace lvdsm

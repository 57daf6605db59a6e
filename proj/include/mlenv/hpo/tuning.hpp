#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mlenv/hpo/search_space.hpp"
#include "mlenv/methods/method.hpp"

namespace mlenv::hpo {

enum class MetricDirection { minimize, maximize };

/// Direction from the metric-name suffix: nll, mse, mae, loss minimize;
/// accuracy maximizes. An unrecognized suffix is an error asking for an
/// explicit --optimization_mode flag.
MetricDirection metric_direction(const std::string& name);

enum class TrialStatus { completed, out_of_budget, failed };
std::string trial_status_name(TrialStatus status);

struct TrialResult {
    std::size_t trial_id = 0;
    Assignment assignment;                        // searched flags only
    std::vector<methods::MetricRecord> history;   // per-epoch records from the fit
    std::optional<double> objective;              // present iff status == completed
    TrialStatus status = TrialStatus::completed;
    std::string error;                            // populated for failed trials
};

struct TuningConfig {
    std::string optimizer = "Grid Search";  // or "Random Search"
    std::string optimization_metric;        // <split>_<metric>, e.g. validation_nll
    std::optional<MetricDirection> mode;    // overrides the suffix table
    double max_wallclock_time = std::numeric_limits<double>::infinity();  // seconds
    std::size_t num_samples = 10;           // random-search trial count
    std::size_t workers = 1;                // trials running concurrently
    std::uint64_t seed = 42;                // root seed; trial i runs at seed + i
    std::filesystem::path save_path;        // holds leaderboard.csv and trial dirs
};

/// Runs one trial: merged holds base args, the injected per-trial seed, and
/// the assignment; trial_dir is a fresh directory for the trial's artifacts.
/// Returns the metric history of the fit. Exceptions mark the trial failed.
using TrialRunner = std::function<std::vector<methods::MetricRecord>(
    std::size_t trial_id, const Assignment& merged, const std::filesystem::path& trial_dir)>;

struct TuningResult {
    std::vector<TrialResult> trials;  // in launch order
    std::size_t best_trial = 0;       // index into trials
    std::filesystem::path leaderboard_path;
};

/// Launches trials until the assignment list or the wall-clock budget is
/// exhausted (a running trial is never interrupted; assignments that never
/// launch are recorded as out_of_budget). Up to `workers` trials run at once;
/// results are recorded in launch order either way. The objective is the last
/// reported value of the optimization metric; best is the extremum over
/// completed trials. Writes `leaderboard.csv` under save_path.
TuningResult run_tuning(const SearchSpace& space, const TuningConfig& cfg,
                        const TrialRunner& runner);

/// Columns: trial_id, status, objective, then one column per searched flag.
void write_leaderboard(const std::filesystem::path& path, const std::vector<TrialResult>& trials,
                       const std::vector<std::string>& flags);

}  // namespace mlenv::hpo

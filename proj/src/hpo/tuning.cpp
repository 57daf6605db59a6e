#include "mlenv/hpo/tuning.hpp"

#include <chrono>
#include <deque>
#include <fstream>
#include <future>
#include <stdexcept>
#include <utility>

#include "mlenv/common/text.hpp"

namespace mlenv::hpo {
namespace {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::optional<double> last_metric_value(const std::vector<methods::MetricRecord>& history,
                                        const std::string& name) {
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        auto found = it->values.find(name);
        if (found != it->values.end()) return found->second;
    }
    return std::nullopt;
}

void check_metric_name(const std::string& name) {
    for (const char* prefix : {"train_", "validation_", "test_"})
        if (starts_with(name, prefix) && name.size() > std::string(prefix).size()) return;
    throw std::invalid_argument("optimization metric must be named <split>_<metric>, e.g. "
                                "validation_nll; got '" +
                                name + "'");
}

}  // namespace

MetricDirection metric_direction(const std::string& name) {
    auto underscore = name.rfind('_');
    std::string suffix = underscore == std::string::npos ? name : name.substr(underscore + 1);
    if (suffix == "nll" || suffix == "mse" || suffix == "mae" || suffix == "loss")
        return MetricDirection::minimize;
    if (suffix == "accuracy") return MetricDirection::maximize;
    throw std::invalid_argument("cannot infer an optimization direction for metric '" + name +
                                "'; pass --optimization_mode min or max");
}

std::string trial_status_name(TrialStatus status) {
    switch (status) {
        case TrialStatus::completed: return "completed";
        case TrialStatus::out_of_budget: return "out_of_budget";
        case TrialStatus::failed: return "failed";
    }
    return "unknown";
}

void write_leaderboard(const std::filesystem::path& path, const std::vector<TrialResult>& trials,
                       const std::vector<std::string>& flags) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open leaderboard for writing: " + path.string());
    os << "trial_id,status,objective";
    for (const auto& flag : flags) os << "," << csv_field(flag);
    os << "\n";
    for (const auto& t : trials) {
        os << t.trial_id << "," << trial_status_name(t.status) << ",";
        if (t.objective) os << format_double(*t.objective);
        for (const auto& flag : flags) {
            auto it = t.assignment.find(flag);
            os << "," << (it == t.assignment.end() ? "" : csv_field(it->second));
        }
        os << "\n";
    }
    os.flush();
    if (!os) throw std::runtime_error("failed writing leaderboard: " + path.string());
}

TuningResult run_tuning(const SearchSpace& space, const TuningConfig& cfg,
                        const TrialRunner& runner) {
    check_metric_name(cfg.optimization_metric);
    MetricDirection direction =
        cfg.mode ? *cfg.mode : metric_direction(cfg.optimization_metric);
    if (!(cfg.max_wallclock_time > 0.0))
        throw std::invalid_argument("max_wallclock_time must be positive");
    if (cfg.workers < 1) throw std::invalid_argument("workers must be at least 1");

    std::vector<Assignment> assignments;
    if (cfg.optimizer == "Grid Search") {
        assignments = grid_enumerate(space);
    } else if (cfg.optimizer == "Random Search") {
        assignments = random_sample(space, cfg.num_samples, cfg.seed);
    } else {
        throw std::invalid_argument("unknown optimizer '" + cfg.optimizer +
                                    "'; expected \"Grid Search\" or \"Random Search\"");
    }

    std::filesystem::create_directories(cfg.save_path);
    auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    auto run_one = [&](std::size_t i) {
        TrialResult trial;
        trial.trial_id = i;
        trial.assignment = assignments[i];
        Assignment merged = space.base_args;
        merged["seed"] = std::to_string(cfg.seed + i);
        for (const auto& [flag, value] : assignments[i]) merged[flag] = value;
        auto trial_dir = cfg.save_path / ("trial_" + std::to_string(i));
        try {
            trial.history = runner(i, merged, trial_dir);
            trial.objective = last_metric_value(trial.history, cfg.optimization_metric);
            if (!trial.objective) {
                trial.status = TrialStatus::failed;
                trial.error = "metric " + cfg.optimization_metric + " was never reported";
            }
        } catch (const std::exception& e) {
            trial.status = TrialStatus::failed;
            trial.error = e.what();
        } catch (...) {
            trial.status = TrialStatus::failed;
            trial.error = "unknown error";
        }
        return trial;
    };

    // The budget gates launches only: inflight trials always drain, and with
    // workers == 1 this degenerates to the plain sequential loop.
    std::vector<TrialResult> trials(assignments.size());
    std::deque<std::pair<std::size_t, std::future<TrialResult>>> inflight;
    std::size_t next = 0;
    bool any_ran = false;
    bool budget_hit = false;
    while (next < assignments.size() || !inflight.empty()) {
        while (!budget_hit && inflight.size() < cfg.workers && next < assignments.size()) {
            if (elapsed() >= cfg.max_wallclock_time) {
                budget_hit = true;
                break;
            }
            any_ran = true;
            std::size_t id = next++;
            inflight.emplace_back(id, std::async(std::launch::async, run_one, id));
        }
        if (inflight.empty()) break;
        auto [id, fut] = std::move(inflight.front());
        inflight.pop_front();
        trials[id] = fut.get();
    }
    for (std::size_t i = next; i < assignments.size(); ++i) {
        trials[i].trial_id = i;
        trials[i].assignment = assignments[i];
        trials[i].status = TrialStatus::out_of_budget;
    }

    TuningResult result;
    result.trials = std::move(trials);

    std::vector<std::string> flags;
    for (const auto& [flag, domain] : space.entries) flags.push_back(flag);
    result.leaderboard_path = cfg.save_path / "leaderboard.csv";
    write_leaderboard(result.leaderboard_path, result.trials, flags);

    std::size_t best = result.trials.size();
    for (std::size_t i = 0; i < result.trials.size(); ++i) {
        const auto& t = result.trials[i];
        if (!t.objective) continue;
        if (best == result.trials.size() ||
            (direction == MetricDirection::minimize ? *t.objective < *result.trials[best].objective
                                                    : *t.objective > *result.trials[best].objective))
            best = i;
    }
    if (best == result.trials.size()) {
        if (!any_ran)
            throw std::runtime_error("wall-clock budget exhausted before any trial launched");
        std::string detail;
        for (const auto& t : result.trials)
            if (!t.error.empty()) {
                detail = "; first error: " + t.error;
                break;
            }
        throw std::runtime_error("no trial completed with metric " + cfg.optimization_metric +
                                 detail);
    }
    result.best_trial = best;
    return result;
}

}  // namespace mlenv::hpo

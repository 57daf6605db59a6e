#include "mlenv/cli/commands.hpp"

#include <filesystem>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "mlenv/cli/artifacts.hpp"
#include "mlenv/cli/parse.hpp"
#include "mlenv/common/text.hpp"
#include "mlenv/hpo/tuning.hpp"
#include "mlenv/trainer/checkpoint.hpp"
#include "mlenv/trainer/trainer.hpp"

namespace fs = std::filesystem;

namespace mlenv::cli {
namespace {

struct Components {
    std::unique_ptr<data::DataModule> dm;
    std::unique_ptr<models::Model> model;
    std::unique_ptr<methods::Method> method;
};

/// Resolves and constructs everything the run needs. Deliberately called
/// before the run directory exists so a bad configuration leaves no files.
Components build_components(const RunConfig& cfg, const Registry& registry) {
    Components c;
    c.dm = registry.datamodule(cfg.flag("datamodule")).make(cfg);
    auto batch = cfg.int_flag("datamodule_batch_size");
    if (batch < 1)
        throw std::invalid_argument("flag --datamodule_batch_size must be at least 1, got " +
                                    std::to_string(batch));
    c.dm->set_batch_size(static_cast<std::size_t>(batch));
    c.dm->prepare(cfg.flag("data_root"));
    c.dm->split(cfg.real_flag("datamodule_validation_portion"), cfg.seed);
    c.model = registry.model(cfg.flag("model")).make(cfg, c.dm->input_dim(), c.dm->output_dim());
    c.method = registry.method(cfg.flag("method")).make(cfg);
    return c;
}

trainer::TrainerConfig trainer_config(const RunConfig& cfg, const fs::path& run_dir) {
    trainer::TrainerConfig tc;
    if (cfg.has("trainer_epochs")) {
        auto epochs = cfg.int_flag("trainer_epochs");
        if (epochs < 0)
            throw std::invalid_argument("flag --trainer_epochs must be >= 0, got " +
                                        std::to_string(epochs));
        tc.epochs = static_cast<std::size_t>(epochs);
    } else {
        tc.epochs = 0;
    }
    tc.devices = parse_device_list(cfg.flag("trainer_devices"));
    tc.seed = cfg.seed;
    tc.save_path = run_dir.string();
    tc.validate();
    return tc;
}

std::string components_line(const RunConfig& cfg) {
    return "datamodule " + cfg.flag("datamodule") + ", model " + cfg.flag("model") + ", method " +
           cfg.flag("method") + ", seed " + std::to_string(cfg.seed);
}

/// Full training run into an existing run_dir: config.json, fit with
/// per-epoch logging, final test evaluation (skipped for zero-epoch runs),
/// metrics.csv, optional plots. Returns every record written.
std::vector<methods::MetricRecord> train_into_dir(const RunConfig& cfg, Components& c,
                                                  const fs::path& run_dir, std::ostream* echo,
                                                  const char*& stage) {
    stage = "writing the run configuration";
    write_config_json(run_dir, cfg);
    RunLog log(run_dir);
    log.line("train: " + components_line(cfg));

    stage = "training";
    auto tc = trainer_config(cfg, run_dir);
    trainer::Callbacks callbacks;
    callbacks.on_epoch_end = [&](const methods::MetricRecord& record) {
        auto line = metric_summary(record);
        log.line(line);
        if (echo) *echo << line << "\n";
    };
    auto state = trainer::fit(tc, *c.method, *c.model, *c.dm, callbacks);
    auto records = state.history;

    if (tc.epochs > 0) {
        stage = "evaluating the test split";
        auto test_record =
            trainer::evaluate(tc, *c.method, *c.model, *c.dm, c.method->config().eval_transforms);
        log.line(metric_summary(test_record));
        if (echo) *echo << metric_summary(test_record) << "\n";
        records.push_back(test_record);
    }

    stage = "writing metrics";
    write_metrics_csv(run_dir, records);
    if (cfg.has("emit_plots") && cfg.bool_flag("emit_plots")) write_plots_svg(run_dir, records);
    log.line("run complete");
    return records;
}

}  // namespace

int cmd_train(const RunConfig& cfg, const Registry& registry, std::ostream& out,
              std::ostream& err) {
    const char* stage = "building components";
    try {
        auto c = build_components(cfg, registry);
        stage = "creating the run directory";
        auto run_dir = make_run_dir(cfg.flag("save_path"), cfg.command);
        out << "run directory: " << run_dir.string() << "\n";
        train_into_dir(cfg, c, run_dir, &out, stage);
        return 0;
    } catch (const std::exception& e) {
        err << "train failed during " << stage << ": " << e.what() << "\n";
        return 1;
    }
}

int cmd_test(const RunConfig& cfg, const Registry& registry, std::ostream& out,
             std::ostream& err) {
    const char* stage = "building components";
    try {
        auto c = build_components(cfg, registry);

        stage = "loading the checkpoint";
        fs::path checkpoint = cfg.flag("load_path");
        if (fs::is_directory(checkpoint)) checkpoint /= "checkpoint";
        trainer::load_checkpoint(checkpoint, *c.model, c.method->optimizer_state());

        stage = "creating the run directory";
        auto run_dir = make_run_dir(cfg.flag("save_path"), cfg.command);
        out << "run directory: " << run_dir.string() << "\n";

        stage = "writing the run configuration";
        write_config_json(run_dir, cfg);
        RunLog log(run_dir);
        log.line("test: " + components_line(cfg));
        log.line("loaded checkpoint " + checkpoint.string());

        stage = "evaluating the test split";
        auto tc = trainer_config(cfg, run_dir);
        auto record =
            trainer::evaluate(tc, *c.method, *c.model, *c.dm, c.method->config().eval_transforms);
        auto line = metric_summary(record);
        log.line(line);
        out << line << "\n";

        stage = "writing metrics";
        write_metrics_csv(run_dir, {record});
        fs::copy_file(checkpoint, run_dir / "checkpoint");
        log.line("run complete");
        return 0;
    } catch (const std::exception& e) {
        err << "test failed during " << stage << ": " << e.what() << "\n";
        return 1;
    }
}

int cmd_tune(const RunConfig& cfg, const Registry& registry, std::ostream& out,
             std::ostream& err) {
    const char* stage = "parsing the search space";
    try {
        auto space = hpo::parse_search_space(cfg.flag("config_file"));

        hpo::TuningConfig tuning;
        tuning.optimizer = cfg.flag("optimizer");
        tuning.optimization_metric = cfg.flag("optimization_metric");
        if (cfg.has("optimization_mode")) {
            auto mode = cfg.flag("optimization_mode");
            if (mode == "min")
                tuning.mode = hpo::MetricDirection::minimize;
            else if (mode == "max")
                tuning.mode = hpo::MetricDirection::maximize;
            else
                throw std::invalid_argument("flag --optimization_mode expects min or max, got '" +
                                            mode + "'");
        }
        tuning.max_wallclock_time = cfg.real_flag("max_wallclock_time");
        auto samples = cfg.int_flag("num_samples");
        if (samples < 1)
            throw std::invalid_argument("flag --num_samples must be at least 1, got " +
                                        std::to_string(samples));
        tuning.num_samples = static_cast<std::size_t>(samples);
        auto workers = cfg.int_flag("workers");
        if (workers < 1)
            throw std::invalid_argument("flag --workers must be at least 1, got " +
                                        std::to_string(workers));
        tuning.workers = static_cast<std::size_t>(workers);
        tuning.seed = cfg.seed;

        stage = "creating the run directory";
        auto run_dir = make_run_dir(cfg.flag("save_path"), cfg.command);
        out << "run directory: " << run_dir.string() << "\n";
        tuning.save_path = run_dir;

        stage = "writing the run configuration";
        write_config_json(run_dir, cfg);
        RunLog log(run_dir);
        std::mutex log_mutex;
        log.line("tune: " + tuning.optimizer + " over " + cfg.flag("config_file") +
                 ", optimizing " + tuning.optimization_metric);

        stage = "running trials";
        hpo::TrialRunner runner = [&](std::size_t trial_id, const hpo::Assignment& merged,
                                      const fs::path& trial_dir) {
            std::vector<std::string> argv;
            for (const auto& [flag, value] : merged) {
                argv.push_back("--" + flag);
                argv.push_back(value);
            }
            auto trial_cfg = parse_cli("train", argv, registry);
            auto c = build_components(trial_cfg, registry);
            fs::create_directories(trial_dir);
            {
                std::lock_guard<std::mutex> lock(log_mutex);
                log.line("trial " + std::to_string(trial_id) + " started: " +
                         components_line(trial_cfg));
            }
            const char* trial_stage = "";
            return train_into_dir(trial_cfg, c, trial_dir, nullptr, trial_stage);
        };
        auto result = hpo::run_tuning(space, tuning, runner);

        for (const auto& trial : result.trials) {
            std::string line = "trial " + std::to_string(trial.trial_id) + " " +
                               hpo::trial_status_name(trial.status);
            if (trial.objective)
                line += ": " + tuning.optimization_metric + " " + format_double(*trial.objective);
            if (!trial.error.empty()) line += ": " + trial.error;
            log.line(line);
            out << line << "\n";
        }

        const auto& best = result.trials[result.best_trial];
        out << "best trial " << best.trial_id << " with " << tuning.optimization_metric << " "
            << format_double(*best.objective) << "\n";
        for (const auto& [flag, value] : best.assignment)
            out << "  --" << flag << " " << value << "\n";
        out << "leaderboard: " << result.leaderboard_path.string() << "\n";
        log.line("best trial " + std::to_string(best.trial_id));
        log.line("run complete");
        return 0;
    } catch (const std::exception& e) {
        err << "tune failed during " << stage << ": " << e.what() << "\n";
        return 1;
    }
}

int run_command(const std::string& command, const std::vector<std::string>& args,
                const Registry& registry, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_cli(command, args, registry);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (command == "train") return cmd_train(cfg, registry, out, err);
    if (command == "test") return cmd_test(cfg, registry, out, err);
    if (command == "tune") return cmd_tune(cfg, registry, out, err);
    err << "error: unknown command '" << command << "'\n";
    return 2;
}

}  // namespace mlenv::cli

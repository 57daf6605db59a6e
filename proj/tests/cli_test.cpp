#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mlenv/cli/artifacts.hpp"
#include "mlenv/cli/commands.hpp"
#include "mlenv/cli/flags.hpp"
#include "mlenv/cli/parse.hpp"
#include "mlenv/cli/registry.hpp"
#include "mlenv/common/rng.hpp"
#include "mlenv/version.hpp"

using namespace mlenv;
using namespace mlenv::cli;

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mlenv_test_" + std::to_string(Rng(std::random_device{}()).next_u64()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct EnvGuard {
    std::string name;
    std::optional<std::string> previous;
    EnvGuard(std::string n, const char* value) : name(std::move(n)) {
        if (const char* old = std::getenv(name.c_str())) previous = old;
        if (value)
            setenv(name.c_str(), value, 1);
        else
            unsetenv(name.c_str());
    }
    ~EnvGuard() {
        if (previous)
            setenv(name.c_str(), previous->c_str(), 1);
        else
            unsetenv(name.c_str());
    }
};

struct CommandResult {
    int code = 0;
    std::string out;
    std::string err;
};

CommandResult run(const std::string& command, const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CommandResult r;
    r.code = run_command(command, args, builtin_registry(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(bool(is));
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

/// The single run directory created under save_path.
fs::path only_run_dir(const fs::path& save_path) {
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(save_path))
        if (entry.is_directory()) dirs.push_back(entry.path());
    REQUIRE(dirs.size() == 1);
    return dirs.front();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

/// Non-empty metric cells of the first row whose split matches, keyed by
/// the header's column names.
std::map<std::string, double> csv_row(const std::string& text, const std::string& split) {
    std::istringstream is(text);
    std::string line;
    REQUIRE(std::getline(is, line));
    auto header = split_csv_line(line);
    while (std::getline(is, line)) {
        auto cells = split_csv_line(line);
        if (cells.size() < 2 || cells[1] != split) continue;
        std::map<std::string, double> row;
        for (std::size_t i = 2; i < cells.size() && i < header.size(); ++i)
            if (!cells[i].empty()) row[header[i]] = std::stod(cells[i]);
        return row;
    }
    FAIL("no ", split, " row found");
    return {};
}

std::vector<std::string> base_train_args(const fs::path& save_path, const std::string& seed,
                                         const std::string& epochs) {
    return {"--datamodule",
            "synthetic_classification",
            "--datamodule_num_samples",
            "200",
            "--model_hidden_dim",
            "8",
            "--trainer_epochs",
            epochs,
            "--seed",
            seed,
            "--save_path",
            save_path.string()};
}

std::vector<std::string> with_args(std::vector<std::string> args,
                                   const std::vector<std::string>& extra) {
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

}  // namespace

TEST_CASE("the documented training invocation parses with every flag resolved") {
    std::vector<std::string> argv{
        "--method", "base", "--trainer_devices", "[0]", "--datamodule", "mnist",
        "--datamodule_batch_size", "256", "--method_optimizer", "adam",
        "--method_learning_rate", "3e-4", "--regularizer", "l2",
        "--method_regularizer_weight", "1e-5", "--loss", "crossentropy",
        "--save_path", "./experiments", "--trainer_epochs", "3", "--model", "fc",
        "--model_hidden_dim", "32", "--model_depth", "3",
        "--datamodule_validation_portion", "0.1", "--save_path", "./experiments"};
    auto cfg = parse_cli("train", argv, builtin_registry());

    CHECK(cfg.command == "train");
    CHECK(cfg.flag("method") == "base");
    CHECK(cfg.flag("datamodule") == "mnist");
    CHECK(cfg.int_flag("datamodule_batch_size") == 256);
    CHECK(cfg.flag("method_optimizer") == "adam");
    CHECK(cfg.real_flag("method_learning_rate") == 3e-4);
    CHECK(cfg.flag("regularizer") == "l2");
    CHECK(cfg.real_flag("method_regularizer_weight") == 1e-5);
    CHECK(cfg.flag("loss") == "crossentropy");
    CHECK(cfg.int_flag("trainer_epochs") == 3);
    CHECK(cfg.flag("model") == "fc");
    CHECK(cfg.int_flag("model_hidden_dim") == 32);
    CHECK(cfg.int_flag("model_depth") == 3);
    CHECK(cfg.real_flag("datamodule_validation_portion") == 0.1);
    CHECK(cfg.flag("save_path") == "./experiments");
    CHECK(parse_device_list(cfg.flag("trainer_devices")) == std::vector<int>{0});
    CHECK(cfg.seed == 42);
    CHECK(cfg.version == kVersion);
    CHECK(!cfg.timestamp.empty());
}

TEST_CASE("the documented testing invocation resolves the checkpoint path") {
    std::vector<std::string> argv{
        "--method", "base", "--trainer_devices", "[0]", "--datamodule", "mnist",
        "--datamodule_batch_size", "256", "--model", "fc", "--model_hidden_dim", "32",
        "--model_depth", "3", "--load_path", "./experiments/20260819T101500Z-train-a1b2c3",
        "--save_path", "./experiments"};
    auto cfg = parse_cli("test", argv, builtin_registry());
    CHECK(cfg.command == "test");
    CHECK(cfg.flag("load_path") == "./experiments/20260819T101500Z-train-a1b2c3");
    CHECK(cfg.int_flag("model_hidden_dim") == 32);

    // Training-only flags are rejected for the test command.
    CHECK_THROWS_WITH_AS(
        parse_cli("test", with_args(argv, {"--trainer_epochs", "3"}), builtin_registry()),
        doctest::Contains("unknown flag --trainer_epochs"), std::invalid_argument);
}

TEST_CASE("duplicate flags resolve to the last occurrence") {
    auto cfg = parse_cli("train",
                         {"--datamodule", "synthetic_classification", "--save_path", "./a",
                          "--save_path", "./b"},
                         builtin_registry());
    CHECK(cfg.flag("save_path") == "./b");
}

TEST_CASE("flag value errors name the offending flag") {
    const auto& reg = builtin_registry();
    CHECK_THROWS_WITH_AS(
        parse_cli("train",
                  {"--datamodule", "synthetic_classification", "--model_hidden_dim", "banana"},
                  reg),
        doctest::Contains("flag --model_hidden_dim expects an integer"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        parse_cli("train",
                  {"--datamodule", "synthetic_classification", "--method_learning_rate", "fast"},
                  reg),
        doctest::Contains("flag --method_learning_rate expects a number"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        parse_cli("train",
                  {"--datamodule", "synthetic_classification", "--emit_plots", "maybe"}, reg),
        doctest::Contains("flag --emit_plots expects true or false"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        parse_cli("train", {"--datamodule", "synthetic_classification", "--model_depth"}, reg),
        doctest::Contains("flag --model_depth expects a value"), std::invalid_argument);
}

TEST_CASE("unknown flags and missing selections are rejected") {
    const auto& reg = builtin_registry();
    CHECK_THROWS_WITH_AS(
        parse_cli("train", {"--datamodule", "synthetic_classification", "--frobnicate", "9"},
                  reg),
        doctest::Contains("unknown flag --frobnicate"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_cli("train", {"--model", "fc"}, reg),
                         doctest::Contains("missing required flag --datamodule"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_cli("tune", {"--config_file", "space.txt"}, reg),
                         doctest::Contains("missing required flag --max_wallclock_time"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_cli("launch", {}, reg), doctest::Contains("unknown command"),
                         std::invalid_argument);
}

TEST_CASE("registry lookups resolve built-ins and reject near-misses") {
    const auto& reg = builtin_registry();
    CHECK(bool(reg.model("fc").make));
    CHECK(bool(reg.datamodule("mnist").make));
    CHECK_THROWS_WITH_AS(reg.method("bse"), doctest::Contains("unknown method 'bse'; available: base"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        reg.datamodule("nope"),
        doctest::Contains("available: mnist, synthetic_classification, synthetic_regression"),
        std::invalid_argument);
    CHECK(reg.regularizer_names() == std::vector<std::string>{"l1", "l2", "none"});
}

TEST_CASE("custom registrations round-trip and enforce the prefix discipline") {
    auto reg = make_builtin_registry();
    bool made = false;
    ModelEntry entry;
    entry.flags = {{"model_toy_width", FlagType::integer, "4", false, "toy width"}};
    entry.make = [&made](const RunConfig&, std::size_t, std::size_t) {
        made = true;
        return std::unique_ptr<models::Model>();
    };
    reg.register_model("toy", entry);
    reg.model("toy").make(RunConfig{}, 2, 3);
    CHECK(made);

    CHECK_THROWS_WITH_AS(reg.register_model("toy", entry),
                         doctest::Contains("model 'toy' is already registered"),
                         std::invalid_argument);

    ModelEntry undisciplined;
    undisciplined.flags = {{"width", FlagType::integer, "4", false, "bad prefix"}};
    CHECK_THROWS_WITH_AS(reg.register_model("toy2", undisciplined),
                         doctest::Contains("must start with the model_ prefix"),
                         std::invalid_argument);

    // A registered component is selectable by name with no parser changes.
    entry.flags = {{"datamodule_toy_n", FlagType::integer, "7", false, "toy size"}};
    DataModuleEntry dm_entry;
    dm_entry.flags = entry.flags;
    dm_entry.make = [](const RunConfig&) { return std::unique_ptr<data::DataModule>(); };
    reg.register_datamodule("toy_data", dm_entry);
    auto cfg = parse_cli("train", {"--datamodule", "toy_data", "--datamodule_toy_n", "9"}, reg);
    CHECK(cfg.int_flag("datamodule_toy_n") == 9);
}

TEST_CASE("every default is recorded in the parsed config") {
    auto cfg =
        parse_cli("train", {"--datamodule", "synthetic_classification"}, builtin_registry());
    CHECK(cfg.flag("method") == "base");
    CHECK(cfg.flag("model") == "fc");
    CHECK(cfg.flag("loss") == "crossentropy");
    CHECK(cfg.flag("regularizer") == "none");
    CHECK(cfg.flag("method_optimizer") == "adam");
    CHECK(cfg.real_flag("method_learning_rate") == 1e-3);
    CHECK(cfg.int_flag("model_hidden_dim") == 32);
    CHECK(cfg.int_flag("model_depth") == 3);
    CHECK(cfg.flag("model_activation") == "relu");
    CHECK(cfg.int_flag("datamodule_batch_size") == 32);
    CHECK(cfg.int_flag("trainer_epochs") == 1);
    CHECK(cfg.bool_flag("emit_plots") == false);
    CHECK(cfg.seed == 42);
    // The seed lives in its own field, not in the flag map.
    CHECK(!cfg.has("seed"));
    // Optional flags without defaults stay absent until given.
    CHECK(!cfg.has("method_prune_sparsity"));
    CHECK(!cfg.has("method_quantize_bits"));
}

TEST_CASE("device lists parse strictly") {
    CHECK(parse_device_list("[0]") == std::vector<int>{0});
    CHECK(parse_device_list("[0, 1]") == std::vector<int>{0, 1});
    CHECK(parse_device_list("[]").empty());
    CHECK_THROWS_WITH_AS(parse_device_list("0"), doctest::Contains("cannot parse device list"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_device_list("[zero]"),
                         doctest::Contains("cannot parse device list"), std::invalid_argument);
}

TEST_CASE("run configs round-trip through json") {
    auto cfg =
        parse_cli("train",
                  {"--datamodule", "synthetic_classification", "--seed", "9", "--model_depth",
                   "2"},
                  builtin_registry());
    auto restored = RunConfig::from_json_text(cfg.to_json());
    CHECK(restored.command == cfg.command);
    CHECK(restored.flags == cfg.flags);
    CHECK(restored.seed == cfg.seed);
    CHECK(restored.timestamp == cfg.timestamp);
    CHECK(restored.version == cfg.version);

    CHECK_THROWS_WITH_AS(RunConfig::from_json_text("{\"command\": \"train\"}"),
                         doctest::Contains("missing field 'flags'"), std::runtime_error);
    CHECK_THROWS_WITH_AS(RunConfig::load("/no/such/config.json"),
                         doctest::Contains("cannot open config file"), std::runtime_error);
}

TEST_CASE("the data root honors the environment override") {
    {
        EnvGuard guard("MLENV_DATA_ROOT", "/srv/datasets");
        auto cfg =
            parse_cli("train", {"--datamodule", "synthetic_classification"}, builtin_registry());
        CHECK(cfg.flag("data_root") == "/srv/datasets");
        auto explicit_cfg = parse_cli(
            "train", {"--datamodule", "synthetic_classification", "--data_root", "./elsewhere"},
            builtin_registry());
        CHECK(explicit_cfg.flag("data_root") == "./elsewhere");
    }
    EnvGuard guard("MLENV_DATA_ROOT", nullptr);
    auto cfg =
        parse_cli("train", {"--datamodule", "synthetic_classification"}, builtin_registry());
    CHECK(cfg.flag("data_root") == "./data");
}

TEST_CASE("training writes a complete run directory") {
    TempDir tmp;
    auto save = tmp.path / "exp";
    auto r = run("train", base_train_args(save, "11", "2"));
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    auto run_dir = only_run_dir(save);
    CHECK(r.out.find("run directory: ") != std::string::npos);
    CHECK(r.out.find(run_dir.filename().string()) != std::string::npos);

    CHECK(fs::exists(run_dir / "config.json"));
    CHECK(fs::exists(run_dir / "metrics.csv"));
    CHECK(fs::exists(run_dir / "checkpoint"));
    CHECK(fs::exists(run_dir / "log.txt"));
    CHECK(!fs::exists(run_dir / "plots.svg"));

    auto metrics = slurp(run_dir / "metrics.csv");
    CHECK(metrics.rfind("epoch,split,accuracy,loss,nll\n", 0) == 0);
    // 2 train rows, 2 validation rows, 1 test row
    CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 6);
    CHECK(csv_row(metrics, "test").count("nll") == 1);

    auto saved = RunConfig::load(run_dir / "config.json");
    CHECK(saved.command == "train");
    CHECK(saved.seed == 11);

    // The run dir name is <UTC stamp>-<command>-<6 hex chars>.
    auto name = run_dir.filename().string();
    CHECK(name.size() == 16 + 1 + 5 + 1 + 6);
    CHECK(name.find("-train-") == 16);
}

TEST_CASE("zero epochs still writes a valid empty run") {
    TempDir tmp;
    auto save = tmp.path / "exp";
    auto r = run("train", base_train_args(save, "11", "0"));
    REQUIRE(r.code == 0);
    auto run_dir = only_run_dir(save);
    CHECK(slurp(run_dir / "metrics.csv") == "epoch,split\n");
    CHECK(fs::exists(run_dir / "checkpoint"));
}

TEST_CASE("a bad component selection writes nothing") {
    TempDir tmp;
    auto save = tmp.path / "exp";
    auto r = run("train", {"--datamodule", "not_a_module", "--save_path", save.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("unknown datamodule 'not_a_module'") != std::string::npos);
    CHECK(!fs::exists(save));

    // Well-formed flags but a failing stage also leave no run directory.
    auto missing = run("test", with_args(base_train_args(save, "11", "1"),
                                         {"--load_path", (tmp.path / "nowhere").string()}));
    // base_train_args carries --trainer_epochs, which test rejects
    CHECK(missing.code == 2);
    auto r2 = run("test", {"--datamodule", "synthetic_classification", "--load_path",
                           (tmp.path / "nowhere").string(), "--save_path", save.string()});
    CHECK(r2.code == 1);
    CHECK(r2.err.find("test failed during loading the checkpoint") != std::string::npos);
    CHECK(!fs::exists(save));
}

TEST_CASE("replaying a recorded config reproduces metrics byte for byte") {
    TempDir tmp;
    auto first_save = tmp.path / "first";
    REQUIRE(run("train", base_train_args(first_save, "23", "2")).code == 0);
    auto first_dir = only_run_dir(first_save);

    auto second_save = tmp.path / "second";
    auto replay = run("train", {"--from_config", (first_dir / "config.json").string(),
                                "--save_path", second_save.string()});
    CAPTURE(replay.err);
    REQUIRE(replay.code == 0);
    auto second_dir = only_run_dir(second_save);
    CHECK(slurp(second_dir / "metrics.csv") == slurp(first_dir / "metrics.csv"));
    CHECK(slurp(second_dir / "checkpoint") == slurp(first_dir / "checkpoint"));

    // Explicit flags override the replayed file and are recorded as given.
    auto third_save = tmp.path / "third";
    auto overridden = run("train", {"--from_config", (first_dir / "config.json").string(),
                                    "--save_path", third_save.string(), "--seed", "99"});
    REQUIRE(overridden.code == 0);
    auto third = RunConfig::load(only_run_dir(third_save) / "config.json");
    CHECK(third.seed == 99);
    CHECK(slurp(only_run_dir(third_save) / "metrics.csv") != slurp(first_dir / "metrics.csv"));

    // A config can only replay the command that recorded it.
    auto wrong = run("test", {"--from_config", (first_dir / "config.json").string()});
    CHECK(wrong.code == 2);
    CHECK(wrong.err.find("recorded for 'train', not 'test'") != std::string::npos);
}

TEST_CASE("testing a checkpoint reproduces the training run's test metrics") {
    TempDir tmp;
    auto train_save = tmp.path / "train";
    REQUIRE(run("train", base_train_args(train_save, "31", "2")).code == 0);
    auto train_dir = only_run_dir(train_save);
    auto trained = csv_row(slurp(train_dir / "metrics.csv"), "test");

    auto test_save = tmp.path / "test";
    std::vector<std::string> test_args{"--datamodule",
                                       "synthetic_classification",
                                       "--datamodule_num_samples",
                                       "200",
                                       "--model_hidden_dim",
                                       "8",
                                       "--seed",
                                       "31",
                                       "--load_path",
                                       train_dir.string(),
                                       "--save_path",
                                       test_save.string()};
    auto r = run("test", test_args);
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    auto test_dir = only_run_dir(test_save);
    auto tested = csv_row(slurp(test_dir / "metrics.csv"), "test");

    REQUIRE(tested.size() == trained.size());
    for (const auto& [name, value] : trained) {
        REQUIRE(tested.count(name) == 1);
        CHECK(std::abs(tested[name] - value) <= 1e-12);
    }
    // The checkpoint is copied into the test run directory unchanged.
    CHECK(slurp(test_dir / "checkpoint") == slurp(train_dir / "checkpoint"));
    CHECK(r.out.find("test_accuracy") != std::string::npos);

    // Zero sparsity is the identity transform.
    auto identity_save = tmp.path / "identity";
    auto identity_args = test_args;
    identity_args[11] = identity_save.string();
    identity_args.insert(identity_args.end(), {"--method_prune_sparsity", "0"});
    REQUIRE(run("test", identity_args).code == 0);
    auto identical = csv_row(slurp(only_run_dir(identity_save) / "metrics.csv"), "test");
    for (const auto& [name, value] : tested) CHECK(identical.at(name) == value);

    // A model flag mismatching the checkpoint names the bad tensor.
    auto mismatch_args = test_args;
    mismatch_args[5] = "16";
    auto mismatch = run("test", mismatch_args);
    CHECK(mismatch.code == 1);
    CHECK(mismatch.err.find("loading the checkpoint") != std::string::npos);
    CHECK(mismatch.err.find("layer0.weight") != std::string::npos);
}

TEST_CASE("grid tuning writes a full leaderboard and picks the scan winner") {
    TempDir tmp;
    auto space_file = tmp.path / "space.txt";
    {
        std::ofstream os(space_file);
        os << "base:\n"
           << "  datamodule: synthetic_classification\n"
           << "  datamodule_num_samples: 150\n"
           << "  trainer_epochs: 1\n"
           << "search:\n"
           << "  model_hidden_dim: grid[4, 8]\n"
           << "  method_learning_rate: grid[1e-3, 1e-2]\n";
    }
    auto save = tmp.path / "hpo";
    auto r = run("tune", {"--config_file", space_file.string(), "--optimizer", "Grid Search",
                          "--max_wallclock_time", "600", "--optimization_metric",
                          "validation_nll", "--save_path", save.string(), "--seed", "5"});
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    auto run_dir = only_run_dir(save);

    auto board = slurp(run_dir / "leaderboard.csv");
    std::istringstream is(board);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "trial_id,status,objective,method_learning_rate,model_hidden_dim");
    std::size_t rows = 0;
    std::size_t best_id = 0;
    double best_objective = 0.0;
    while (std::getline(is, line)) {
        auto cells = split_csv_line(line);
        REQUIRE(cells.size() == 5);
        CHECK(cells[1] == "completed");
        double objective = std::stod(cells[2]);
        if (rows == 0 || objective < best_objective) {
            best_objective = objective;
            best_id = std::stoul(cells[0]);
        }
        ++rows;
    }
    CHECK(rows == 4);
    CHECK(r.out.find("best trial " + std::to_string(best_id) + " ") != std::string::npos);

    // Each trial keeps a full run directory, seeded as root seed + trial id.
    for (std::size_t i = 0; i < 4; ++i) {
        auto trial_dir = run_dir / ("trial_" + std::to_string(i));
        CHECK(fs::exists(trial_dir / "metrics.csv"));
        auto trial_cfg = RunConfig::load(trial_dir / "config.json");
        CHECK(trial_cfg.seed == 5 + i);
        CHECK(trial_cfg.command == "train");
    }
}

TEST_CASE("parallel trials produce the serial leaderboard") {
    TempDir tmp;
    auto space_file = tmp.path / "space.txt";
    {
        std::ofstream os(space_file);
        os << "base:\n"
           << "  datamodule: synthetic_classification\n"
           << "  datamodule_num_samples: 120\n"
           << "  model_hidden_dim: 4\n"
           << "  trainer_epochs: 1\n"
           << "search:\n"
           << "  method_learning_rate: grid[1e-3, 3e-3, 1e-2]\n";
    }
    std::string serial_board, parallel_board;
    for (const auto& [workers, out] :
         std::initializer_list<std::pair<const char*, std::string*>>{
             {"1", &serial_board}, {"3", &parallel_board}}) {
        auto save = tmp.path / ("hpo_" + std::string(workers));
        auto r = run("tune", {"--config_file", space_file.string(), "--max_wallclock_time",
                              "600", "--save_path", save.string(), "--workers", workers});
        CAPTURE(r.err);
        REQUIRE(r.code == 0);
        *out = slurp(only_run_dir(save) / "leaderboard.csv");
    }
    CHECK(serial_board == parallel_board);
}

TEST_CASE("tuning rejects unusable configurations") {
    TempDir tmp;
    auto space_file = tmp.path / "space.txt";
    {
        std::ofstream os(space_file);
        os << "base:\n"
           << "  datamodule: synthetic_classification\n"
           << "search:\n"
           << "  method_learning_rate: uniform(1e-4, 1e-1)\n";
    }
    auto save = tmp.path / "hpo";
    auto continuous =
        run("tune", {"--config_file", space_file.string(), "--optimizer", "Grid Search",
                     "--max_wallclock_time", "60", "--save_path", save.string()});
    CHECK(continuous.code == 1);
    CHECK(continuous.err.find("cannot enumerate the continuous domain") != std::string::npos);

    auto zero_workers =
        run("tune", {"--config_file", space_file.string(), "--max_wallclock_time", "60",
                     "--workers", "0", "--save_path", save.string()});
    CHECK(zero_workers.code == 1);
    CHECK(zero_workers.err.find("--workers must be at least 1") != std::string::npos);

    auto missing_space = run("tune", {"--config_file", (tmp.path / "gone.txt").string(),
                                      "--max_wallclock_time", "60", "--save_path",
                                      save.string()});
    CHECK(missing_space.code == 1);
    CHECK(missing_space.err.find("tune failed during parsing the search space") !=
          std::string::npos);
}

TEST_CASE("plots are written when requested") {
    TempDir tmp;
    auto save = tmp.path / "exp";
    auto r = run("train", with_args(base_train_args(save, "11", "2"), {"--emit_plots"}));
    REQUIRE(r.code == 0);
    auto svg = slurp(only_run_dir(save) / "plots.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    // one titled panel per metric, one legend entry per split
    CHECK(svg.find(">nll</text>") != std::string::npos);
    CHECK(svg.find(">accuracy</text>") != std::string::npos);
    CHECK(svg.find(">loss</text>") != std::string::npos);
    CHECK(svg.find(">validation</text>") != std::string::npos);
    CHECK(svg.find(">train</text>") != std::string::npos);
}

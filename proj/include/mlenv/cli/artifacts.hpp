#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mlenv/cli/flags.hpp"
#include "mlenv/methods/method.hpp"

namespace mlenv::cli {

/// Creates `<save_path>/<UTC timestamp>-<command>-<6 hex>/`; the random
/// suffix retries until a fresh name is claimed, so concurrent runs in one
/// save_path never collide.
std::filesystem::path make_run_dir(const std::filesystem::path& save_path,
                                   const std::string& command);

void write_config_json(const std::filesystem::path& run_dir, const RunConfig& cfg);

/// Header `epoch,split,<metric names sorted>`; one row per record with the
/// split prefix stripped from the column names. Cells for metrics a split
/// does not report stay empty.
void write_metrics_csv(const std::filesystem::path& run_dir,
                       const std::vector<methods::MetricRecord>& records);

/// Static SVG line charts, one panel per metric, train and validation series.
void write_plots_svg(const std::filesystem::path& run_dir,
                     const std::vector<methods::MetricRecord>& records);

/// Append-only log.txt with UTC-stamped lines.
class RunLog {
public:
    explicit RunLog(const std::filesystem::path& run_dir);
    void line(const std::string& message);

private:
    std::ofstream os_;
};

std::string metric_summary(const methods::MetricRecord& record);

}  // namespace mlenv::cli

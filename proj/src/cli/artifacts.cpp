#include "mlenv/cli/artifacts.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mlenv/common/text.hpp"

namespace mlenv::cli {
namespace {

std::string utc_stamp(const char* format) {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, format, &tm);
    return buffer;
}

std::string hex_suffix(std::mt19937_64& gen) {
    static const char digits[] = "0123456789abcdef";
    std::string s(6, '0');
    std::uint64_t bits = gen();
    for (auto& c : s) {
        c = digits[bits & 0xf];
        bits >>= 4;
    }
    return s;
}

/// "train_loss" with split train -> "loss".
std::string base_metric_name(const methods::MetricRecord& record, const std::string& key) {
    auto prefix = methods::split_name(record.split) + "_";
    return starts_with(key, prefix) ? key.substr(prefix.size()) : key;
}

}  // namespace

std::filesystem::path make_run_dir(const std::filesystem::path& save_path,
                                   const std::string& command) {
    std::filesystem::create_directories(save_path);
    std::mt19937_64 gen(std::random_device{}());
    auto stamp = utc_stamp("%Y%m%dT%H%M%SZ");
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto dir = save_path / (stamp + "-" + command + "-" + hex_suffix(gen));
        std::error_code ec;
        if (std::filesystem::create_directory(dir, ec)) return dir;
        if (ec && ec != std::errc::file_exists)
            throw std::runtime_error("cannot create run directory " + dir.string() + ": " +
                                     ec.message());
    }
    throw std::runtime_error("cannot claim a unique run directory under " + save_path.string());
}

void write_config_json(const std::filesystem::path& run_dir, const RunConfig& cfg) {
    std::ofstream os(run_dir / "config.json");
    if (!os) throw std::runtime_error("cannot write " + (run_dir / "config.json").string());
    os << cfg.to_json();
    os.flush();
    if (!os) throw std::runtime_error("failed writing " + (run_dir / "config.json").string());
}

void write_metrics_csv(const std::filesystem::path& run_dir,
                       const std::vector<methods::MetricRecord>& records) {
    std::set<std::string> columns;
    for (const auto& record : records)
        for (const auto& [key, value] : record.values)
            columns.insert(base_metric_name(record, key));

    auto path = run_dir / "metrics.csv";
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "epoch,split";
    for (const auto& column : columns) os << "," << column;
    os << "\n";
    for (const auto& record : records) {
        os << record.epoch << "," << methods::split_name(record.split);
        for (const auto& column : columns) {
            os << ",";
            auto it = record.values.find(methods::split_name(record.split) + "_" + column);
            if (it != record.values.end()) os << format_double(it->second);
        }
        os << "\n";
    }
    os.flush();
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

void write_plots_svg(const std::filesystem::path& run_dir,
                     const std::vector<methods::MetricRecord>& records) {
    struct Series {
        std::vector<std::pair<double, double>> points;  // epoch, value
    };
    std::map<std::string, std::map<std::string, Series>> panels;  // metric -> split -> series
    for (const auto& record : records) {
        if (record.epoch == 0) continue;
        for (const auto& [key, value] : record.values)
            panels[base_metric_name(record, key)][methods::split_name(record.split)]
                .points.emplace_back(static_cast<double>(record.epoch), value);
    }

    constexpr double width = 480, height = 240, margin = 42;
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c"};
    std::ostringstream body;
    double y_offset = 0;
    for (const auto& [metric, series_by_split] : panels) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        double max_epoch = 1;
        for (const auto& [split, series] : series_by_split)
            for (auto [x, y] : series.points) {
                lo = std::min(lo, y);
                hi = std::max(hi, y);
                max_epoch = std::max(max_epoch, x);
            }
        if (hi == lo) hi = lo + 1;

        auto sx = [&](double e) { return margin + (e - 1) / std::max(1.0, max_epoch - 1) *
                                             (width - 2 * margin); };
        auto sy = [&](double v) {
            return y_offset + height - margin - (v - lo) / (hi - lo) * (height - 2 * margin);
        };
        body << "<rect x=\"" << margin << "\" y=\"" << y_offset + margin << "\" width=\""
             << width - 2 * margin << "\" height=\"" << height - 2 * margin
             << "\" fill=\"none\" stroke=\"#999\"/>\n";
        body << "<text x=\"" << margin << "\" y=\"" << y_offset + margin - 10
             << "\" font-size=\"13\" font-family=\"sans-serif\">" << metric << "</text>\n";
        body << "<text x=\"" << margin << "\" y=\"" << y_offset + height - margin + 16
             << "\" font-size=\"10\" font-family=\"sans-serif\">epochs 1.." << max_epoch
             << ", range " << format_double(lo) << " to " << format_double(hi) << "</text>\n";
        std::size_t color = 0;
        for (const auto& [split, series] : series_by_split) {
            body << "<polyline fill=\"none\" stroke=\"" << palette[color % 3]
                 << "\" stroke-width=\"1.5\" points=\"";
            for (auto [x, y] : series.points) body << sx(x) << "," << sy(y) << " ";
            body << "\"/>\n";
            body << "<text x=\"" << width - margin + 4 << "\" y=\""
                 << y_offset + margin + 14 * static_cast<double>(color + 1)
                 << "\" font-size=\"10\" font-family=\"sans-serif\" fill=\""
                 << palette[color % 3] << "\">" << split << "</text>\n";
            ++color;
        }
        y_offset += height;
    }

    auto path = run_dir / "plots.svg";
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + 70 << "\" height=\""
       << std::max(y_offset, 1.0) << "\">\n"
       << body.str() << "</svg>\n";
}

RunLog::RunLog(const std::filesystem::path& run_dir) : os_(run_dir / "log.txt", std::ios::app) {
    if (!os_) throw std::runtime_error("cannot open " + (run_dir / "log.txt").string());
}

void RunLog::line(const std::string& message) {
    os_ << "[" << utc_stamp("%Y-%m-%dT%H:%M:%SZ") << "] " << message << "\n";
    os_.flush();
}

std::string metric_summary(const methods::MetricRecord& record) {
    std::ostringstream os;
    os << "epoch " << record.epoch << " " << methods::split_name(record.split);
    for (const auto& [key, value] : record.values) os << " " << key << " " << format_double(value);
    return os.str();
}

}  // namespace mlenv::cli

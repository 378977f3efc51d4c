#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cli {

struct GenDataOpts {
    std::string config_path;
    std::string mode;     // empty: use the config's env.mode as-is
    std::string out_path; // empty: <output_dir>/dataset_<mode>.bin
};

struct TrainOpts {
    std::string config_path;
    std::string dataset_path;
    std::size_t members = 0; // 0: use the config's ensemble.members
    std::string out_dir;     // empty: <output_dir>/ensemble_<mode>
};

struct ReportOpts {
    std::string config_path;
    std::string manifest_det;               // deterministic-trained ensemble
    std::string manifest_stoch;             // stochastic-trained ensemble
    std::vector<std::string> conditions;    // empty: all three
    std::string out_dir;                    // empty: <output_dir>
    bool verbose = false;                   // per-member probabilities
};

struct ForecastOpts {
    std::string config_path;
    std::string manifest;
    std::string s0;           // 8 comma-separated numbers, or canonical[-ood]
    std::string actions_path; // text file, one "a0 a1" pair per line
    double radius = 0.0;      // 0: use the config's success.radius
    std::size_t deadline = 0; // 0: use the config's success.deadline
    std::string label = "custom";
    std::string out_path; // empty: print the report to stdout
};

// Each command returns the process exit code (0 on success) and throws
// ConfigError for usage problems (exit 2) or std::runtime_error for
// runtime failures (exit 1); main() does the mapping.
int cmd_gen_data(const GenDataOpts& opts);
int cmd_train(const TrainOpts& opts);
int cmd_report(const ReportOpts& opts);
int cmd_forecast(const ForecastOpts& opts);

} // namespace cli

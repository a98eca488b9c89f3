#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aprobe/inference.hpp"

namespace aprobe {

enum class OutputFormat { csv, json };

struct SweepSpec {
    std::string parameter;  // np, epsilon, lambda, gamma, delta, nbar
    std::vector<double> values;
};

struct EstimateSpec {
    int m_per_repeat = 1000;
    int repeats = 200;
    std::pair<double, double> bracket{0.0, 0.0};  // 0,0 = strength/10 .. strength*10
    int rounds = 5;
    int m_per_round = 20000;
};

struct QfiTableSpec {
    std::vector<double> lambdas;
    std::vector<double> nps;
    std::vector<double> ms;
};

struct ExperimentConfig {
    ProtocolParams params;
    MeasurementConfig measurement;
    std::vector<Kind> kinds{Kind::quartic, Kind::cubic};
    SweepSpec sweep;
    EstimateSpec estimate;
    QfiTableSpec qfi_table;
    long long max_joint_dim = 1600;
    std::string out_path;
    OutputFormat format = OutputFormat::csv;
    uint64_t seed = 1;
    int threads = 1;
    bool optimize_phi = false;  // ratio-curve optimizes unless phi pinned
};

/// Parses and validates the single-document JSON config.
ExperimentConfig parse_config(const std::string& json_text);

/// Validity-flag report for --check (no computation is run).
std::string check_report(const ExperimentConfig& cfg);

/// Dispatches one of: ratio-curve, validate-map, qfi-table, estimate, losses.
/// Writes the result table to out_path (overriding cfg.out_path when set).
void run_command(const std::string& command, const ExperimentConfig& cfg,
                 const std::string& out_path);

const std::vector<std::string>& command_names();

}  // namespace aprobe

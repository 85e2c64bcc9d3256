#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metasyn/crossbar.hpp"
#include "metasyn/network.hpp"

namespace metasyn {

enum class ExperimentVariant { CompareModels, SweepSize, SweepCF };

std::string to_string(ExperimentVariant v);

// Everything the hardware path needs beyond the network config.
struct HardwareSettings {
    ComparatorConfig comparator;
    NoiseModel noise{0.25, true, 0};
    CrossbarOptions options;

    friend bool operator==(const HardwareSettings&, const HardwareSettings&) = default;
};

struct ExperimentSpec {
    NetworkConfig base;
    ExperimentVariant variant = ExperimentVariant::CompareModels;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::size_t n_patterns = 100;
    double mean_threshold = 0.75;
    bool software = true;   // run the behavioral network
    bool hardware = false;  // also run the crossbar (binary and multistate only)
    std::vector<SynapseModel> models{SynapseModel::Binary, SynapseModel::Multistate,
                                     SynapseModel::GradientDescent};
    std::vector<std::size_t> size_grid{32, 64, 128, 256};
    std::vector<double> c_grid{0.1, 0.25, 0.5, 0.75, 0.9};
    std::vector<double> f_grid{0.1, 0.25, 0.5, 0.75, 0.9};
    HardwareSettings hw;
    unsigned workers = 1;

    // Throws ConfigError.
    void validate() const;

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

// Smallest 1-based pattern index t with mean[t] < threshold.
std::optional<std::size_t> threshold_crossing(const AccuracyTrace& trace, double threshold);

struct RunRecord {
    std::string label;  // e.g. "multistate", "binary_hw", "multistate_n64"
    SynapseModel model = SynapseModel::Multistate;
    bool hardware = false;
    std::uint64_t seed = 0;
    AccuracyTrace trace;
    std::optional<std::size_t> crossing;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// Per-label aggregate over seeds. Runs that never cross are counted at
// n_patterns + 1 in the crossing statistics.
struct LabelSummary {
    std::string label;
    std::size_t n_seeds = 0;
    std::size_t censored = 0;
    double crossing_mean = 0.0;
    double crossing_std = 0.0;
    std::optional<double> ratio_vs_binary;  // against the binary label on the same path
    double learning_final = 0.0;   // seed mean of learning[n_patterns]
    double mean_final = 0.0;       // seed mean of mean[n_patterns]
    std::vector<double> mean_curve;
    std::vector<double> mean_curve_std;
    std::vector<double> learning_curve;

    friend bool operator==(const LabelSummary&, const LabelSummary&) = default;
};

struct GridCell {
    std::size_t size = 0;  // square network side for size sweeps
    double connectivity = 0.0;
    double activity = 0.0;
    bool valid = false;
    double learning_final = 0.0;
    double mean_final = 0.0;

    friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct SweepResult {
    ExperimentVariant variant = ExperimentVariant::CompareModels;
    std::size_t n_patterns = 0;
    std::vector<std::string> axes;
    std::vector<RunRecord> runs;
    std::vector<LabelSummary> summaries;
    std::vector<GridCell> cells;  // row-major over axes; empty for comparisons

    const LabelSummary* summary(const std::string& label) const;

    friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// One lifetime run on either path.
AccuracyTrace run_single(const NetworkConfig& cfg, bool hardware, std::size_t n_patterns,
                         const HardwareSettings& hw);

SweepResult run_comparison(const ExperimentSpec& spec);
SweepResult sweep_size(const ExperimentSpec& spec);
SweepResult sweep_cf(const ExperimentSpec& spec);

// Dispatch on spec.variant.
SweepResult run_experiment(const ExperimentSpec& spec);

} // namespace metasyn

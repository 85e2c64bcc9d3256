#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "metasyn/random.hpp"
#include "metasyn/synapse.hpp"

namespace metasyn {

using BitVector = std::vector<std::uint8_t>;

enum class SynapseModel { Binary, Multistate, GradientDescent };

std::string to_string(SynapseModel m);
SynapseModel synapse_model_from_string(const std::string& name);

struct NetworkConfig {
    std::size_t n_in = 128;
    std::size_t n_out = 128;
    double connectivity = 0.25;  // C
    double activity = 0.25;      // f, applied to inputs and targets
    int n_levels = 3;
    SynapseModel model = SynapseModel::Multistate;
    std::uint64_t seed = 0;
    int updates_per_pattern = 1;
    double transition_probability = 1.0;
    double gd_learning_rate = 0.1;
    double gd_binarize_threshold = 0.5;

    // Throws ConfigError.
    void validate() const;

    std::size_t active_inputs() const;
    std::size_t active_outputs() const;
    std::size_t connected_count() const;
    // Firing threshold N_in * C * f / 2.
    double threshold() const { return static_cast<double>(n_in) * connectivity * activity / 2.0; }
    // Levels actually used by the synapses (binary synapses have one).
    int effective_levels() const { return model == SynapseModel::Multistate ? n_levels : 1; }

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct Pattern {
    BitVector input;
    BitVector target;
};

// Each vector has exactly round(f * n_bits) ones. Throws ConfigError.
std::vector<BitVector> generate_patterns(std::size_t n_bits, double f, std::size_t count,
                                         std::uint64_t seed);
std::vector<BitVector> generate_patterns(std::size_t n_bits, double f, std::size_t count, Rng& rng);

// Inputs and targets for a lifetime run, drawn from independent streams of cfg.seed.
std::vector<Pattern> make_patterns(const NetworkConfig& cfg, std::size_t count);

/// Random wiring and initial efficacies shared by the behavioral network
/// and the crossbar, so both start from the same synapses for a given seed.
struct NetworkSetup {
    BitVector mask;          // n_in x n_out, row-major
    BitVector initial_high;  // efficacy of connected synapses at eta = 0
    std::vector<double> initial_weights;  // gradient-descent baseline
};

NetworkSetup make_setup(const NetworkConfig& cfg);

struct BehavioralNetwork {
    NetworkConfig cfg;
    BitVector mask;
    std::vector<MetaState> states;
    std::vector<GDSynapse> weights;  // only for SynapseModel::GradientDescent
    double threshold = 0.0;
    Rng transition_rng;

    std::size_t index(std::size_t row, std::size_t col) const { return row * cfg.n_out + col; }
    int efficacy(std::size_t row, std::size_t col) const;
};

BehavioralNetwork init_network(const NetworkConfig& cfg);

// output_j = 1 iff the number of active connected High synapses exceeds theta.
BitVector forward(const BehavioralNetwork& net, const BitVector& input);

// Called for every synapse update with the states before and after.
using UpdateObserver =
    std::function<void(std::size_t row, std::size_t col, const MetaState& before, const MetaState& after)>;

void train_on_pattern(BehavioralNetwork& net, const Pattern& pat, const UpdateObserver& observer = {});

double bitwise_accuracy(const BitVector& output, const BitVector& target);

struct AccuracyTrace {
    std::vector<double> learning;
    std::vector<double> mean;

    std::size_t size() const noexcept { return learning.size(); }
    friend bool operator==(const AccuracyTrace&, const AccuracyTrace&) = default;
};

AccuracyTrace run_lifetime(const NetworkConfig& cfg, std::size_t n_patterns);

} // namespace metasyn

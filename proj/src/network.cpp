#include "metasyn/network.hpp"

#include <cmath>

#include "metasyn/error.hpp"

namespace metasyn {

namespace {

std::size_t rounded_count(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

// Fraction of the stored patterns the current network reproduces, averaged.
template <typename Forward>
double mean_accuracy(const std::vector<Pattern>& patterns, std::size_t upto, Forward&& fwd) {
    double sum = 0.0;
    for (std::size_t s = 0; s < upto; ++s) {
        sum += bitwise_accuracy(fwd(patterns[s].input), patterns[s].target);
    }
    return sum / static_cast<double>(upto);
}

} // namespace

std::string to_string(SynapseModel m) {
    switch (m) {
    case SynapseModel::Binary:
        return "binary";
    case SynapseModel::Multistate:
        return "multistate";
    case SynapseModel::GradientDescent:
        return "gd";
    }
    return "unknown";
}

SynapseModel synapse_model_from_string(const std::string& name) {
    if (name == "binary") return SynapseModel::Binary;
    if (name == "multistate") return SynapseModel::Multistate;
    if (name == "gd" || name == "gradient") return SynapseModel::GradientDescent;
    throw ConfigError("unknown synapse model '" + name + "'");
}

void NetworkConfig::validate() const {
    if (n_in == 0 || n_out == 0) {
        throw ConfigError("network dimensions must be positive");
    }
    if (!(connectivity > 0.0 && connectivity <= 1.0)) {
        throw ConfigError("connectivity must lie in (0, 1]");
    }
    if (!(activity > 0.0 && activity < 1.0)) {
        throw ConfigError("activity must lie in (0, 1)");
    }
    const std::size_t k_in = active_inputs();
    const std::size_t k_out = active_outputs();
    if (k_in < 1 || k_in > n_in || k_out < 1 || k_out > n_out) {
        throw ConfigError("activity gives no active bits for this network size");
    }
    if (connected_count() < 1) {
        throw ConfigError("connectivity leaves no connected synapse");
    }
    if (n_levels < 1) {
        throw ConfigError("n_levels must be >= 1");
    }
    if (updates_per_pattern < 1) {
        throw ConfigError("updates_per_pattern must be >= 1");
    }
    if (!(transition_probability > 0.0 && transition_probability <= 1.0)) {
        throw ConfigError("transition_probability must lie in (0, 1]");
    }
    if (!(gd_learning_rate > 0.0)) {
        throw ConfigError("gd_learning_rate must be positive");
    }
}

std::size_t NetworkConfig::active_inputs() const { return rounded_count(activity, n_in); }
std::size_t NetworkConfig::active_outputs() const { return rounded_count(activity, n_out); }
std::size_t NetworkConfig::connected_count() const { return rounded_count(connectivity, n_in * n_out); }

std::vector<BitVector> generate_patterns(std::size_t n_bits, double f, std::size_t count, Rng& rng) {
    if (!(f > 0.0 && f <= 1.0)) {
        throw ConfigError("pattern activity must lie in (0, 1]");
    }
    const std::size_t ones = rounded_count(f, n_bits);
    if (ones < 1 || ones > n_bits) {
        throw ConfigError("pattern activity gives " + std::to_string(ones) + " active bits out of " +
                          std::to_string(n_bits));
    }
    std::vector<BitVector> out;
    out.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        BitVector v(n_bits, 0);
        for (std::size_t idx : sample_without_replacement(n_bits, ones, rng)) {
            v[idx] = 1;
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<BitVector> generate_patterns(std::size_t n_bits, double f, std::size_t count,
                                         std::uint64_t seed) {
    Rng rng = make_rng(seed, Stream::Inputs);
    return generate_patterns(n_bits, f, count, rng);
}

std::vector<Pattern> make_patterns(const NetworkConfig& cfg, std::size_t count) {
    Rng in_rng = make_rng(cfg.seed, Stream::Inputs);
    Rng out_rng = make_rng(cfg.seed, Stream::Targets);
    auto inputs = generate_patterns(cfg.n_in, cfg.activity, count, in_rng);
    auto targets = generate_patterns(cfg.n_out, cfg.activity, count, out_rng);
    std::vector<Pattern> patterns(count);
    for (std::size_t t = 0; t < count; ++t) {
        patterns[t] = {std::move(inputs[t]), std::move(targets[t])};
    }
    return patterns;
}

NetworkSetup make_setup(const NetworkConfig& cfg) {
    cfg.validate();
    const std::size_t total = cfg.n_in * cfg.n_out;
    NetworkSetup setup;
    setup.mask.assign(total, 0);
    setup.initial_high.assign(total, 0);
    setup.initial_weights.assign(total, 0.0);

    Rng mask_rng = make_rng(cfg.seed, Stream::Mask);
    for (std::size_t idx : sample_without_replacement(total, cfg.connected_count(), mask_rng)) {
        setup.mask[idx] = 1;
    }
    // Both draws are made for every connected synapse regardless of model so
    // the wiring and efficacies do not depend on which model is trained.
    Rng init_rng = make_rng(cfg.seed, Stream::Initial);
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < total; ++i) {
        if (setup.mask[i]) {
            setup.initial_high[i] = coin(init_rng) ? 1 : 0;
            setup.initial_weights[i] = unit(init_rng);
        }
    }
    return setup;
}

int BehavioralNetwork::efficacy(std::size_t row, std::size_t col) const {
    const std::size_t k = index(row, col);
    if (!mask[k]) {
        return 0;
    }
    if (cfg.model == SynapseModel::GradientDescent) {
        return weights[k].efficacy();
    }
    return efficacy_of(states[k]);
}

BehavioralNetwork init_network(const NetworkConfig& cfg) {
    NetworkSetup setup = make_setup(cfg);
    BehavioralNetwork net;
    net.cfg = cfg;
    net.mask = std::move(setup.mask);
    net.threshold = cfg.threshold();
    net.transition_rng = make_rng(cfg.seed, Stream::Transitions);

    const int levels = cfg.effective_levels();
    net.states.resize(net.mask.size());
    for (std::size_t k = 0; k < net.mask.size(); ++k) {
        net.states[k].n_levels = levels;
        net.states[k].metalevel = 0;
        net.states[k].efficacy = setup.initial_high[k] ? Efficacy::High : Efficacy::Low;
    }
    if (cfg.model == SynapseModel::GradientDescent) {
        net.weights.resize(net.mask.size());
        for (std::size_t k = 0; k < net.mask.size(); ++k) {
            net.weights[k] = GDSynapse{setup.initial_weights[k], cfg.gd_binarize_threshold,
                                       cfg.gd_learning_rate};
        }
    }
    return net;
}

BitVector forward(const BehavioralNetwork& net, const BitVector& input) {
    const std::size_t n_in = net.cfg.n_in;
    const std::size_t n_out = net.cfg.n_out;
    if (input.size() != n_in) {
        throw ContractViolation("forward: input length " + std::to_string(input.size()) +
                                " != " + std::to_string(n_in));
    }
    std::vector<int> drive(n_out, 0);
    for (std::size_t i = 0; i < n_in; ++i) {
        if (!input[i]) continue;
        for (std::size_t j = 0; j < n_out; ++j) {
            drive[j] += net.efficacy(i, j);
        }
    }
    BitVector out(n_out, 0);
    for (std::size_t j = 0; j < n_out; ++j) {
        out[j] = static_cast<double>(drive[j]) > net.threshold ? 1 : 0;
    }
    return out;
}

void train_on_pattern(BehavioralNetwork& net, const Pattern& pat, const UpdateObserver& observer) {
    const auto& cfg = net.cfg;
    if (pat.input.size() != cfg.n_in || pat.target.size() != cfg.n_out) {
        throw ContractViolation("train_on_pattern: pattern does not match network size");
    }
    const double q = cfg.transition_probability;

    for (int rep = 0; rep < cfg.updates_per_pattern; ++rep) {
        const BitVector out = forward(net, pat.input);
        std::vector<int> error(cfg.n_out);
        bool any = false;
        for (std::size_t j = 0; j < cfg.n_out; ++j) {
            error[j] = static_cast<int>(pat.target[j]) - static_cast<int>(out[j]);
            any = any || error[j] != 0;
        }
        if (!any) {
            return;
        }

        for (std::size_t i = 0; i < cfg.n_in; ++i) {
            if (!pat.input[i]) continue;
            for (std::size_t j = 0; j < cfg.n_out; ++j) {
                const std::size_t k = net.index(i, j);
                if (error[j] == 0 || !net.mask[k]) continue;

                if (cfg.model == SynapseModel::GradientDescent) {
                    net.weights[k] = gd_step(net.weights[k], 1, error[j]);
                    continue;
                }
                const auto dir = error[j] > 0 ? UpdateDirection::Potentiate : UpdateDirection::Depress;
                const MetaState before = net.states[k];
                MetaState after;
                if (cfg.model == SynapseModel::Binary) {
                    after = binary_transition(before, dir);
                } else {
                    after = transition(before, dir, q, net.transition_rng);
                }
                net.states[k] = after;
                if (observer) {
                    observer(i, j, before, after);
                }
            }
        }
    }
}

double bitwise_accuracy(const BitVector& output, const BitVector& target) {
    if (output.size() != target.size() || output.empty()) {
        throw ContractViolation("bitwise_accuracy: length mismatch");
    }
    std::size_t hits = 0;
    for (std::size_t j = 0; j < output.size(); ++j) {
        hits += output[j] == target[j] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(output.size());
}

AccuracyTrace run_lifetime(const NetworkConfig& cfg, std::size_t n_patterns) {
    BehavioralNetwork net = init_network(cfg);
    const std::vector<Pattern> patterns = make_patterns(cfg, n_patterns);
    auto fwd = [&net](const BitVector& in) { return forward(net, in); };

    AccuracyTrace trace;
    trace.learning.reserve(n_patterns);
    trace.mean.reserve(n_patterns);
    for (std::size_t t = 0; t < n_patterns; ++t) {
        train_on_pattern(net, patterns[t]);
        trace.learning.push_back(bitwise_accuracy(fwd(patterns[t].input), patterns[t].target));
        trace.mean.push_back(mean_accuracy(patterns, t + 1, fwd));
    }
    return trace;
}

} // namespace metasyn

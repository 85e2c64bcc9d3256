#pragma once

#include <cstdint>
#include <string>

#include "metasyn/random.hpp"

namespace metasyn {

enum class Efficacy : std::uint8_t { Low = 0, High = 1 };

enum class UpdateDirection : std::uint8_t { Potentiate, Depress };

/// Binary efficacy plus a metalevel in a serial chain of metastates.
///
/// Metalevel 0 is the most plastic state and the only one from which the
/// efficacy can flip. Deeper metalevels only move one step toward (or away
/// from) level 0. A synapse with n levels has 2n-1 forgetting timescales.
struct MetaState {
    Efficacy efficacy = Efficacy::Low;
    int metalevel = 0;
    int n_levels = 1;

    bool valid() const noexcept {
        return n_levels >= 1 && metalevel >= 0 && metalevel < n_levels;
    }

    // Position on the 2n-state chain: Low/n-1 = 0 ... Low/0 = n-1,
    // High/0 = n ... High/n-1 = 2n-1.
    int chain_index() const noexcept {
        return efficacy == Efficacy::High ? n_levels + metalevel : n_levels - 1 - metalevel;
    }

    static MetaState from_chain_index(int index, int n_levels);

    friend bool operator==(const MetaState&, const MetaState&) = default;
};

// Short label such as "H0" or "L2".
std::string to_string(const MetaState& s);

struct TransitionPolicy {
    double transition_probability = 1.0;
    std::uint64_t rng_seed = 0;
};

// Always fires. Throws ContractViolation for an invalid state.
MetaState transition(MetaState state, UpdateDirection dir);

// Fires with probability q (Bernoulli draw from rng); q == 1 never draws.
MetaState transition(MetaState state, UpdateDirection dir, double q, Rng& rng);

// Per-call generator seeded from policy.rng_seed.
MetaState transition(MetaState state, UpdateDirection dir, const TransitionPolicy& policy);

// Plain binary synapse: Potentiate -> High, Depress -> Low, metalevel 0.
MetaState binary_transition(MetaState state, UpdateDirection dir);

inline int efficacy_of(const MetaState& s) noexcept {
    return s.efficacy == Efficacy::High ? 1 : 0;
}

// Continuous-weight baseline trained by gradient steps and thresholded
// for the forward pass.
struct GDSynapse {
    double weight = 0.5;
    double binarize_threshold = 0.5;
    double learning_rate = 0.1;

    int efficacy() const noexcept { return weight > binarize_threshold ? 1 : 0; }
};

GDSynapse gd_step(GDSynapse s, int presyn_active, int error);

} // namespace metasyn

#include "metasyn/synapse.hpp"

#include <algorithm>

#include "metasyn/error.hpp"

namespace metasyn {

MetaState MetaState::from_chain_index(int index, int n_levels) {
    if (n_levels < 1 || index < 0 || index >= 2 * n_levels) {
        throw ContractViolation("MetaState::from_chain_index: index out of range");
    }
    MetaState s;
    s.n_levels = n_levels;
    if (index >= n_levels) {
        s.efficacy = Efficacy::High;
        s.metalevel = index - n_levels;
    } else {
        s.efficacy = Efficacy::Low;
        s.metalevel = n_levels - 1 - index;
    }
    return s;
}

std::string to_string(const MetaState& s) {
    return (s.efficacy == Efficacy::High ? "H" : "L") + std::to_string(s.metalevel);
}

MetaState transition(MetaState state, UpdateDirection dir) {
    if (!state.valid()) {
        throw ContractViolation("transition: metalevel " + std::to_string(state.metalevel) +
                                " outside [0, " + std::to_string(state.n_levels) + ")");
    }
    const int deepest = state.n_levels - 1;
    const Efficacy toward = dir == UpdateDirection::Potentiate ? Efficacy::High : Efficacy::Low;

    if (state.efficacy == toward) {
        // Same side: sink one level deeper, saturating at the end of the chain.
        state.metalevel = std::min(state.metalevel + 1, deepest);
    } else if (state.metalevel > 0) {
        state.metalevel -= 1;
    } else {
        state.efficacy = toward;
    }
    return state;
}

MetaState transition(MetaState state, UpdateDirection dir, double q, Rng& rng) {
    if (!(q > 0.0 && q <= 1.0)) {
        throw ContractViolation("transition: probability must lie in (0, 1]");
    }
    if (q < 1.0) {
        std::bernoulli_distribution fire(q);
        if (!fire(rng)) {
            if (!state.valid()) {
                throw ContractViolation("transition: invalid metastate");
            }
            return state;
        }
    }
    return transition(state, dir);
}

MetaState transition(MetaState state, UpdateDirection dir, const TransitionPolicy& policy) {
    Rng rng = make_rng(policy.rng_seed, Stream::Transitions);
    return transition(state, dir, policy.transition_probability, rng);
}

MetaState binary_transition(MetaState state, UpdateDirection dir) {
    state.efficacy = dir == UpdateDirection::Potentiate ? Efficacy::High : Efficacy::Low;
    state.metalevel = 0;
    return state;
}

GDSynapse gd_step(GDSynapse s, int presyn_active, int error) {
    s.weight = std::clamp(s.weight + s.learning_rate * presyn_active * error, 0.0, 1.0);
    return s;
}

} // namespace metasyn

#include "metasyn/device.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "metasyn/csv.hpp"
#include "metasyn/error.hpp"

namespace metasyn {

namespace {

// Voltage-dependent factor of the state equation (1/s), zero inside the
// threshold band. The window factor is applied separately.
double drive_rate(double v, const DeviceParams& p) {
    if (v > p.v_off) {
        return p.k_off * std::pow(v / p.v_off - 1.0, p.alpha_off) / p.thickness;
    }
    if (v < p.v_on) {
        return p.k_on * std::pow(v / p.v_on - 1.0, p.alpha_on) / p.thickness;
    }
    return 0.0;
}

double euler_step(double x, double rate, double dt, const DeviceParams& params) {
    return std::clamp(x + dt * (rate * window(x, params)), 0.0, 1.0);
}

double pulse_train_end(double x, int pulses, const PulseSpec& pulse, const DeviceParams& params) {
    const NoiseModel quiet{};
    for (int i = 0; i < pulses; ++i) {
        x = apply_pulse(DeviceState{x}, pulse, params, quiet).x;
    }
    return x;
}

} // namespace

void DeviceParams::validate() const {
    if (!(g_on > g_off && g_off >= 0.0)) {
        throw ContractViolation("DeviceParams: require g_on > g_off >= 0");
    }
    if (!(v_on < 0.0 && v_off > 0.0)) {
        throw ContractViolation("DeviceParams: require v_on < 0 < v_off");
    }
    if (!(k_on < 0.0 && k_off > 0.0)) {
        throw ContractViolation("DeviceParams: require k_on < 0 < k_off");
    }
    if (!(thickness > 0.0)) {
        throw ContractViolation("DeviceParams: thickness must be positive");
    }
    if (p < 1) {
        throw ContractViolation("DeviceParams: window exponent p must be >= 1");
    }
}

double window(double x, const DeviceParams& params) {
    const double u = x - params.delta;
    double up = u;
    for (int i = 1; i < params.p; ++i) up *= u;
    return (1.0 - 4.0 * u * u) / std::exp(params.tau * up);
}

double state_derivative(double x, double v, const DeviceParams& params) {
    const double rate = drive_rate(v, params);
    if (rate == 0.0) {
        return 0.0;
    }
    return rate * window(x, params);
}

double conductance(double x, const DeviceParams& params) {
    return x * params.g_on + (1.0 - x) * params.g_off;
}

DeviceState apply_pulse(DeviceState state, const PulseSpec& pulse, const DeviceParams& params,
                        const NoiseModel& noise) {
    Rng rng = make_rng(noise.rng_seed, Stream::DeviceNoise);
    return apply_pulse(state, pulse, params, noise, rng);
}

DeviceState apply_pulse(DeviceState state, const PulseSpec& pulse, const DeviceParams& params,
                        const NoiseModel& noise, Rng& rng) {
    if (!(pulse.duration > 0.0) || !(pulse.dt > 0.0) || pulse.dt > pulse.duration) {
        throw ContractViolation("apply_pulse: require 0 < dt <= duration");
    }
    const double rate = drive_rate(pulse.amplitude, params);
    if (rate == 0.0) {
        return state;
    }

    const auto full_steps = static_cast<long>(std::floor(pulse.duration / pulse.dt + 1e-9));
    const double tail = pulse.duration - static_cast<double>(full_steps) * pulse.dt;

    double x = state.x;
    if (noise.enabled && noise.sigma > 0.0) {
        std::normal_distribution<double> gauss(0.0, noise.sigma);
        auto noisy_step = [&](double h) {
            const double dx = h * (rate * window(x, params));
            x = std::clamp(x + dx * (1.0 + gauss(rng)), 0.0, 1.0);
        };
        for (long i = 0; i < full_steps; ++i) {
            noisy_step(pulse.dt);
        }
        if (tail > 1e-12 * pulse.duration) {
            noisy_step(tail);
        }
    } else {
        for (long i = 0; i < full_steps; ++i) {
            x = euler_step(x, rate, pulse.dt, params);
        }
        if (tail > 1e-12 * pulse.duration) {
            x = euler_step(x, rate, tail, params);
        }
    }
    return DeviceState{x};
}

MetastateTable calibrate_metastate_table(const DeviceParams& params, int n_levels,
                                         const ProgrammingScheme& scheme) {
    params.validate();
    if (n_levels < 1) {
        throw ContractViolation("calibrate_metastate_table: n_levels must be >= 1");
    }
    const PulseSpec up = scheme.pulse(UpdateDirection::Potentiate);
    if (drive_rate(up.amplitude, params) == 0.0) {
        throw CalibrationError("programming amplitude does not exceed the SET threshold");
    }

    // Find the train start so plateau[n-1] + plateau[n] == 2*delta. The
    // pulse map is monotone, so bisection on the start point is enough.
    const double centre = 2.0 * params.delta;
    auto imbalance = [&](double start) {
        const double low0 = pulse_train_end(start, n_levels - 1, up, params);
        const double high0 = pulse_train_end(low0, 1, up, params);
        return low0 + high0 - centre;
    };
    double lo = 1e-12;
    double hi = params.delta;
    if (!(imbalance(lo) < 0.0 && imbalance(hi) > 0.0)) {
        throw CalibrationError("cannot centre the metastate ladder on the window");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (imbalance(mid) < 0.0 ? lo : hi) = mid;
    }

    MetastateTable table;
    table.n_levels = n_levels;
    double x = 0.5 * (lo + hi);
    table.plateaus.push_back(x);
    for (int i = 1; i < 2 * n_levels; ++i) {
        x = pulse_train_end(x, 1, up, params);
        table.plateaus.push_back(x);
    }

    for (std::size_t i = 1; i < table.plateaus.size(); ++i) {
        if (!(table.plateaus[i] > table.plateaus[i - 1])) {
            throw CalibrationError("metastate plateaus are not strictly increasing at index " +
                                   std::to_string(i));
        }
    }
    const auto n = static_cast<std::size_t>(n_levels);
    const double ratio =
        conductance(table.plateaus[n], params) / conductance(table.plateaus[n - 1], params);
    if (!(ratio >= 3.5 && ratio <= 5.5)) {
        throw CalibrationError("High/Low conductance ratio at metalevel 0 is " + format_number(ratio) +
                               ", outside [3.5, 5.5]; retune k_on/k_off or tau");
    }
    return table;
}

MetaState decode_metastate(DeviceState state, const MetastateTable& table) {
    if (table.plateaus.empty()) {
        throw ContractViolation("decode_metastate: empty table");
    }
    std::size_t best = 0;
    double best_dist = std::abs(state.x - table.plateaus[0]);
    for (std::size_t i = 1; i < table.plateaus.size(); ++i) {
        const double d = std::abs(state.x - table.plateaus[i]);
        if (d < best_dist) {
            best = i;
            best_dist = d;
        }
    }
    return table.state_at(best);
}

DeviceState program_transition(DeviceState state, UpdateDirection dir, const DeviceParams& params,
                               const MetastateTable& table, const NoiseModel& noise, Rng& rng,
                               const ProgrammingScheme& scheme) {
    DeviceState next = apply_pulse(state, scheme.pulse(dir), params, noise, rng);
    next.x = std::clamp(next.x, table.lowest(), table.highest());
    return next;
}

DeviceState program_transition(DeviceState state, UpdateDirection dir, const DeviceParams& params,
                               const MetastateTable& table, const NoiseModel& noise,
                               const ProgrammingScheme& scheme) {
    Rng rng = make_rng(noise.rng_seed, Stream::DeviceNoise);
    return program_transition(state, dir, params, table, noise, rng, scheme);
}

void write_metastate_table_csv(std::ostream& os, const MetastateTable& table,
                               const DeviceParams& params) {
    os << "efficacy,metalevel,x_plateau,conductance_S\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const MetaState s = table.state_at(i);
        os << (s.efficacy == Efficacy::High ? "high" : "low") << ',' << s.metalevel << ','
           << format_number(table.plateaus[i]) << ','
           << format_number(conductance(table.plateaus[i], params)) << '\n';
    }
}

} // namespace metasyn

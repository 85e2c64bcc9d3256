#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "metasyn/random.hpp"
#include "metasyn/synapse.hpp"

namespace metasyn {

/// Constants of the voltage-threshold memristor model.
///
/// Conductance is linear in the normalized state x = w/D between g_off
/// (x = 0) and g_on (x = 1). The state only moves when the applied voltage
/// is outside (v_on, v_off); the rate is shaped by a Z-window that vanishes
/// at both ends of the device when delta = 0.5.
///
/// k_on/k_off are tuned so one 1.2 V / 15 us pulse moves the device by
/// exactly one metastate in the middle of the ladder (High,0 <-> Low,0)
/// with a 4.5x conductance step, given tau = 10 and dt = 20 ns.
struct DeviceParams {
    double g_on = 1.0e-5;   // S, 100 kOhm
    double g_off = 1.0e-7;  // S, 10 MOhm
    double thickness = 3.0e-9;  // m
    double v_on = -1.0;
    double v_off = 1.0;
    double k_on = -0.0306149845713;  // m/s
    double k_off = 0.0306149845713;  // m/s
    double alpha_on = 3.0;
    double alpha_off = 3.0;
    double tau = 10.0;
    double delta = 0.5;
    int p = 2;

    // Throws ContractViolation when an invariant is broken.
    void validate() const;

    friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

struct DeviceState {
    double x = 0.0;  // w / D, in [0, 1]
    friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

struct PulseSpec {
    double amplitude = 1.2;   // V, signed
    double duration = 15e-6;  // s
    double dt = 2e-8;         // s, explicit Euler step
};

// Multiplicative Gaussian variability on every integration step's dx.
struct NoiseModel {
    double sigma = 0.25;
    bool enabled = false;
    std::uint64_t rng_seed = 0;

    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// Calibrated state-variable plateau for each metastate, in chain order
/// (Low/n-1 ... Low/0, High/0 ... High/n-1); strictly increasing.
struct MetastateTable {
    int n_levels = 0;
    std::vector<double> plateaus;

    std::size_t size() const noexcept { return plateaus.size(); }
    double x_of(const MetaState& s) const { return plateaus.at(static_cast<std::size_t>(s.chain_index())); }
    MetaState state_at(std::size_t index) const {
        return MetaState::from_chain_index(static_cast<int>(index), n_levels);
    }
    double lowest() const { return plateaus.front(); }
    double highest() const { return plateaus.back(); }
};

double window(double x, const DeviceParams& params);

// d(w/D)/dt in 1/s.
double state_derivative(double x, double v, const DeviceParams& params);

double conductance(double x, const DeviceParams& params);

// Fixed-step explicit Euler over the pulse. The 4-argument form seeds its
// own generator from noise.rng_seed.
DeviceState apply_pulse(DeviceState state, const PulseSpec& pulse, const DeviceParams& params,
                        const NoiseModel& noise);
DeviceState apply_pulse(DeviceState state, const PulseSpec& pulse, const DeviceParams& params,
                        const NoiseModel& noise, Rng& rng);

struct ProgrammingScheme {
    double v_program = 1.2;
    double width = 15e-6;
    double dt = 2e-8;

    PulseSpec pulse(UpdateDirection dir) const {
        return {dir == UpdateDirection::Potentiate ? v_program : -v_program, width, dt};
    }

    friend bool operator==(const ProgrammingScheme&, const ProgrammingScheme&) = default;
};

// Pulse-train calibration. The starting point of the train is chosen so the
// (Low,0)/(High,0) pair straddles the window centre symmetrically; every
// further plateau is where the next programming pulse lands.
// Throws CalibrationError if plateaus are not strictly increasing or the
// (High,0)/(Low,0) conductance ratio is outside [3.5, 5.5].
MetastateTable calibrate_metastate_table(const DeviceParams& params, int n_levels = 3,
                                         const ProgrammingScheme& scheme = {});

// Nearest plateau; ties go to the lower plateau.
MetaState decode_metastate(DeviceState state, const MetastateTable& table);

// One programming pulse in the given direction. The trainer keeps the
// device inside the calibrated window [lowest, highest] plateau, which is
// what makes the chain ends saturate.
DeviceState program_transition(DeviceState state, UpdateDirection dir, const DeviceParams& params,
                               const MetastateTable& table, const NoiseModel& noise, Rng& rng,
                               const ProgrammingScheme& scheme = {});
DeviceState program_transition(DeviceState state, UpdateDirection dir, const DeviceParams& params,
                               const MetastateTable& table, const NoiseModel& noise,
                               const ProgrammingScheme& scheme = {});

// CSV: efficacy,metalevel,x_plateau,conductance_S
void write_metastate_table_csv(std::ostream& os, const MetastateTable& table,
                               const DeviceParams& params);

} // namespace metasyn

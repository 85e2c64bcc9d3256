#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "metasyn/device.hpp"
#include "metasyn/network.hpp"

namespace metasyn {

// How a device's conductance is seen by the column during inference.
// Physical: the conductance of the actual state, so Low-efficacy and
// pruned devices leak current. Quantized: connected devices read as
// G(High,0) or g_off by decoded efficacy, pruned devices as g_off.
enum class ReadoutModel { Physical, Quantized };

enum class ComparatorMode { FixedReference, ColumnTracking };

/// Current-comparator neuron at the foot of each column.
///
/// FixedReference fires when I_j > i_ref. ColumnTracking fires when
/// I_j > kappa * v_read * sum_i G_ij over the column's connected devices.
/// A zero i_ref / kappa means "calibrate when the crossbar is built".
struct ComparatorConfig {
    ComparatorMode mode = ComparatorMode::FixedReference;
    double kappa = 0.0;
    double i_ref = 0.0;

    friend bool operator==(const ComparatorConfig&, const ComparatorConfig&) = default;
};

struct CrossbarOptions {
    DeviceParams params;
    ProgrammingScheme programming;
    double v_read = 0.3;
    double v_half = 0.6;  // V_DD / 2 with V_DD = 1.2 V
    ReadoutModel readout = ReadoutModel::Physical;

    friend bool operator==(const CrossbarOptions&, const CrossbarOptions&) = default;
};

struct Crossbar {
    NetworkConfig cfg;
    std::vector<DeviceState> devices;  // n_in x n_out, row-major
    BitVector mask;
    DeviceParams params;
    MetastateTable table;
    ProgrammingScheme programming;
    double v_read = 0.3;
    double v_half = 0.6;
    ReadoutModel readout = ReadoutModel::Physical;

    std::size_t n_in() const noexcept { return cfg.n_in; }
    std::size_t n_out() const noexcept { return cfg.n_out; }
    std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * cfg.n_out + col; }
    // Conductance the column sees for this crosspoint under the readout model.
    double read_conductance(std::size_t k) const;
};

// Connected devices start on the (Low,0) or (High,0) plateau with the same
// draw as the behavioral network; pruned devices start at x = 0.
Crossbar init_crossbar(const NetworkConfig& cfg, const CrossbarOptions& options, const MetastateTable& table);

// Ideal diodes: inactive rows contribute nothing; active rows contribute
// v_read * G through every device, pruned ones included.
std::vector<double> column_currents(const Crossbar& xb, const BitVector& input);

// Sum of connected-device read conductances per column.
std::vector<double> column_conductance(const Crossbar& xb);

// Fills in a zero i_ref / kappa. The fixed reference is the expected
// column current of the freshly initialised crossbar for a pattern of
// activity f: theta devices at (High,0), theta at (Low,0) and the active
// pruned devices at g_off. ColumnTracking scales the same current by the
// mean initial column conductance.
ComparatorConfig calibrate_comparator(const Crossbar& xb, ComparatorConfig cmp);

BitVector infer(const Crossbar& xb, const BitVector& input, const ComparatorConfig& cmp);

enum class TrainPhase { Potentiate = 1, Depress = 2 };

struct ProgramEvent {
    std::size_t step = 0;
    TrainPhase phase = TrainPhase::Potentiate;
    std::size_t row = 0;
    std::size_t col = 0;
    double x_before = 0.0;
    double x_after = 0.0;
    MetaState meta_before;
    MetaState meta_after;
};

/// Two-phase on-device update for one pattern.
///
/// Phase 1 drives active rows at +v_program against grounded columns whose
/// error is +1; phase 2 drives error -1 columns at v_program against
/// grounded active rows. Inactive rows and unselected columns sit at
/// v_half, so every other connected device sees at most |v_program - v_half|
/// or |v_half| and does not move. Pruned crosspoints are never programmed.
/// Returns false if the pattern produced no error.
bool train_two_phase(Crossbar& xb, const Pattern& pat, const ComparatorConfig& cmp,
                     const NoiseModel& noise, Rng& rng, std::vector<ProgramEvent>* events = nullptr,
                     std::size_t step = 0);

// Current through pruned devices on active rows.
double pruned_leakage_current(const Crossbar& xb, const BitVector& input);
// Current through pruned devices and Low-efficacy devices on active rows.
double undesired_current(const Crossbar& xb, const BitVector& input);

AccuracyTrace run_lifetime_hw(const NetworkConfig& cfg, std::size_t n_patterns, const ComparatorConfig& cmp,
                              const NoiseModel& noise, const CrossbarOptions& options = {},
                              std::vector<ProgramEvent>* events = nullptr, Crossbar* final_state = nullptr);

// CSV: row,col,connected_flag,x,efficacy,metalevel (empty efficacy/metalevel for pruned)
void write_crossbar_csv(std::ostream& os, const Crossbar& xb);
// CSV: step,phase,row,col,x_before,x_after,meta_before,meta_after
void write_events_csv(std::ostream& os, const std::vector<ProgramEvent>& events);

} // namespace metasyn

#include "metasyn/crossbar.hpp"

#include <cmath>
#include <ostream>

#include "metasyn/csv.hpp"
#include "metasyn/error.hpp"

namespace metasyn {

namespace {

double high0_conductance(const Crossbar& xb) {
    return conductance(xb.table.plateaus[static_cast<std::size_t>(xb.table.n_levels)], xb.params);
}

double low0_conductance(const Crossbar& xb) {
    return conductance(xb.table.plateaus[static_cast<std::size_t>(xb.table.n_levels - 1)], xb.params);
}

// Read conductances frozen between training steps, so a batch of
// inferences does not re-evaluate every device.
struct ReadSnapshot {
    std::vector<double> g;          // physical readout
    BitVector high;                 // quantized readout
    std::vector<double> col_total;  // connected devices only
};

ReadSnapshot snapshot(const Crossbar& xb) {
    ReadSnapshot s;
    const std::size_t total = xb.devices.size();
    s.g.resize(total);
    s.high.assign(total, 0);
    for (std::size_t k = 0; k < total; ++k) {
        s.g[k] = xb.read_conductance(k);
        if (xb.mask[k] && xb.readout == ReadoutModel::Quantized) {
            s.high[k] = decode_metastate(xb.devices[k], xb.table).efficacy == Efficacy::High ? 1 : 0;
        }
    }
    s.col_total.assign(xb.n_out(), 0.0);
    for (std::size_t i = 0; i < xb.n_in(); ++i) {
        for (std::size_t j = 0; j < xb.n_out(); ++j) {
            const std::size_t k = xb.index(i, j);
            if (xb.mask[k]) s.col_total[j] += s.g[k];
        }
    }
    return s;
}

std::vector<double> currents_from(const Crossbar& xb, const ReadSnapshot& snap, const BitVector& input) {
    if (input.size() != xb.n_in()) {
        throw ContractViolation("crossbar: input length " + std::to_string(input.size()) + " != " +
                                std::to_string(xb.n_in()));
    }
    const std::size_t n_out = xb.n_out();
    std::vector<double> current(n_out, 0.0);
    if (xb.readout == ReadoutModel::Quantized) {
        // Two conductance levels: count them so the sum is exact.
        std::vector<std::size_t> highs(n_out, 0);
        std::vector<std::size_t> others(n_out, 0);
        for (std::size_t i = 0; i < xb.n_in(); ++i) {
            if (!input[i]) continue;
            for (std::size_t j = 0; j < n_out; ++j) {
                (snap.high[xb.index(i, j)] ? highs[j] : others[j]) += 1;
            }
        }
        const double unit_high = xb.v_read * high0_conductance(xb);
        const double unit_off = xb.v_read * xb.params.g_off;
        for (std::size_t j = 0; j < n_out; ++j) {
            current[j] = unit_high * static_cast<double>(highs[j]) + unit_off * static_cast<double>(others[j]);
        }
        return current;
    }
    for (std::size_t i = 0; i < xb.n_in(); ++i) {
        if (!input[i]) continue;
        const double* row = &snap.g[xb.index(i, 0)];
        for (std::size_t j = 0; j < n_out; ++j) {
            current[j] += row[j];
        }
    }
    for (double& c : current) c *= xb.v_read;
    return current;
}

BitVector decide(const Crossbar& xb, const ReadSnapshot& snap, const std::vector<double>& current,
                 const ComparatorConfig& cmp) {
    BitVector out(current.size(), 0);
    for (std::size_t j = 0; j < current.size(); ++j) {
        const double ref = cmp.mode == ComparatorMode::FixedReference
                               ? cmp.i_ref
                               : cmp.kappa * xb.v_read * snap.col_total[j];
        out[j] = current[j] > ref ? 1 : 0;
    }
    return out;
}

void check_comparator(const ComparatorConfig& cmp) {
    if (cmp.mode == ComparatorMode::FixedReference && !(cmp.i_ref > 0.0)) {
        throw ContractViolation("comparator: i_ref must be positive");
    }
    if (cmp.mode == ComparatorMode::ColumnTracking && !(cmp.kappa > 0.0 && cmp.kappa < 1.0)) {
        throw ContractViolation("comparator: kappa must lie in (0, 1)");
    }
}

BitVector infer_snapshot(const Crossbar& xb, const ReadSnapshot& snap, const BitVector& input,
                         const ComparatorConfig& cmp) {
    return decide(xb, snap, currents_from(xb, snap, input), cmp);
}

} // namespace

double Crossbar::read_conductance(std::size_t k) const {
    if (readout == ReadoutModel::Physical) {
        return conductance(devices[k].x, params);
    }
    if (!mask[k]) {
        return params.g_off;
    }
    return decode_metastate(devices[k], table).efficacy == Efficacy::High ? high0_conductance(*this)
                                                                           : params.g_off;
}

Crossbar init_crossbar(const NetworkConfig& cfg, const CrossbarOptions& options, const MetastateTable& table) {
    if (cfg.model == SynapseModel::GradientDescent) {
        throw ConfigError("the crossbar realises binary and multistate synapses only");
    }
    options.params.validate();
    const auto& p = options.params;
    const double v_prog = options.programming.v_program;
    if (!(std::abs(options.v_read) < p.v_off && -std::abs(options.v_read) > p.v_on)) {
        throw ConfigError("v_read must be below the switching thresholds");
    }
    if (!(options.v_half < p.v_off && v_prog - options.v_half < p.v_off && -options.v_half > p.v_on &&
          options.v_half - v_prog > p.v_on)) {
        throw ConfigError("half-select bias must keep unselected devices below threshold");
    }
    if (!(v_prog > p.v_off && -v_prog < p.v_on)) {
        throw ConfigError("v_program must exceed both switching thresholds");
    }
    if (table.n_levels != cfg.effective_levels()) {
        throw ContractViolation("init_crossbar: metastate table does not match n_levels");
    }

    NetworkSetup setup = make_setup(cfg);
    Crossbar xb;
    xb.cfg = cfg;
    xb.mask = std::move(setup.mask);
    xb.params = p;
    xb.table = table;
    xb.programming = options.programming;
    xb.v_read = options.v_read;
    xb.v_half = options.v_half;
    xb.readout = options.readout;

    const int n = table.n_levels;
    const double low0 = table.plateaus[static_cast<std::size_t>(n - 1)];
    const double high0 = table.plateaus[static_cast<std::size_t>(n)];
    xb.devices.assign(xb.mask.size(), DeviceState{0.0});
    for (std::size_t k = 0; k < xb.mask.size(); ++k) {
        if (xb.mask[k]) {
            xb.devices[k].x = setup.initial_high[k] ? high0 : low0;
        }
    }
    return xb;
}

std::vector<double> column_currents(const Crossbar& xb, const BitVector& input) {
    return currents_from(xb, snapshot(xb), input);
}

std::vector<double> column_conductance(const Crossbar& xb) { return snapshot(xb).col_total; }

ComparatorConfig calibrate_comparator(const Crossbar& xb, ComparatorConfig cmp) {
    const auto& cfg = xb.cfg;
    const double theta = cfg.threshold();
    const double active_pruned = (1.0 - cfg.connectivity) * cfg.activity * static_cast<double>(cfg.n_in);
    const double g_low = xb.readout == ReadoutModel::Physical ? low0_conductance(xb) : xb.params.g_off;
    const double reference =
        xb.v_read * (theta * (high0_conductance(xb) + g_low) + active_pruned * xb.params.g_off);

    if (cmp.mode == ComparatorMode::FixedReference && cmp.i_ref == 0.0) {
        cmp.i_ref = reference;
    }
    if (cmp.mode == ComparatorMode::ColumnTracking && cmp.kappa == 0.0) {
        const auto totals = column_conductance(xb);
        double mean_total = 0.0;
        for (double t : totals) mean_total += t;
        mean_total /= static_cast<double>(totals.size());
        cmp.kappa = reference / (xb.v_read * mean_total);
    }
    check_comparator(cmp);
    return cmp;
}

BitVector infer(const Crossbar& xb, const BitVector& input, const ComparatorConfig& cmp) {
    check_comparator(cmp);
    return infer_snapshot(xb, snapshot(xb), input, cmp);
}

bool train_two_phase(Crossbar& xb, const Pattern& pat, const ComparatorConfig& cmp, const NoiseModel& noise,
                     Rng& rng, std::vector<ProgramEvent>* events, std::size_t step) {
    if (pat.input.size() != xb.n_in() || pat.target.size() != xb.n_out()) {
        throw ContractViolation("train_two_phase: pattern does not match crossbar size");
    }
    const BitVector out = infer(xb, pat.input, cmp);
    std::vector<int> error(xb.n_out());
    bool any = false;
    for (std::size_t j = 0; j < xb.n_out(); ++j) {
        error[j] = static_cast<int>(pat.target[j]) - static_cast<int>(out[j]);
        any = any || error[j] != 0;
    }
    if (!any) {
        return false;
    }

    const double v_prog = xb.programming.v_program;
    const NoiseModel quiet{};
    for (const TrainPhase phase : {TrainPhase::Potentiate, TrainPhase::Depress}) {
        const int wanted = phase == TrainPhase::Potentiate ? 1 : -1;
        const auto dir = phase == TrainPhase::Potentiate ? UpdateDirection::Potentiate : UpdateDirection::Depress;

        // Node voltages: driven rows / selected columns per phase, V_DD/2 elsewhere.
        const double row_active = phase == TrainPhase::Potentiate ? v_prog : 0.0;
        const double col_selected = phase == TrainPhase::Potentiate ? 0.0 : v_prog;

        for (std::size_t i = 0; i < xb.n_in(); ++i) {
            const bool active = pat.input[i] != 0;
            const double v_row = active ? row_active : xb.v_half;
            for (std::size_t j = 0; j < xb.n_out(); ++j) {
                const std::size_t k = xb.index(i, j);
                if (!xb.mask[k]) continue;
                const bool selected = error[j] == wanted;
                if (active && selected) {
                    const DeviceState before = xb.devices[k];
                    xb.devices[k] = program_transition(before, dir, xb.params, xb.table, noise, rng, xb.programming);
                    if (events) {
                        events->push_back({step, phase, i, j, before.x, xb.devices[k].x,
                                           decode_metastate(before, xb.table),
                                           decode_metastate(xb.devices[k], xb.table)});
                    }
                } else {
                    const double v_col = selected ? col_selected : xb.v_half;
                    const PulseSpec bias{v_row - v_col, xb.programming.width, xb.programming.dt};
                    xb.devices[k] = apply_pulse(xb.devices[k], bias, xb.params, quiet, rng);
                }
            }
        }
    }
    return true;
}

double pruned_leakage_current(const Crossbar& xb, const BitVector& input) {
    double total = 0.0;
    for (std::size_t i = 0; i < xb.n_in(); ++i) {
        if (!input.at(i)) continue;
        for (std::size_t j = 0; j < xb.n_out(); ++j) {
            const std::size_t k = xb.index(i, j);
            if (!xb.mask[k]) total += xb.v_read * xb.read_conductance(k);
        }
    }
    return total;
}

double undesired_current(const Crossbar& xb, const BitVector& input) {
    double total = 0.0;
    for (std::size_t i = 0; i < xb.n_in(); ++i) {
        if (!input.at(i)) continue;
        for (std::size_t j = 0; j < xb.n_out(); ++j) {
            const std::size_t k = xb.index(i, j);
            if (!xb.mask[k] || decode_metastate(xb.devices[k], xb.table).efficacy == Efficacy::Low) {
                total += xb.v_read * xb.read_conductance(k);
            }
        }
    }
    return total;
}

AccuracyTrace run_lifetime_hw(const NetworkConfig& cfg, std::size_t n_patterns, const ComparatorConfig& cmp,
                              const NoiseModel& noise, const CrossbarOptions& options,
                              std::vector<ProgramEvent>* events, Crossbar* final_state) {
    const MetastateTable table =
        calibrate_metastate_table(options.params, cfg.effective_levels(), options.programming);
    Crossbar xb = init_crossbar(cfg, options, table);
    const ComparatorConfig comparator = calibrate_comparator(xb, cmp);
    const std::vector<Pattern> patterns = make_patterns(cfg, n_patterns);
    Rng rng = make_rng(cfg.seed + 0x9E3779B97F4A7C15ull * noise.rng_seed, Stream::DeviceNoise);

    AccuracyTrace trace;
    trace.learning.reserve(n_patterns);
    trace.mean.reserve(n_patterns);
    for (std::size_t t = 0; t < n_patterns; ++t) {
        for (int rep = 0; rep < cfg.updates_per_pattern; ++rep) {
            if (!train_two_phase(xb, patterns[t], comparator, noise, rng, events, t + 1)) break;
        }
        const ReadSnapshot snap = snapshot(xb);
        double sum = 0.0;
        for (std::size_t s = 0; s <= t; ++s) {
            const double acc =
                bitwise_accuracy(infer_snapshot(xb, snap, patterns[s].input, comparator), patterns[s].target);
            sum += acc;
            if (s == t) trace.learning.push_back(acc);
        }
        trace.mean.push_back(sum / static_cast<double>(t + 1));
    }
    if (final_state) {
        *final_state = std::move(xb);
    }
    return trace;
}

void write_crossbar_csv(std::ostream& os, const Crossbar& xb) {
    os << "row,col,connected_flag,x,efficacy,metalevel\n";
    for (std::size_t i = 0; i < xb.n_in(); ++i) {
        for (std::size_t j = 0; j < xb.n_out(); ++j) {
            const std::size_t k = xb.index(i, j);
            os << i << ',' << j << ',' << (xb.mask[k] ? 1 : 0) << ',' << format_number(xb.devices[k].x) << ',';
            if (xb.mask[k]) {
                const MetaState s = decode_metastate(xb.devices[k], xb.table);
                os << efficacy_of(s) << ',' << s.metalevel;
            } else {
                os << ',';
            }
            os << '\n';
        }
    }
}

void write_events_csv(std::ostream& os, const std::vector<ProgramEvent>& events) {
    os << "step,phase,row,col,x_before,x_after,meta_before,meta_after\n";
    for (const auto& e : events) {
        os << e.step << ',' << (e.phase == TrainPhase::Potentiate ? "potentiate" : "depress") << ',' << e.row
           << ',' << e.col << ',' << format_number(e.x_before) << ',' << format_number(e.x_after) << ','
           << to_string(e.meta_before) << ',' << to_string(e.meta_after) << '\n';
    }
}

} // namespace metasyn

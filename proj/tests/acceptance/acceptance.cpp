#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "metasyn/crossbar.hpp"
#include "metasyn/device.hpp"
#include "metasyn/experiments.hpp"

using namespace metasyn;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (detail.tellp() > 0) detail << "; ";
        detail << what << (ok ? "" : " [x]");
    }
};

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

std::vector<std::uint64_t> ten_seeds() { return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}; }

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

ExperimentSpec base_spec() {
    ExperimentSpec spec;
    spec.seeds = ten_seeds();
    spec.n_patterns = 100;
    spec.models = {SynapseModel::Binary, SynapseModel::Multistate};
    spec.workers = worker_count();
    return spec;
}

const MetastateTable& table3() {
    static const MetastateTable t = calibrate_metastate_table(DeviceParams{}, 3);
    return t;
}

Verdict ac1() {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const SweepResult r = run_comparison(base_spec());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double bin = r.summary("binary")->crossing_mean;
    const double ms = r.summary("multistate")->crossing_mean;
    v.require(in_band(ms / bin, 1.7, 2.6), "ratio " + fmt(ms / bin) + " in [1.7, 2.6]");
    v.require(in_band(bin, 15, 30), "binary crossing " + fmt(bin, 1) + " in [15, 30]");
    v.require(in_band(ms, 35, 60), "multistate crossing " + fmt(ms, 1) + " in [35, 60]");
    v.require(secs < 120.0, "runtime " + fmt(secs, 1) + " s < 120 s");
    return v;
}

Verdict ac2() {
    Verdict v;
    ExperimentSpec spec = base_spec();
    spec.hardware = true;
    spec.hw.noise = NoiseModel{0.25, true, 0};
    const SweepResult r = run_comparison(spec);
    const double bin = r.summary("binary_hw")->crossing_mean;
    const double ms = r.summary("multistate_hw")->crossing_mean;
    v.require(in_band(bin, 16, 30), "hw binary crossing " + fmt(bin, 1) + " in [16, 30]");
    v.require(in_band(ms, 38, 58), "hw multistate crossing " + fmt(ms, 1) + " in [38, 58]");

    // Per seed and model: hardware learning[100] must not exceed software.
    std::map<std::pair<std::string, std::uint64_t>, double> sw;
    for (const auto& run : r.runs) {
        if (!run.hardware) sw[{run.label, run.seed}] = run.trace.learning.back();
    }
    for (const char* model : {"binary", "multistate"}) {
        int violations = 0;
        double worst = 0.0;
        for (const auto& run : r.runs) {
            if (!run.hardware || run.label != std::string(model) + "_hw") continue;
            const double diff = run.trace.learning.back() - sw.at({model, run.seed});
            if (diff > 0.0) ++violations;
            worst = std::max(worst, diff);
        }
        v.require(violations == 0, std::string(model) + " hw<=sw learning[100] violated on " +
                                       std::to_string(violations) + "/10 seeds (worst +" + fmt(worst, 4) + ")");
    }
    return v;
}

Verdict ac3() {
    Verdict v;
    const SweepResult r = run_comparison(base_spec());
    const double bin = r.summary("binary")->learning_final;
    const double ms = r.summary("multistate")->learning_final;
    v.require(bin >= ms, "binary " + fmt(bin, 4) + " >= multistate " + fmt(ms, 4));
    v.require(bin >= 0.95, "binary " + fmt(bin, 4) + " >= 0.95");
    v.require(in_band(ms, 0.84, 0.97), "multistate " + fmt(ms, 4) + " in [0.84, 0.97]");
    return v;
}

Verdict ac4() {
    Verdict v;
    ExperimentSpec spec = base_spec();
    spec.variant = ExperimentVariant::SweepCF;
    spec.c_grid = {0.25};
    spec.f_grid = {0.1, 0.5, 0.9};
    const SweepResult r = sweep_cf(spec);
    const double lo = r.cells[0].mean_final;
    const double mid = r.cells[1].mean_final;
    const double hi = r.cells[2].mean_final;
    v.require(mid < lo, "mean[100] f=0.5 " + fmt(mid, 4) + " < f=0.1 " + fmt(lo, 4));
    v.require(mid < hi, "mean[100] f=0.5 " + fmt(mid, 4) + " < f=0.9 " + fmt(hi, 4));
    return v;
}

Verdict ac5() {
    Verdict v;
    auto cell = [](double c, double f) {
        ExperimentSpec spec = base_spec();
        spec.variant = ExperimentVariant::SweepCF;
        spec.models = {SynapseModel::Multistate};
        spec.software = false;
        spec.hardware = true;
        spec.hw.noise = NoiseModel{0.25, true, 0};
        spec.c_grid = {c};
        spec.f_grid = {f};
        return sweep_cf(spec).cells.at(0).mean_final;
    };
    const double sparse = cell(0.1, 0.25);
    const double dense = cell(0.5, 0.9);
    v.require(dense <= sparse - 0.10, "hw mean[100] (C=0.5,f=0.9) " + fmt(dense, 4) +
                                          " at least 0.10 below (C=0.1,f=0.25) " + fmt(sparse, 4));
    return v;
}

Verdict ac6() {
    Verdict v;
    const DeviceParams params;
    const MetastateTable& t = table3();
    bool ordered = t.size() == 6;
    for (std::size_t i = 1; i < t.size(); ++i) ordered = ordered && t.plateaus[i] > t.plateaus[i - 1];
    v.require(ordered, std::to_string(t.size()) + " strictly ordered plateaus");
    const double ratio = conductance(t.x_of({Efficacy::High, 0, 3}), params) /
                         conductance(t.x_of({Efficacy::Low, 0, 3}), params);
    v.require(in_band(ratio, 4.0, 5.0), "G(H0)/G(L0) " + fmt(ratio, 4) + " in [4, 5]");

    int checked = 0;
    int wrong = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (auto dir : {UpdateDirection::Potentiate, UpdateDirection::Depress}) {
            const DeviceState out = program_transition({t.plateaus[i]}, dir, params, t, NoiseModel{});
            ++checked;
            if (!(decode_metastate(out, t) == transition(t.state_at(i), dir))) ++wrong;
        }
    }
    v.require(wrong == 0, "single 1.2 V/15 us pulse decodes to the adjacent state " +
                              std::to_string(checked - wrong) + "/" + std::to_string(checked));
    return v;
}

Verdict ac7() {
    Verdict v;
    const DeviceParams params;
    Rng rng = make_rng(7, Stream::DeviceNoise);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> len(1e-7, 50e-6);
    int moved = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double x0 = unit(rng);
        DeviceState s{x0};
        for (int k = 0; k < 20; ++k) {
            const double duration = len(rng);
            const PulseSpec p{unit(rng) < 0.5 ? 0.6 : -0.6, duration, std::min(2e-8, duration)};
            s = apply_pulse(s, p, params, NoiseModel{0.25, true, 0}, rng);
        }
        if (s.x != x0) ++moved;
    }
    v.require(moved == 0, "0.6 V trains moved " + std::to_string(moved) + "/1000 devices");

    std::size_t inactive_moved = 0;
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        NetworkConfig cfg;
        cfg.seed = seed;
        Crossbar xb = init_crossbar(cfg, CrossbarOptions{}, table3());
        const ComparatorConfig cmp = calibrate_comparator(xb, {});
        Rng noise_rng = make_rng(seed, Stream::DeviceNoise);
        for (const auto& p : make_patterns(cfg, 100)) {
            const auto before = xb.devices;
            train_two_phase(xb, p, cmp, NoiseModel{0.25, true, 0}, noise_rng);
            for (std::size_t i = 0; i < cfg.n_in; ++i) {
                if (p.input[i]) continue;
                for (std::size_t j = 0; j < cfg.n_out; ++j) {
                    ++checked;
                    if (xb.devices[xb.index(i, j)].x != before[xb.index(i, j)].x) ++inactive_moved;
                }
            }
        }
    }
    v.require(inactive_moved == 0, "inactive-row devices changed " + std::to_string(inactive_moved) + "/" +
                                       std::to_string(checked));
    return v;
}

Verdict ac8() {
    Verdict v;
    const DeviceParams params;
    v.require(window(0.0, params) == 0.0 && window(1.0, params) == 0.0,
              "f_w(0) = " + fmt(window(0.0, params), 1) + ", f_w(1) = " + fmt(window(1.0, params), 1));
    Rng rng = make_rng(8, Stream::DeviceNoise);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    std::uniform_real_distribution<double> len(1e-7, 50e-6);
    for (bool noisy : {false, true}) {
        DeviceState s{0.5};
        double lo = 1.0;
        double hi = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double duration = len(rng);
            s = apply_pulse(s, PulseSpec{amp(rng), duration, std::min(2e-8, duration)}, params,
                            NoiseModel{0.25, noisy, 0}, rng);
            lo = std::min(lo, s.x);
            hi = std::max(hi, s.x);
        }
        v.require(lo >= 0.0 && hi <= 1.0, std::string(noisy ? "noisy" : "quiet") + " 1e4 pulses x in [" +
                                              fmt(lo, 6) + ", " + fmt(hi, 6) + "]");
    }
    return v;
}

Verdict ac9() {
    Verdict v;
    int n1_equal = 0;
    int hw_equal = 0;
    int hw_total = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        NetworkConfig ms;
        ms.seed = seed;
        ms.n_levels = 1;
        NetworkConfig bin = ms;
        bin.model = SynapseModel::Binary;
        if (run_lifetime(ms, 100) == run_lifetime(bin, 100)) ++n1_equal;

        for (SynapseModel model : {SynapseModel::Binary, SynapseModel::Multistate}) {
            NetworkConfig cfg;
            cfg.seed = seed;
            cfg.model = model;
            CrossbarOptions opt;
            opt.params.g_off = 0.0;
            opt.readout = ReadoutModel::Quantized;
            const MetastateTable table = calibrate_metastate_table(opt.params, cfg.effective_levels());
            ComparatorConfig cmp;
            cmp.i_ref = opt.v_read * conductance(table.x_of({Efficacy::High, 0, table.n_levels}), opt.params) *
                        cfg.threshold();
            ++hw_total;
            if (run_lifetime_hw(cfg, 100, cmp, NoiseModel{}, opt) == run_lifetime(cfg, 100)) ++hw_equal;
        }
    }
    v.require(n1_equal == 10, "n_levels=1 trace == binary trace on " + std::to_string(n1_equal) + "/10 seeds");
    v.require(hw_equal == hw_total, "ideal hardware trace == behavioral trace on " + std::to_string(hw_equal) +
                                        "/" + std::to_string(hw_total) + " runs");
    return v;
}

Verdict ac10() {
    Verdict v;
    const DeviceParams params;
    const MetastateTable& t = table3();
    int agree = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng = make_rng(seed, Stream::Transitions);
        std::uniform_int_distribution<std::size_t> start(0, t.size() - 1);
        std::bernoulli_distribution coin(0.5);
        const std::size_t s0 = start(rng);
        MetaState behavioural = t.state_at(s0);
        DeviceState device{t.plateaus[s0]};
        bool same = true;
        for (int step = 0; step < 100; ++step) {
            const auto dir = coin(rng) ? UpdateDirection::Potentiate : UpdateDirection::Depress;
            behavioural = transition(behavioural, dir);
            device = program_transition(device, dir, params, t, NoiseModel{});
            same = same && decode_metastate(device, t) == behavioural;
        }
        agree += same ? 1 : 0;
    }
    v.require(agree == 20, "device decode == state machine over 100 steps on " + std::to_string(agree) + "/20 seeds");
    return v;
}

const std::vector<std::pair<std::string, std::function<Verdict()>>>& criteria() {
    static const std::vector<std::pair<std::string, std::function<Verdict()>>> all = {
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10},
    };
    return all;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> wanted(argv + 1, argv + argc);
    bool all_pass = true;
    bool ran = false;
    for (const auto& [name, fn] : criteria()) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
        ran = true;
        try {
            const Verdict v = fn();
            std::printf("%s %s: %s\n", name.c_str(), v.pass ? "PASS" : "FAIL", v.detail.str().c_str());
            all_pass = all_pass && v.pass;
        } catch (const std::exception& e) {
            std::printf("%s FAIL: error: %s\n", name.c_str(), e.what());
            all_pass = false;
        }
        std::fflush(stdout);
    }
    if (!ran) {
        std::fprintf(stderr, "usage: acceptance [AC1 .. AC10]\n");
        return 2;
    }
    return all_pass ? 0 : 1;
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "metasyn/device.hpp"
#include "metasyn/error.hpp"

using namespace metasyn;

namespace {

const DeviceParams kParams{};

const MetastateTable& table3() {
    static const MetastateTable t = calibrate_metastate_table(kParams, 3);
    return t;
}

// Test-side restatement of the device equations, written out directly.
double oracle_window(double x) {
    const double u = x - 0.5;
    return (1.0 - 4.0 * u * u) / std::exp(10.0 * u * u);
}

double oracle_rate(double x, double v) {
    const double k = 0.0306149845713;
    const double d = 3e-9;
    if (v > 1.0) return k * std::pow(v - 1.0, 3) / d * oracle_window(x);
    if (v < -1.0) return -k * std::pow(-v - 1.0, 3) / d * oracle_window(x);
    return 0.0;
}

// Classic RK4 with a fine step, as a reference for the Euler integrator.
double oracle_pulse_rk4(double x, double v, double duration, int steps) {
    const double h = duration / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = oracle_rate(x, v);
        const double k2 = oracle_rate(x + 0.5 * h * k1, v);
        const double k3 = oracle_rate(x + 0.5 * h * k2, v);
        const double k4 = oracle_rate(x + h * k3, v);
        x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return x;
}

DeviceState pulse(double x, double amplitude, double dt = 2e-8, double duration = 15e-6) {
    return apply_pulse(DeviceState{x}, PulseSpec{amplitude, duration, dt}, kParams, NoiseModel{});
}

} // namespace

TEST_SUITE("device") {

TEST_CASE("window examples and exact endpoints") {
    CHECK(window(0.5, kParams) == 1.0);
    CHECK(window(0.0, kParams) == 0.0);
    CHECK(window(1.0, kParams) == 0.0);
    for (double x = 0.0; x <= 1.0; x += 0.01) {
        CHECK(window(x, kParams) == doctest::Approx(oracle_window(x)).epsilon(1e-14));
        CHECK(window(x, kParams) >= 0.0);
    }
}

TEST_CASE("state derivative branches") {
    CHECK(state_derivative(0.5, 0.4, kParams) == 0.0);
    CHECK(state_derivative(0.5, kParams.v_off, kParams) == 0.0);
    CHECK(state_derivative(0.5, kParams.v_on, kParams) == 0.0);
    const double up = state_derivative(0.5, 1.2, kParams);
    CHECK(std::isfinite(up));
    CHECK(up > 0.0);
    // k_off * (0.2)^3 / D at the window peak
    CHECK(up == doctest::Approx(0.0306149845713 * 0.008 / 3e-9).epsilon(1e-12));
    CHECK(state_derivative(0.5, -1.2, kParams) == doctest::Approx(-up).epsilon(1e-12));
    for (double x = 0.0; x <= 1.0; x += 0.05) {
        for (double v : {1.05, 1.2, 1.6, -1.2, -2.0}) {
            CHECK(state_derivative(x, v, kParams) == doctest::Approx(oracle_rate(x, v)).epsilon(1e-12));
        }
    }
}

TEST_CASE("sub-threshold immunity is exact") {
    for (double x = 0.0; x <= 1.0; x += 0.0625) {
        for (double v = -0.999; v < 1.0; v += 0.037) {
            CHECK(state_derivative(x, v, kParams) == 0.0);
        }
    }
}

TEST_CASE("conductance examples") {
    CHECK(conductance(1.0, kParams) == doctest::Approx(10e-6));
    CHECK(conductance(0.0, kParams) == doctest::Approx(0.1e-6));
    CHECK(conductance(0.5, kParams) == doctest::Approx(5.05e-6));
}

TEST_CASE("apply_pulse contract and sub-threshold pulses") {
    CHECK_THROWS_AS(pulse(0.5, 1.2, 20e-6, 15e-6), ContractViolation);
    CHECK_THROWS_AS(pulse(0.5, 1.2, 0.0), ContractViolation);
    CHECK_THROWS_AS(pulse(0.5, 1.2, 1e-8, 0.0), ContractViolation);
    for (double x : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
        CHECK(pulse(x, 0.6).x == x);
        CHECK(pulse(x, -0.6).x == x);
        CHECK(pulse(x, 0.6, 1e-7, 1e-3).x == x);
    }
}

TEST_CASE("apply_pulse agrees with a fine RK4 reference") {
    for (double x0 : {0.05, 0.175, 0.5, 0.82}) {
        for (double v : {1.2, -1.2}) {
            const double euler = pulse(x0, v).x;
            const double rk4 = oracle_pulse_rk4(x0, v, 15e-6, 20000);
            CAPTURE(x0);
            CAPTURE(v);
            CHECK(std::abs(euler - rk4) < 2e-3 * std::max(rk4, 1.0 - rk4));
        }
    }
}

TEST_CASE("Euler convergence: halving dt moves the result by under 0.1 percent") {
    const auto& t = table3();
    for (double x0 : t.plateaus) {
        for (double v : {1.2, -1.2}) {
            const double a = pulse(x0, v, 2e-8).x;
            const double b = pulse(x0, v, 1e-8).x;
            CAPTURE(x0);
            CAPTURE(v);
            CHECK(std::abs(a - b) / b < 1e-3);
        }
    }
}

TEST_CASE("calibrated table") {
    const auto& t = table3();
    REQUIRE(t.size() == 6);
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.plateaus[i] > t.plateaus[i - 1]);
    const double ratio = conductance(t.x_of({Efficacy::High, 0, 3}), kParams) /
                         conductance(t.x_of({Efficacy::Low, 0, 3}), kParams);
    CHECK(ratio >= 4.0);
    CHECK(ratio <= 5.0);
    CHECK(ratio == doctest::Approx(4.5).epsilon(1e-6));
    // The metalevel-0 pair straddles the window centre.
    CHECK(t.plateaus[2] + t.plateaus[3] == doctest::Approx(1.0).epsilon(1e-9));
    // Regression values for the default constants.
    const double golden[] = {0.036810, 0.068162, 0.175390, 0.824610, 0.931943, 0.963257};
    for (std::size_t i = 0; i < 6; ++i) CHECK(t.plateaus[i] == doctest::Approx(golden[i]).epsilon(1e-4));
    // Each plateau is where the next potentiating pulse from the previous one lands.
    for (std::size_t i = 1; i < t.size(); ++i) {
        CHECK(pulse(t.plateaus[i - 1], 1.2).x == doctest::Approx(t.plateaus[i]).epsilon(1e-12));
    }
}

TEST_CASE("one-level table") {
    const auto t = calibrate_metastate_table(kParams, 1);
    REQUIRE(t.size() == 2);
    CHECK(t.lowest() == doctest::Approx(table3().plateaus[2]));
    CHECK(t.highest() == doctest::Approx(table3().plateaus[3]));
    CHECK_THROWS_AS(calibrate_metastate_table(kParams, 0), ContractViolation);
}

TEST_CASE("calibration failures") {
    DeviceParams weak = kParams;
    weak.k_off = 0.004;
    weak.k_on = -0.004;
    CHECK_THROWS_AS(calibrate_metastate_table(weak, 3), CalibrationError);
    ProgrammingScheme gentle;
    gentle.v_program = 0.9;
    CHECK_THROWS_AS(calibrate_metastate_table(kParams, 3, gentle), CalibrationError);
}

TEST_CASE("one pulse moves any plateau to the adjacent metastate") {
    const auto& t = table3();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const MetaState s = t.state_at(i);
        const DeviceState at{t.plateaus[i]};
        for (auto dir : {UpdateDirection::Potentiate, UpdateDirection::Depress}) {
            const DeviceState raw = apply_pulse(at, ProgrammingScheme{}.pulse(dir), kParams, NoiseModel{});
            const DeviceState programmed = program_transition(at, dir, kParams, t, NoiseModel{});
            CAPTURE(to_string(s));
            CHECK(decode_metastate(programmed, t) == transition(s, dir));
            // Interior moves land on the neighbouring plateau without help from the clamp.
            const bool interior = dir == UpdateDirection::Potentiate ? i + 1 < t.size() : i > 0;
            if (interior) CHECK(decode_metastate(raw, t) == transition(s, dir));
        }
    }
}

TEST_CASE("decode nearest plateau") {
    const auto& t = table3();
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(decode_metastate({t.plateaus[i]}, t) == t.state_at(i));
    const double mid = 0.5 * (t.plateaus[1] + t.plateaus[2]);
    CHECK(decode_metastate({mid + 1e-9}, t) == t.state_at(2));
    CHECK(decode_metastate({mid - 1e-9}, t) == t.state_at(1));
    // Exact tie on a hand-built table goes to the lower plateau.
    MetastateTable tie{1, {0.25, 0.75}};
    CHECK(decode_metastate({0.5}, tie) == tie.state_at(0));
    CHECK(decode_metastate({0.0}, t) == t.state_at(0));
    CHECK(decode_metastate({1.0}, t) == t.state_at(5));
}

TEST_CASE("program_transition examples") {
    const auto& t = table3();
    const NoiseModel quiet{};
    const auto low0 = DeviceState{t.x_of({Efficacy::Low, 0, 3})};
    const auto high0 = DeviceState{t.x_of({Efficacy::High, 0, 3})};
    const auto high2 = DeviceState{t.x_of({Efficacy::High, 2, 3})};
    CHECK(decode_metastate(program_transition(low0, UpdateDirection::Potentiate, kParams, t, quiet), t) ==
          MetaState{Efficacy::High, 0, 3});
    CHECK(decode_metastate(program_transition(high0, UpdateDirection::Depress, kParams, t, quiet), t) ==
          MetaState{Efficacy::Low, 0, 3});
    const DeviceState sat = program_transition(high2, UpdateDirection::Potentiate, kParams, t, quiet);
    CHECK(decode_metastate(sat, t) == MetaState{Efficacy::High, 2, 3});
    CHECK(sat.x == t.highest());
}

TEST_CASE("boundedness under random pulses") {
    Rng rng = make_rng(2024, Stream::DeviceNoise);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    std::uniform_real_distribution<double> len(1e-7, 30e-6);
    for (bool noisy : {false, true}) {
        NoiseModel noise{0.25, noisy, 0};
        DeviceState s{0.5};
        for (int i = 0; i < 10000; ++i) {
            const double duration = len(rng);
            s = apply_pulse(s, PulseSpec{amp(rng), duration, std::min(2e-8, duration)}, kParams, noise, rng);
            REQUIRE(s.x >= 0.0);
            REQUIRE(s.x <= 1.0);
        }
    }
}

TEST_CASE("noisy programming decodes like the noise-free path") {
    const auto& t = table3();
    const NoiseModel noise{0.25, true, 0};
    Rng rng = make_rng(11, Stream::DeviceNoise);
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (auto dir : {UpdateDirection::Potentiate, UpdateDirection::Depress}) {
            const MetaState expected = transition(t.state_at(i), dir);
            int agree = 0;
            for (int cycle = 0; cycle < 100; ++cycle) {
                const DeviceState out = program_transition({t.plateaus[i]}, dir, kParams, t, noise, rng);
                agree += decode_metastate(out, t) == expected ? 1 : 0;
            }
            CAPTURE(i);
            CHECK(agree >= 95);
        }
    }
}

TEST_CASE("noise is reproducible from its seed") {
    const NoiseModel noise{0.25, true, 5};
    const PulseSpec up{1.2, 15e-6, 2e-8};
    const DeviceState a = apply_pulse({0.3}, up, kParams, noise);
    CHECK(apply_pulse({0.3}, up, kParams, noise) == a);
    CHECK_FALSE(apply_pulse({0.3}, up, kParams, NoiseModel{0.25, true, 6}) == a);
    CHECK_FALSE(apply_pulse({0.3}, up, kParams, NoiseModel{}) == a);
}

TEST_CASE("device and state machine agree over random command sequences") {
    for (int n = 1; n <= 4; ++n) {
        const MetastateTable t = calibrate_metastate_table(kParams, n);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng = make_rng(seed, Stream::Transitions);
            std::uniform_int_distribution<std::size_t> start(0, t.size() - 1);
            std::bernoulli_distribution coin(0.5);
            const std::size_t s0 = start(rng);
            MetaState behavioural = t.state_at(s0);
            DeviceState device{t.plateaus[s0]};
            for (int step = 0; step < 100; ++step) {
                const auto dir = coin(rng) ? UpdateDirection::Potentiate : UpdateDirection::Depress;
                behavioural = transition(behavioural, dir);
                device = program_transition(device, dir, kParams, t, NoiseModel{});
                REQUIRE(decode_metastate(device, t) == behavioural);
            }
        }
    }
}

TEST_CASE("params validation") {
    DeviceParams bad = kParams;
    bad.g_off = 2e-5;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    bad = kParams;
    bad.v_on = 0.5;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    bad = kParams;
    bad.k_on = 0.1;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    CHECK_NOTHROW(kParams.validate());
}

TEST_CASE("metastate table csv") {
    std::ostringstream os;
    write_metastate_table_csv(os, table3(), kParams);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "efficacy,metalevel,x_plateau,conductance_S");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].rfind("low,2,", 0) == 0);
    CHECK(rows[2].rfind("low,0,", 0) == 0);
    CHECK(rows[3].rfind("high,0,", 0) == 0);
    CHECK(rows[5].rfind("high,2,", 0) == 0);
}

}

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "metasyn/config.hpp"
#include "metasyn/crossbar.hpp"
#include "metasyn/csv.hpp"
#include "metasyn/device.hpp"
#include "metasyn/error.hpp"
#include "metasyn/experiments.hpp"
#include "metasyn/output.hpp"

namespace fs = std::filesystem;
using namespace metasyn;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> settings;
    std::string output_dir;
    bool no_plots = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "key = value configuration file");
    cmd->add_option("-s,--set", args.settings, "override one key, e.g. --set n_in=64 (repeatable)");
    cmd->add_option("-o,--out", args.output_dir, "output directory (overrides output_dir)");
    cmd->add_flag("--no-plots", args.no_plots, "skip SVG output");
}

std::int64_t seed_offset() {
    const char* env = std::getenv("METASYN_SEED_OFFSET");
    if (!env || !*env) return 0;
    std::int64_t v = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError("METASYN_SEED_OFFSET must be an integer, got '" + s + "'");
    }
    return v;
}

RunConfig resolve(const CommonArgs& args) {
    RunConfig cfg = args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
    for (const auto& s : args.settings) {
        apply_setting(cfg, s);
    }
    if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
    if (args.no_plots) cfg.plots = false;

    const std::int64_t offset = seed_offset();
    for (auto& seed : cfg.spec.seeds) {
        seed += static_cast<std::uint64_t>(offset);
    }
    return cfg;
}

void report(const std::vector<fs::path>& files) {
    for (const auto& f : files) std::cerr << "wrote " << f.string() << '\n';
}

void print_summary(const SweepResult& result) {
    for (const auto& s : result.summaries) {
        std::cerr << "  " << s.label << ": crossing " << format_number(s.crossing_mean) << " +/- "
                  << format_number(s.crossing_std);
        if (s.censored) std::cerr << " (" << s.censored << " never crossed)";
        if (s.ratio_vs_binary) std::cerr << ", ratio vs binary " << format_number(*s.ratio_vs_binary);
        std::cerr << ", learning " << format_number(s.learning_final) << ", mean " << format_number(s.mean_final)
                  << '\n';
    }
}

int run_experiment_cmd(const RunConfig& cfg, ExperimentVariant variant) {
    ExperimentSpec spec = cfg.spec;
    spec.variant = variant;
    std::cerr << to_string(variant) << ": " << spec.seeds.size() << " seed(s), " << spec.n_patterns
              << " patterns\n";
    const SweepResult result = run_experiment(spec);
    print_summary(result);
    report(write_outputs(result, cfg.output_dir, cfg.plots));
    return 0;
}

int cmd_run(const RunConfig& cfg) {
    ExperimentSpec spec = cfg.spec;
    spec.variant = ExperimentVariant::CompareModels;
    spec.models = {spec.base.model};
    spec.software = !spec.hardware;
    std::cerr << "run: " << to_string(spec.base.model) << (spec.hardware ? " (hardware)" : "") << ", "
              << spec.seeds.size() << " seed(s)\n";
    const SweepResult result = run_comparison(spec);
    print_summary(result);
    report(write_outputs(result, cfg.output_dir, cfg.plots));
    return 0;
}

int cmd_calibrate(const RunConfig& cfg) {
    const auto& hw = cfg.spec.hw;
    const MetastateTable table = calibrate_metastate_table(hw.options.params, cfg.spec.base.n_levels,
                                                           hw.options.programming);
    std::ostringstream csv;
    write_metastate_table_csv(csv, table, hw.options.params);
    fs::create_directories(cfg.output_dir);
    const fs::path path = fs::path(cfg.output_dir) / "metastate_table.csv";
    write_text_file(path, csv.str());

    const auto n = static_cast<std::size_t>(table.n_levels);
    const double ratio =
        conductance(table.plateaus[n], hw.options.params) / conductance(table.plateaus[n - 1], hw.options.params);
    std::cerr << "calibrated " << table.size() << " plateaus; G(High,0)/G(Low,0) = " << format_number(ratio) << '\n';
    report({path});
    return 0;
}

int cmd_dump_trace(const RunConfig& cfg) {
    NetworkConfig net = cfg.spec.base;
    net.seed = cfg.spec.seeds.front();
    const auto& hw = cfg.spec.hw;
    std::vector<ProgramEvent> events;
    Crossbar final_state;
    const AccuracyTrace trace =
        run_lifetime_hw(net, cfg.spec.n_patterns, hw.comparator, hw.noise, hw.options, &events, &final_state);

    fs::create_directories(cfg.output_dir);
    std::vector<fs::path> files;
    auto emit = [&](const std::string& name, const std::string& text) {
        files.push_back(fs::path(cfg.output_dir) / name);
        write_text_file(files.back(), text);
    };
    std::ostringstream ev;
    write_events_csv(ev, events);
    emit("events.csv", ev.str());
    std::ostringstream xb;
    write_crossbar_csv(xb, final_state);
    emit("crossbar.csv", xb.str());
    std::ostringstream table;
    write_metastate_table_csv(table, final_state.table, final_state.params);
    emit("metastate_table.csv", table.str());

    SweepResult one;
    one.n_patterns = trace.size();
    one.runs.push_back({to_string(net.model) + "_hw", net.model, true, net.seed, trace, std::nullopt});
    std::ostringstream tr;
    write_traces_csv(tr, one);
    emit("traces.csv", tr.str());

    std::cerr << "dump-trace: " << net.n_in << "x" << net.n_out << ", " << events.size() << " programming events\n";
    report(files);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multistate metaplastic synapse and memristor crossbar simulator"};
    app.require_subcommand(1);

    CommonArgs args;
    struct Command {
        const char* name;
        const char* help;
    };
    const Command commands[] = {
        {"run", "one model over the configured seeds (software, or hardware with hardware = true)"},
        {"compare", "binary / multistate / gradient-descent comparison with crossing statistics"},
        {"sweep-size", "square network sizes from size_grid"},
        {"sweep-cf", "connectivity x activity grid"},
        {"calibrate-device", "pulse-train calibration of the metastate table"},
        {"dump-trace", "hardware run of the first seed with the per-device programming log"},
        {"show-config", "print the fully defaulted configuration"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_common(sub, args);
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = resolve(args);
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "run") return cmd_run(cfg);
        if (name == "compare") return run_experiment_cmd(cfg, ExperimentVariant::CompareModels);
        if (name == "sweep-size") return run_experiment_cmd(cfg, ExperimentVariant::SweepSize);
        if (name == "sweep-cf") return run_experiment_cmd(cfg, ExperimentVariant::SweepCF);
        if (name == "calibrate-device") return cmd_calibrate(cfg);
        if (name == "dump-trace") return cmd_dump_trace(cfg);
        if (name == "show-config") {
            std::cout << serialize_config(cfg);
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

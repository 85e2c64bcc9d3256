#include "metasyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "metasyn/csv.hpp"
#include "metasyn/error.hpp"

namespace metasyn {

namespace {

// Raised by value parsers; turned into a ParseError with key and line.
struct BadValue {
    std::string what;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw BadValue{"empty list item"};
        items.push_back(item);
    }
    if (items.empty()) throw BadValue{"empty list"};
    return items;
}

double to_double(const std::string& v) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw BadValue{"'" + v + "' is not a number"};
    return out;
}

std::uint64_t to_uint(const std::string& v) {
    std::uint64_t out = 0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw BadValue{"'" + v + "' is not a non-negative integer"};
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw BadValue{"'" + v + "' is not a boolean"};
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += fmt(items[i]);
    }
    return out;
}

// Range helpers. Each returns the value or throws BadValue.
double in_range(double v, double lo, bool lo_open, double hi, bool hi_open) {
    const bool ok_lo = lo_open ? v > lo : v >= lo;
    const bool ok_hi = hi_open ? v < hi : v <= hi;
    if (!(ok_lo && ok_hi)) {
        throw BadValue{format_number(v) + " is outside " + (lo_open ? "(" : "[") + format_number(lo) + ", " +
                       format_number(hi) + (hi_open ? ")" : "]")};
    }
    return v;
}

double positive(double v) {
    if (!(v > 0.0)) throw BadValue{format_number(v) + " must be positive"};
    return v;
}

double non_negative(double v) {
    if (!(v >= 0.0)) throw BadValue{format_number(v) + " must be non-negative"};
    return v;
}

double negative(double v) {
    if (!(v < 0.0)) throw BadValue{format_number(v) + " must be negative"};
    return v;
}

std::uint64_t at_least(std::uint64_t v, std::uint64_t lo) {
    if (v < lo) throw BadValue{std::to_string(v) + " must be >= " + std::to_string(lo)};
    return v;
}

int small_int(std::uint64_t v, std::uint64_t lo) {
    at_least(v, lo);
    if (v > 1'000'000) throw BadValue{std::to_string(v) + " is too large"};
    return static_cast<int>(v);
}

SynapseModel to_model(const std::string& v) {
    try {
        return synapse_model_from_string(v);
    } catch (const ConfigError& e) {
        throw BadValue{e.what()};
    }
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Key>& keys() {
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        auto num = [](double v) { return format_number(v); };
        auto uint = [](auto v) { return std::to_string(v); };

        // Network
        k.push_back({"n_in", [](RunConfig& c, const std::string& v) { c.spec.base.n_in = at_least(to_uint(v), 1); },
                     [=](const RunConfig& c) { return uint(c.spec.base.n_in); }});
        k.push_back({"n_out", [](RunConfig& c, const std::string& v) { c.spec.base.n_out = at_least(to_uint(v), 1); },
                     [=](const RunConfig& c) { return uint(c.spec.base.n_out); }});
        k.push_back({"connectivity",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.base.connectivity = in_range(to_double(v), 0.0, true, 1.0, false);
                     },
                     [=](const RunConfig& c) { return num(c.spec.base.connectivity); }});
        k.push_back({"activity",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.base.activity = in_range(to_double(v), 0.0, true, 1.0, true);
                     },
                     [=](const RunConfig& c) { return num(c.spec.base.activity); }});
        k.push_back({"n_levels",
                     [](RunConfig& c, const std::string& v) { c.spec.base.n_levels = small_int(to_uint(v), 1); },
                     [=](const RunConfig& c) { return uint(c.spec.base.n_levels); }});
        k.push_back({"model", [](RunConfig& c, const std::string& v) { c.spec.base.model = to_model(v); },
                     [](const RunConfig& c) { return to_string(c.spec.base.model); }});
        k.push_back({"updates_per_pattern",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.base.updates_per_pattern = small_int(to_uint(v), 1);
                     },
                     [=](const RunConfig& c) { return uint(c.spec.base.updates_per_pattern); }});
        k.push_back({"transition_probability",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.base.transition_probability = in_range(to_double(v), 0.0, true, 1.0, false);
                     },
                     [=](const RunConfig& c) { return num(c.spec.base.transition_probability); }});
        k.push_back({"gd_learning_rate",
                     [](RunConfig& c, const std::string& v) { c.spec.base.gd_learning_rate = positive(to_double(v)); },
                     [=](const RunConfig& c) { return num(c.spec.base.gd_learning_rate); }});
        k.push_back({"gd_binarize_threshold",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.base.gd_binarize_threshold = in_range(to_double(v), 0.0, false, 1.0, false);
                     },
                     [=](const RunConfig& c) { return num(c.spec.base.gd_binarize_threshold); }});

        // Experiment
        k.push_back({"seeds",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.seeds.clear();
                         for (const auto& item : split_list(v)) c.spec.seeds.push_back(to_uint(item));
                     },
                     [=](const RunConfig& c) { return join(c.spec.seeds, uint); }});
        k.push_back({"n_seeds",
                     [](RunConfig& c, const std::string& v) {
                         const auto n = at_least(to_uint(v), 1);
                         if (n > 100'000) throw BadValue{"too many seeds"};
                         c.spec.seeds.clear();
                         for (std::uint64_t s = 0; s < n; ++s) c.spec.seeds.push_back(s);
                     },
                     nullptr});
        k.push_back({"n_patterns",
                     [](RunConfig& c, const std::string& v) { c.spec.n_patterns = at_least(to_uint(v), 1); },
                     [=](const RunConfig& c) { return uint(c.spec.n_patterns); }});
        k.push_back({"mean_threshold",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.mean_threshold = in_range(to_double(v), 0.0, true, 1.0, false);
                     },
                     [=](const RunConfig& c) { return num(c.spec.mean_threshold); }});
        k.push_back({"models",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.models.clear();
                         for (const auto& item : split_list(v)) c.spec.models.push_back(to_model(item));
                     },
                     [](const RunConfig& c) {
                         return join(c.spec.models, [](SynapseModel m) { return to_string(m); });
                     }});
        k.push_back({"software", [](RunConfig& c, const std::string& v) { c.spec.software = to_bool(v); },
                     [](const RunConfig& c) { return from_bool(c.spec.software); }});
        k.push_back({"hardware", [](RunConfig& c, const std::string& v) { c.spec.hardware = to_bool(v); },
                     [](const RunConfig& c) { return from_bool(c.spec.hardware); }});
        k.push_back({"size_grid",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.size_grid.clear();
                         for (const auto& item : split_list(v)) c.spec.size_grid.push_back(at_least(to_uint(item), 1));
                     },
                     [=](const RunConfig& c) { return join(c.spec.size_grid, uint); }});
        k.push_back({"c_grid",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.c_grid.clear();
                         for (const auto& item : split_list(v)) {
                             c.spec.c_grid.push_back(in_range(to_double(item), 0.0, true, 1.0, false));
                         }
                     },
                     [=](const RunConfig& c) { return join(c.spec.c_grid, num); }});
        k.push_back({"f_grid",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.f_grid.clear();
                         for (const auto& item : split_list(v)) {
                             c.spec.f_grid.push_back(in_range(to_double(item), 0.0, true, 1.0, true));
                         }
                     },
                     [=](const RunConfig& c) { return join(c.spec.f_grid, num); }});
        k.push_back({"workers",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.workers = static_cast<unsigned>(small_int(to_uint(v), 1));
                     },
                     [=](const RunConfig& c) { return uint(c.spec.workers); }});

        // Hardware path
        k.push_back({"comparator",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "fixed") {
                             c.spec.hw.comparator.mode = ComparatorMode::FixedReference;
                         } else if (v == "tracking") {
                             c.spec.hw.comparator.mode = ComparatorMode::ColumnTracking;
                         } else {
                             throw BadValue{"expected 'fixed' or 'tracking'"};
                         }
                     },
                     [](const RunConfig& c) {
                         return std::string(c.spec.hw.comparator.mode == ComparatorMode::FixedReference ? "fixed"
                                                                                                        : "tracking");
                     }});
        k.push_back({"kappa",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.hw.comparator.kappa = in_range(to_double(v), 0.0, false, 1.0, true);
                     },
                     [=](const RunConfig& c) { return num(c.spec.hw.comparator.kappa); }});
        k.push_back({"i_ref",
                     [](RunConfig& c, const std::string& v) { c.spec.hw.comparator.i_ref = non_negative(to_double(v)); },
                     [=](const RunConfig& c) { return num(c.spec.hw.comparator.i_ref); }});
        k.push_back({"readout",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "physical") {
                             c.spec.hw.options.readout = ReadoutModel::Physical;
                         } else if (v == "quantized") {
                             c.spec.hw.options.readout = ReadoutModel::Quantized;
                         } else {
                             throw BadValue{"expected 'physical' or 'quantized'"};
                         }
                     },
                     [](const RunConfig& c) {
                         return std::string(c.spec.hw.options.readout == ReadoutModel::Physical ? "physical"
                                                                                                 : "quantized");
                     }});
        k.push_back({"noise", [](RunConfig& c, const std::string& v) { c.spec.hw.noise.enabled = to_bool(v); },
                     [](const RunConfig& c) { return from_bool(c.spec.hw.noise.enabled); }});
        k.push_back({"noise_sigma",
                     [](RunConfig& c, const std::string& v) { c.spec.hw.noise.sigma = non_negative(to_double(v)); },
                     [=](const RunConfig& c) { return num(c.spec.hw.noise.sigma); }});
        k.push_back({"noise_seed", [](RunConfig& c, const std::string& v) { c.spec.hw.noise.rng_seed = to_uint(v); },
                     [=](const RunConfig& c) { return uint(c.spec.hw.noise.rng_seed); }});
        k.push_back({"v_read",
                     [](RunConfig& c, const std::string& v) { c.spec.hw.options.v_read = positive(to_double(v)); },
                     [=](const RunConfig& c) { return num(c.spec.hw.options.v_read); }});
        k.push_back({"v_half",
                     [](RunConfig& c, const std::string& v) { c.spec.hw.options.v_half = non_negative(to_double(v)); },
                     [=](const RunConfig& c) { return num(c.spec.hw.options.v_half); }});
        k.push_back({"v_program",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.hw.options.programming.v_program = positive(to_double(v));
                     },
                     [=](const RunConfig& c) { return num(c.spec.hw.options.programming.v_program); }});
        k.push_back({"pulse_width",
                     [](RunConfig& c, const std::string& v) { c.spec.hw.options.programming.width = positive(to_double(v)); },
                     [=](const RunConfig& c) { return num(c.spec.hw.options.programming.width); }});
        k.push_back({"dt",
                     [](RunConfig& c, const std::string& v) { c.spec.hw.options.programming.dt = positive(to_double(v)); },
                     [=](const RunConfig& c) { return num(c.spec.hw.options.programming.dt); }});

        // Device
        auto dev = [&k, num](const std::string& name, double DeviceParams::*field, double (*check)(double)) {
            k.push_back({name,
                         [field, check](RunConfig& c, const std::string& v) {
                             c.spec.hw.options.params.*field = check(to_double(v));
                         },
                         [field, num](const RunConfig& c) { return num(c.spec.hw.options.params.*field); }});
        };
        dev("g_on", &DeviceParams::g_on, positive);
        dev("g_off", &DeviceParams::g_off, non_negative);
        dev("thickness", &DeviceParams::thickness, positive);
        dev("v_on", &DeviceParams::v_on, negative);
        dev("v_off", &DeviceParams::v_off, positive);
        dev("k_on", &DeviceParams::k_on, negative);
        dev("k_off", &DeviceParams::k_off, positive);
        dev("alpha_on", &DeviceParams::alpha_on, positive);
        dev("alpha_off", &DeviceParams::alpha_off, positive);
        dev("tau", &DeviceParams::tau, non_negative);
        dev("delta", &DeviceParams::delta, [](double v) { return in_range(v, 0.0, true, 1.0, true); });
        k.push_back({"window_p",
                     [](RunConfig& c, const std::string& v) { c.spec.hw.options.params.p = small_int(to_uint(v), 1); },
                     [=](const RunConfig& c) { return uint(c.spec.hw.options.params.p); }});

        // Output
        k.push_back({"output_dir",
                     [](RunConfig& c, const std::string& v) {
                         if (v.empty()) throw BadValue{"empty path"};
                         c.output_dir = v;
                     },
                     [](const RunConfig& c) { return c.output_dir; }});
        k.push_back({"plots", [](RunConfig& c, const std::string& v) { c.plots = to_bool(v); },
                     [](const RunConfig& c) { return from_bool(c.plots); }});
        return k;
    }();
    return table;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == key; });
    if (it == table.end()) {
        throw ParseError(key, line, "unknown key");
    }
    if (value.empty()) {
        throw ParseError(key, line, "missing value");
    }
    try {
        it->set(cfg, value);
    } catch (const BadValue& bad) {
        throw ParseError(key, line, bad.what);
    }
}

// Splits "key = value", dropping a trailing comment. Returns false for
// blank and comment-only lines.
bool split_line(const std::string& raw, int line, std::string& key, std::string& value) {
    std::string text = raw;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    text = trim(text);
    if (text.empty()) return false;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
        throw ParseError(text, line, "expected 'key = value'");
    }
    key = trim(text.substr(0, eq));
    value = trim(text.substr(eq + 1));
    if (key.empty()) {
        throw ParseError("", line, "missing key");
    }
    return true;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string key;
        std::string value;
        if (!split_line(raw, line, key, value)) continue;
        if (!seen.insert(key).second) {
            throw ParseError(key, line, "duplicate key");
        }
        apply(cfg, key, value, line);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_setting(RunConfig& cfg, const std::string& assignment, int line) {
    std::string key;
    std::string value;
    if (!split_line(assignment, line, key, value)) {
        throw ParseError("", line, "empty setting");
    }
    apply(cfg, key, value, line);
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& k : keys()) {
        if (!k.get) continue;
        out += k.name + " = " + k.get(cfg) + "\n";
    }
    return out;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> names;
    for (const auto& k : keys()) names.push_back(k.name);
    return names;
}

} // namespace metasyn

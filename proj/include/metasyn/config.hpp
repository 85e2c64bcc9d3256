#pragma once

#include <string>
#include <vector>

#include "metasyn/experiments.hpp"

namespace metasyn {

/// Flat run configuration read from a `key = value` document.
///
/// Lines are `key = value`; `#` starts a comment; blank lines are ignored.
/// Lists are comma separated. Every key is optional and defaulted, so an
/// empty document is a valid 128x128, C = f = 0.25, 3-level, 10-seed run.
struct RunConfig {
    ExperimentSpec spec;
    std::string output_dir = "out";
    bool plots = true;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws ParseError naming the key and the 1-based line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Applies one `key = value` assignment on top of cfg (command-line overrides).
void apply_setting(RunConfig& cfg, const std::string& assignment, int line = 0);

// Every key, in documentation order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

// Names of all accepted keys.
std::vector<std::string> config_keys();

} // namespace metasyn

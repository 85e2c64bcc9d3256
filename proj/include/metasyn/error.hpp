#pragma once

#include <stdexcept>
#include <string>

namespace metasyn {

// Violated precondition on an API call (bad index, mismatched lengths, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Invalid network or experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Device parameters that do not produce a usable metastate ladder.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config parse failure; carries the offending key and 1-based line (0 when
// the setting did not come from a file).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string key, int line, const std::string& what)
        : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                             (key.empty() ? std::string() : "'" + key + "': ") + what),
          key_(std::move(key)),
          line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

} // namespace metasyn

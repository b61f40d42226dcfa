#pragma once

#include "kirchlog/constants.hpp"
#include "kirchlog/errors.hpp"
#include "kirchlog/evolution.hpp"
#include "kirchlog/grid.hpp"
#include "kirchlog/wells.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kirchlog {

/// Invalid configuration. line is 1-based, 0 when the problem is not tied
/// to a line (command-line overrides, missing file).
class ConfigError : public Error {
public:
    ConfigError(std::string source, int line, const std::string& message);
    const std::string& source() const { return source_; }
    int line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    std::string source_;
    int line_;
    std::string message_;
};

struct ConfigEntry {
    std::string value;
    int line = 0;
};

/// Flat view of a configuration file: dotted key -> raw value.
struct ConfigMap {
    std::string source = "<config>";
    std::map<std::string, ConfigEntry> entries;

    void set(const std::string& key, const std::string& value, int line = 0);
};

/// key = value lines, '#' comments, optional [section] headers that prefix
/// the following keys.
ConfigMap parse_key_value(const std::string& text, const std::string& source = "<config>");

/// Nested JSON objects flattened into dotted keys.
ConfigMap parse_json_config(const std::string& text, const std::string& source = "<config>");

/// Picks the parser from the extension (.json) or the first non-blank character.
ConfigMap load_config_file(const std::string& path);

enum class InitialShape { Sine, Bump, Random };
enum class InitialScaling { None, ToI, ToJ };

struct InitialSpec {
    InitialShape shape = InitialShape::Sine;
    int mode = 1;           // sine mode
    int modes = 4;          // random: number of sine modes
    double amplitude = 0.1;
    InitialScaling scale = InitialScaling::None;
    bool targetIPositive = true;     // to_I
    double targetJFraction = 0.5;    // to_J: J(u0) = fraction * d
    bool branchAbove = false;        // to_J: beyond the Nehari scale
};

struct SweepAxis {
    std::string key;
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;
    bool logarithmic = false;

    std::vector<double> values() const;
};

struct OutputSpec {
    int traceStride = 1;
    double snapshotT0 = 0.25;  // geometric snapshot schedule start
    std::vector<double> deltas{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
};

struct ExperimentConfig {
    ModelParams model;
    int gridN = 127;
    StepperConfig stepper;
    InitialSpec initial;
    WellOptions wells;
    ConstantOptions constants;
    std::uint64_t seed = 1;
    std::optional<SweepAxis> axis1;
    std::optional<SweepAxis> axis2;
    int threads = 0;  // 0: hardware concurrency
    OutputSpec output;
};

/// Builds and validates a config. Throws ConfigError pointing at the
/// offending line.
ExperimentConfig build_config(const ConfigMap& map);

/// Sets one numeric key (sweep axes) and re-validates. Throws ConfigError.
void set_config_value(ExperimentConfig& cfg, const std::string& key, double value);

/// Canonical key=value rendering of every recognised key (used for echoes).
std::map<std::string, std::string> describe_config(const ExperimentConfig& cfg);

std::vector<std::string> known_config_keys();

}  // namespace kirchlog

#include "kirchlog/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>

namespace kirchlog {

namespace {

std::string format_message(const std::string& source, int line, const std::string& message) {
    std::ostringstream os;
    os << source;
    if (line > 0) os << ':' << line;
    os << ": " << message;
    return os.str();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// value parsers throw std::invalid_argument with a user-facing message
double to_double(const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
        throw std::invalid_argument("expected a finite number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
        throw std::invalid_argument("expected an integer, got '" + v + "'");
    return x;
}

int to_int(const std::string& v) {
    const long long x = to_integer(v);
    if (x < -2147483647LL || x > 2147483647LL)
        throw std::invalid_argument("integer out of range: '" + v + "'");
    return static_cast<int>(x);
}

std::vector<double> to_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
    if (out.empty()) throw std::invalid_argument("expected a comma-separated list of numbers");
    return out;
}

SweepAxis to_axis(const std::string& v) {
    // key:lo:hi:count[:log|lin]
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() < 4 || parts.size() > 5)
        throw std::invalid_argument("sweep axis must look like key:lo:hi:count[:log|lin]");
    SweepAxis a;
    a.key = parts[0];
    a.lo = to_double(parts[1]);
    a.hi = to_double(parts[2]);
    a.count = to_int(parts[3]);
    if (parts.size() == 5) {
        if (parts[4] == "log")
            a.logarithmic = true;
        else if (parts[4] != "lin")
            throw std::invalid_argument("sweep spacing must be log or lin, got '" + parts[4] + "'");
    }
    if (a.count < 1) throw std::invalid_argument("sweep axis needs at least one point");
    if (a.logarithmic && !(a.lo > 0.0 && a.hi > 0.0))
        throw std::invalid_argument("logarithmic sweep needs positive bounds");
    return a;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"model.a", [](auto& c, auto& v) { c.model.a = to_double(v); }},
        {"model.b", [](auto& c, auto& v) { c.model.b = to_double(v); }},
        {"model.k", [](auto& c, auto& v) { c.model.k = to_int(v); }},
        {"model.p", [](auto& c, auto& v) { c.model.p = to_double(v); }},
        {"model.q", [](auto& c, auto& v) { c.model.q = to_double(v); }},
        {"model.L", [](auto& c, auto& v) { c.model.length = to_double(v); }},
        {"grid.N", [](auto& c, auto& v) { c.gridN = to_int(v); }},
        {"stepper.dt0", [](auto& c, auto& v) { c.stepper.dt0 = to_double(v); }},
        {"stepper.dt_min", [](auto& c, auto& v) { c.stepper.dtMin = to_double(v); }},
        {"stepper.dt_max", [](auto& c, auto& v) { c.stepper.dtMax = to_double(v); }},
        {"stepper.safety", [](auto& c, auto& v) { c.stepper.safety = to_double(v); }},
        {"stepper.blowup_threshold",
         [](auto& c, auto& v) { c.stepper.blowupNormThreshold = to_double(v); }},
        {"stepper.extinction_threshold",
         [](auto& c, auto& v) { c.stepper.extinctionThreshold = to_double(v); }},
        {"stepper.t_end", [](auto& c, auto& v) { c.stepper.tEnd = to_double(v); }},
        {"stepper.scheme",
         [](auto& c, auto& v) {
             try {
                 c.stepper.scheme = scheme_from_string(v);
             } catch (const ParameterError& e) {
                 throw std::invalid_argument(e.what());
             }
         }},
        {"stepper.newton_tol", [](auto& c, auto& v) { c.stepper.nonlinearSolverTol = to_double(v); }},
        {"stepper.max_newton_iters", [](auto& c, auto& v) { c.stepper.maxNewtonIters = to_int(v); }},
        {"stepper.energy_rtol", [](auto& c, auto& v) { c.stepper.energyRtol = to_double(v); }},
        {"stepper.energy_atol", [](auto& c, auto& v) { c.stepper.energyAtol = to_double(v); }},
        {"stepper.implicit_after",
         [](auto& c, auto& v) { c.stepper.implicitAfterRejections = to_int(v); }},
        {"stepper.decay_fraction", [](auto& c, auto& v) { c.stepper.decayFraction = to_double(v); }},
        {"stepper.max_steps", [](auto& c, auto& v) { c.stepper.maxSteps = to_integer(v); }},
        {"initial.shape",
         [](auto& c, auto& v) {
             if (v == "sine")
                 c.initial.shape = InitialShape::Sine;
             else if (v == "bump")
                 c.initial.shape = InitialShape::Bump;
             else if (v == "random")
                 c.initial.shape = InitialShape::Random;
             else
                 throw std::invalid_argument("shape must be sine, bump or random, got '" + v + "'");
         }},
        {"initial.mode", [](auto& c, auto& v) { c.initial.mode = to_int(v); }},
        {"initial.modes", [](auto& c, auto& v) { c.initial.modes = to_int(v); }},
        {"initial.amplitude", [](auto& c, auto& v) { c.initial.amplitude = to_double(v); }},
        {"initial.scale",
         [](auto& c, auto& v) {
             if (v == "none")
                 c.initial.scale = InitialScaling::None;
             else if (v == "to_I")
                 c.initial.scale = InitialScaling::ToI;
             else if (v == "to_J")
                 c.initial.scale = InitialScaling::ToJ;
             else
                 throw std::invalid_argument("scale must be none, to_I or to_J, got '" + v + "'");
         }},
        {"initial.target_I",
         [](auto& c, auto& v) {
             if (v == "positive")
                 c.initial.targetIPositive = true;
             else if (v == "negative")
                 c.initial.targetIPositive = false;
             else
                 throw std::invalid_argument("target_I must be positive or negative");
         }},
        {"initial.target_J_fraction",
         [](auto& c, auto& v) { c.initial.targetJFraction = to_double(v); }},
        {"initial.branch",
         [](auto& c, auto& v) {
             if (v == "below")
                 c.initial.branchAbove = false;
             else if (v == "above")
                 c.initial.branchAbove = true;
             else
                 throw std::invalid_argument("branch must be below or above");
         }},
        {"wells.restarts", [](auto& c, auto& v) { c.wells.restarts = to_int(v); }},
        {"wells.max_iterations", [](auto& c, auto& v) { c.wells.max_iterations = to_int(v); }},
        {"constants.restarts", [](auto& c, auto& v) { c.constants.restarts = to_int(v); }},
        {"constants.max_iterations",
         [](auto& c, auto& v) { c.constants.max_iterations = to_int(v); }},
        {"seed",
         [](auto& c, auto& v) {
             const long long s = to_integer(v);
             if (s < 0) throw std::invalid_argument("seed must be nonnegative");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"sweep.axis1", [](auto& c, auto& v) { c.axis1 = to_axis(v); }},
        {"sweep.axis2", [](auto& c, auto& v) { c.axis2 = to_axis(v); }},
        {"sweep.threads", [](auto& c, auto& v) { c.threads = to_int(v); }},
        {"output.trace_stride", [](auto& c, auto& v) { c.output.traceStride = to_int(v); }},
        {"output.snapshot_t0", [](auto& c, auto& v) { c.output.snapshotT0 = to_double(v); }},
        {"output.deltas", [](auto& c, auto& v) { c.output.deltas = to_list(v); }},
    };
    return table;
}

bool is_numeric_key(const std::string& key) {
    static const std::vector<std::string> non_numeric = {
        "stepper.scheme", "initial.shape", "initial.scale", "initial.target_I", "initial.branch",
        "sweep.axis1",    "sweep.axis2",   "output.deltas"};
    return std::find(non_numeric.begin(), non_numeric.end(), key) == non_numeric.end();
}

bool is_integer_key(const std::string& key) {
    static const std::vector<std::string> ints = {
        "model.k",         "grid.N",          "stepper.max_newton_iters", "stepper.implicit_after",
        "stepper.max_steps", "initial.mode",  "initial.modes",            "wells.restarts",
        "wells.max_iterations", "constants.restarts", "constants.max_iterations", "sweep.threads",
        "output.trace_stride"};
    return std::find(ints.begin(), ints.end(), key) != ints.end();
}

void flatten(const nlohmann::json& j, const std::string& prefix, const std::string& text,
             ConfigMap& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            flatten(*it, key, text, out);
            continue;
        }
        // line of the first occurrence of the quoted leaf name
        int line = 0;
        const auto pos = text.find("\"" + it.key() + "\"");
        if (pos != std::string::npos)
            line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
        std::string value;
        if (it->is_string()) {
            value = it->get<std::string>();
        } else if (it->is_boolean()) {
            value = it->get<bool>() ? "true" : "false";
        } else if (it->is_number_integer()) {
            value = std::to_string(it->get<long long>());
        } else if (it->is_number()) {
            value = fmt_double(it->get<double>());
        } else if (it->is_array()) {
            for (std::size_t i = 0; i < it->size(); ++i) {
                if (!(*it)[i].is_number())
                    throw ConfigError(out.source, line, "array '" + key + "' must hold numbers");
                if (i) value += ",";
                value += fmt_double((*it)[i].get<double>());
            }
        } else {
            throw ConfigError(out.source, line, "unsupported value for '" + key + "'");
        }
        if (out.entries.count(key)) throw ConfigError(out.source, line, "duplicate key '" + key + "'");
        out.set(key, value, line);
    }
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : Error(format_message(source, line, message)),
      source_(std::move(source)),
      line_(line),
      message_(message) {}

void ConfigMap::set(const std::string& key, const std::string& value, int line) {
    entries[key] = ConfigEntry{value, line};
}

ConfigMap parse_key_value(const std::string& text, const std::string& source) {
    ConfigMap map;
    map.source = source;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3)
                throw ConfigError(source, line, "malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source, line, "expected key = value, got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError(source, line, "missing key before '='");
        if (!section.empty()) key = section + "." + key;
        if (map.entries.count(key))
            throw ConfigError(source, line,
                              "duplicate key '" + key + "' (first set on line " +
                                  std::to_string(map.entries[key].line) + ")");
        map.set(key, value, line);
    }
    return map;
}

ConfigMap parse_json_config(const std::string& text, const std::string& source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
        throw ConfigError(source, line, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError(source, 1, "top-level JSON value must be an object");
    ConfigMap map;
    map.source = source;
    flatten(j, "", text, map);
    return map;
}

ConfigMap load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open configuration file");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool json = (path.size() >= 5 && path.substr(path.size() - 5) == ".json") ||
                      (first != std::string::npos && text[first] == '{');
    return json ? parse_json_config(text, path) : parse_key_value(text, path);
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> v;
    for (int i = 0; i < count; ++i) {
        const double s = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        v.push_back(logarithmic ? lo * std::pow(hi / lo, s) : lo + s * (hi - lo));
    }
    return v;
}

ExperimentConfig build_config(const ConfigMap& map) {
    ExperimentConfig cfg;
    const auto& table = setters();
    for (const auto& [key, entry] : map.entries) {
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError(map.source, entry.line, "unknown key '" + key + "'");
        try {
            it->second(cfg, entry.value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(map.source, entry.line, key + ": " + e.what());
        }
    }
    auto line_of = [&](const std::string& key) {
        const auto it = map.entries.find(key);
        return it == map.entries.end() ? 0 : it->second.line;
    };
    auto fail = [&](const std::string& key, const std::string& msg) {
        throw ConfigError(map.source, line_of(key), msg);
    };

    cfg.wells.seed = cfg.seed;
    cfg.constants.seed = cfg.seed;

    auto first_present = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys)
            if (map.entries.count(k)) return std::string(k);
        return std::string(*keys.begin());
    };
    try {
        cfg.model.validate();
    } catch (const ParameterError& e) {
        const ModelParams& m = cfg.model;
        std::string key = "model.q";
        if (!(m.a > 0.0))
            key = "model.a";
        else if (!(m.b > 0.0))
            key = "model.b";
        else if (m.k != 0 && m.k != 1)
            key = "model.k";
        else if (!(m.p >= 2.0))
            key = "model.p";
        else if (!(m.length > 0.0))
            key = "model.L";
        else
            key = first_present({"model.q", "model.p"});
        fail(key, e.what());
    }
    if (cfg.gridN < 2) fail("grid.N", "grid.N must be at least 2");
    try {
        cfg.stepper.validate();
    } catch (const ParameterError& e) {
        const StepperConfig& st = cfg.stepper;
        std::string key;
        if (!(st.dtMin > 0.0) || !(st.dtMin <= st.dt0) || !(st.dt0 <= st.dtMax))
            key = first_present({"stepper.dt0", "stepper.dt_min", "stepper.dt_max"});
        else if (!(st.blowupNormThreshold > 0.0) || !(st.extinctionThreshold > 0.0))
            key = first_present({"stepper.blowup_threshold", "stepper.extinction_threshold"});
        else if (!(st.safety > 0.0) || st.safety > 1.0)
            key = "stepper.safety";
        else if (!(st.tEnd > 0.0))
            key = "stepper.t_end";
        else if (!(st.energyRtol > 0.0) || st.energyAtol < 0.0)
            key = first_present({"stepper.energy_rtol", "stepper.energy_atol"});
        else
            key = first_present({"stepper.newton_tol", "stepper.max_newton_iters"});
        fail(key, e.what());
    }
    if (cfg.initial.mode < 1) fail("initial.mode", "initial.mode must be >= 1");
    if (cfg.initial.modes < 1) fail("initial.modes", "initial.modes must be >= 1");
    if (!(cfg.initial.amplitude > 0.0)) fail("initial.amplitude", "initial.amplitude must be positive");
    if (cfg.initial.scale == InitialScaling::ToJ && !(cfg.initial.targetJFraction < 1.0) &&
        !cfg.initial.branchAbove)
        fail("initial.target_J_fraction", "the lower branch needs target_J_fraction < 1");
    if (cfg.wells.restarts < 1) fail("wells.restarts", "wells.restarts must be >= 1");
    if (cfg.constants.restarts < 1) fail("constants.restarts", "constants.restarts must be >= 1");
    if (cfg.threads < 0) fail("sweep.threads", "sweep.threads must be >= 0");
    if (cfg.output.traceStride < 1) fail("output.trace_stride", "output.trace_stride must be >= 1");
    if (!(cfg.output.snapshotT0 > 0.0)) fail("output.snapshot_t0", "output.snapshot_t0 must be positive");
    for (double dl : cfg.output.deltas)
        if (!(dl > 0.0)) fail("output.deltas", "every delta must be positive");
    for (const auto* axis_key : {"sweep.axis1", "sweep.axis2"}) {
        const auto& axis = std::string(axis_key) == "sweep.axis1" ? cfg.axis1 : cfg.axis2;
        if (!axis) continue;
        if (!table.count(axis->key) || !is_numeric_key(axis->key) || axis->key == "seed" ||
            axis->key.rfind("sweep.", 0) == 0)
            fail(axis_key, "sweep axis key '" + axis->key + "' is not a numeric configuration key");
    }
    if (cfg.axis2 && !cfg.axis1) fail("sweep.axis2", "sweep.axis2 needs sweep.axis1");
    return cfg;
}

std::map<std::string, std::string> describe_config(const ExperimentConfig& c) {
    std::map<std::string, std::string> m;
    m["model.a"] = fmt_double(c.model.a);
    m["model.b"] = fmt_double(c.model.b);
    m["model.k"] = std::to_string(c.model.k);
    m["model.p"] = fmt_double(c.model.p);
    m["model.q"] = fmt_double(c.model.q);
    m["model.L"] = fmt_double(c.model.length);
    m["grid.N"] = std::to_string(c.gridN);
    m["stepper.dt0"] = fmt_double(c.stepper.dt0);
    m["stepper.dt_min"] = fmt_double(c.stepper.dtMin);
    m["stepper.dt_max"] = fmt_double(c.stepper.dtMax);
    m["stepper.safety"] = fmt_double(c.stepper.safety);
    m["stepper.blowup_threshold"] = fmt_double(c.stepper.blowupNormThreshold);
    m["stepper.extinction_threshold"] = fmt_double(c.stepper.extinctionThreshold);
    m["stepper.t_end"] = fmt_double(c.stepper.tEnd);
    m["stepper.scheme"] = to_string(c.stepper.scheme);
    m["stepper.newton_tol"] = fmt_double(c.stepper.nonlinearSolverTol);
    m["stepper.max_newton_iters"] = std::to_string(c.stepper.maxNewtonIters);
    m["stepper.energy_rtol"] = fmt_double(c.stepper.energyRtol);
    m["stepper.energy_atol"] = fmt_double(c.stepper.energyAtol);
    m["stepper.implicit_after"] = std::to_string(c.stepper.implicitAfterRejections);
    m["stepper.decay_fraction"] = fmt_double(c.stepper.decayFraction);
    m["stepper.max_steps"] = std::to_string(c.stepper.maxSteps);
    const char* shapes[] = {"sine", "bump", "random"};
    m["initial.shape"] = shapes[static_cast<int>(c.initial.shape)];
    m["initial.mode"] = std::to_string(c.initial.mode);
    m["initial.modes"] = std::to_string(c.initial.modes);
    m["initial.amplitude"] = fmt_double(c.initial.amplitude);
    const char* scales[] = {"none", "to_I", "to_J"};
    m["initial.scale"] = scales[static_cast<int>(c.initial.scale)];
    m["initial.target_I"] = c.initial.targetIPositive ? "positive" : "negative";
    m["initial.target_J_fraction"] = fmt_double(c.initial.targetJFraction);
    m["initial.branch"] = c.initial.branchAbove ? "above" : "below";
    m["wells.restarts"] = std::to_string(c.wells.restarts);
    m["wells.max_iterations"] = std::to_string(c.wells.max_iterations);
    m["constants.restarts"] = std::to_string(c.constants.restarts);
    m["constants.max_iterations"] = std::to_string(c.constants.max_iterations);
    m["seed"] = std::to_string(c.seed);
    auto axis = [](const SweepAxis& a) {
        return a.key + ":" + fmt_double(a.lo) + ":" + fmt_double(a.hi) + ":" +
               std::to_string(a.count) + ":" + (a.logarithmic ? "log" : "lin");
    };
    if (c.axis1) m["sweep.axis1"] = axis(*c.axis1);
    if (c.axis2) m["sweep.axis2"] = axis(*c.axis2);
    m["sweep.threads"] = std::to_string(c.threads);
    m["output.trace_stride"] = std::to_string(c.output.traceStride);
    m["output.snapshot_t0"] = fmt_double(c.output.snapshotT0);
    std::string deltas;
    for (std::size_t i = 0; i < c.output.deltas.size(); ++i)
        deltas += (i ? "," : "") + fmt_double(c.output.deltas[i]);
    m["output.deltas"] = deltas;
    return m;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, double value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end() || !is_numeric_key(key))
        throw ConfigError("<override>", 0, "'" + key + "' is not a numeric configuration key");
    ConfigMap map;
    map.source = "<override>";
    for (const auto& [k, v] : describe_config(cfg)) map.set(k, v);
    map.set(key, is_integer_key(key) ? std::to_string(std::llround(value)) : fmt_double(value));
    cfg = build_config(map);
}

std::vector<std::string> known_config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : setters()) keys.push_back(k);
    return keys;
}

}  // namespace kirchlog

#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vhd/params.hpp"
#include "vhd/state.hpp"

namespace vhd {

namespace detail {

// Full round-trip precision; every double has a unique 17-significant-digit
// decimal representation.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct InitialField {
    const char* name;
    double State::*member;
};

inline constexpr std::array<InitialField, 9> initial_fields{{
    {"S_h", &State::s_h},
    {"E_h", &State::e_h},
    {"I_h", &State::i_h},
    {"R_h", &State::r_h},
    {"m_q", &State::m_q},
    {"S_v", &State::s_v},
    {"E_v", &State::e_v},
    {"I_v", &State::i_v},
    {"G", &State::g},
}};

}  // namespace detail

inline const std::array<const char*, 6> output_selectors{
    "timeseries", "r0", "thresholds", "equilibria", "stability", "sensitivity"};

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A runnable scenario: parameters, initial state, horizon and solver knobs,
// plus the artifacts the run should produce.
struct ScenarioConfig {
    Params params;
    State initial;
    double horizon_days = 500.0;
    double sample_dt = 0.5;
    double tol = 1e-8;
    std::vector<std::string> outputs{"timeseries", "r0", "thresholds", "equilibria",
                                     "stability"};
    std::string name = "scenario";

    // Reference outbreak population: a small community with an established
    // infection and a seeded vector population.
    static ScenarioConfig defaults() {
        ScenarioConfig c;
        c.initial = State{6000, 2000, 1000, 1000, 1100, 300, 100, 100, 0};
        return c;
    }

    void validate() const {
        try {
            params.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (!initial.all_finite() || !initial.all_nonnegative())
            throw ConfigError("config: initial state must be finite and nonnegative");
        if (!(initial.total_hosts() > 0.0))
            throw ConfigError("config: initial host population must be positive");
        if (!(horizon_days > 0.0)) throw ConfigError("config: horizon_days must be positive");
        if (!(sample_dt > 0.0)) throw ConfigError("config: sample_dt must be positive");
        if (!(tol >= 1e-12 && tol <= 1e-2))
            throw ConfigError("config: tol must lie in [1e-12, 1e-2]");
        if (outputs.empty()) throw ConfigError("config: outputs must not be empty");
        for (const auto& sel : outputs) {
            bool known = false;
            for (const char* s : output_selectors) known = known || sel == s;
            if (!known) throw ConfigError("config: unknown output selector '" + sel + "'");
        }
    }
};

// The four reference scenarios: low / high mosquito-human contact, each with
// and without an initial stock of 20 fish.
inline const std::vector<std::pair<std::string, ScenarioConfig>>& presets() {
    static const auto table = [] {
        std::vector<std::pair<std::string, ScenarioConfig>> t;
        auto low_contact = [](ScenarioConfig c) {
            c.params.a_v = 0.25;
            c.params.c_vh = 0.2;
            c.params.c_hv = 0.25;
            return c;
        };
        ScenarioConfig a = low_contact(ScenarioConfig::defaults());
        a.name = "fig1a";
        ScenarioConfig b = low_contact(ScenarioConfig::defaults());
        b.initial.g = 20.0;
        b.name = "fig1b";
        ScenarioConfig c = ScenarioConfig::defaults();
        c.name = "fig1c";
        ScenarioConfig d = ScenarioConfig::defaults();
        d.initial.g = 20.0;
        d.name = "fig1d";
        t.emplace_back("fig1a", a);
        t.emplace_back("fig1b", b);
        t.emplace_back("fig1c", c);
        t.emplace_back("fig1d", d);
        return t;
    }();
    return table;
}

inline ScenarioConfig preset(const std::string& name) {
    for (const auto& [pname, cfg] : presets())
        if (pname == name) return cfg;
    throw ConfigError("config: unknown preset '" + name + "'");
}

namespace detail {

inline std::string trim(std::string s) {
    auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t b = 0, e = s.size();
    while (b < e && issp(s[b])) ++b;
    while (e > b && issp(s[e - 1])) --e;
    return s.substr(b, e - b);
}

inline double parse_double(const std::string& text, const std::string& where) {
    std::string t = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ConfigError(where + ": not a number: '" + t + "'");
    return v;
}

}  // namespace detail

// Parse a flat key = value scenario description. '#' starts a comment, blank
// lines are skipped, keys are parameter names, initial.<compartment>,
// horizon_days, sample_dt, tol, outputs (comma separated), or preset (which
// must come first and supplies the base values). Unknown keys are errors.
inline ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.name = origin;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool any_assignment = false;

    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        auto where = [&] { return origin + ":" + std::to_string(lineno); };

        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where() + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where() + ": empty key");

        if (key == "preset") {
            if (any_assignment)
                throw ConfigError(where() + ": preset must precede other settings");
            cfg = preset(value);
            cfg.name = origin;
            any_assignment = true;
            continue;
        }
        any_assignment = true;

        if (const ParamField* pf = find_param_field(key)) {
            cfg.params.*(pf->member) = detail::parse_double(value, where());
            continue;
        }
        if (key.rfind("initial.", 0) == 0) {
            std::string comp = key.substr(8);
            bool found = false;
            for (const auto& f : detail::initial_fields) {
                if (comp == f.name) {
                    cfg.initial.*(f.member) = detail::parse_double(value, where());
                    found = true;
                    break;
                }
            }
            if (!found) throw ConfigError(where() + ": unknown compartment '" + comp + "'");
            continue;
        }
        if (key == "horizon_days") {
            cfg.horizon_days = detail::parse_double(value, where());
            continue;
        }
        if (key == "sample_dt") {
            cfg.sample_dt = detail::parse_double(value, where());
            continue;
        }
        if (key == "tol") {
            cfg.tol = detail::parse_double(value, where());
            continue;
        }
        if (key == "outputs") {
            cfg.outputs.clear();
            std::string item;
            std::istringstream list(value);
            while (std::getline(list, item, ',')) {
                item = detail::trim(item);
                if (!item.empty()) cfg.outputs.push_back(item);
            }
            continue;
        }
        throw ConfigError(where() + ": unknown key '" + key + "'");
    }

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string stem = path;
    if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0)
        stem = stem.substr(0, dot);
    return parse_config(buf.str(), stem);
}

// Canonical text form: every field in a fixed order at full precision. Two
// configs are equivalent exactly when their canonical texts match.
inline std::string canonical_text(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& f : param_fields)
        out += std::string(f.name) + " = " + detail::format_g17(cfg.params.*(f.member)) + "\n";
    for (const auto& f : detail::initial_fields)
        out += "initial." + std::string(f.name) + " = " +
               detail::format_g17(cfg.initial.*(f.member)) + "\n";
    out += "horizon_days = " + detail::format_g17(cfg.horizon_days) + "\n";
    out += "sample_dt = " + detail::format_g17(cfg.sample_dt) + "\n";
    out += "tol = " + detail::format_g17(cfg.tol) + "\n";
    out += "outputs = ";
    for (std::size_t i = 0; i < cfg.outputs.size(); ++i)
        out += (i ? "," : "") + cfg.outputs[i];
    out += "\n";
    return out;
}

inline std::uint64_t config_hash(const ScenarioConfig& cfg) {
    // FNV-1a over the canonical text
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical_text(cfg)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace vhd

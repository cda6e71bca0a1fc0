#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vhd/config.hpp"
#include "vhd/equilibria.hpp"
#include "vhd/integrate.hpp"
#include "vhd/model.hpp"
#include "vhd/sensitivity.hpp"
#include "vhd/stability.hpp"

namespace vhd {

inline constexpr const char* csv_header = "t,S_h,E_h,I_h,R_h,m_q,S_v,E_v,I_v,G";

// Serialize at full precision so that identical runs give byte-identical
// files and parsing recovers the exact doubles.
inline void write_timeseries_csv(std::ostream& os, const Trajectory& traj) {
    os << csv_header << "\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << detail::format_g17(traj.t[i]);
        for (double v : traj.x[i].to_array()) os << "," << detail::format_g17(v);
        os << "\n";
    }
}

inline Trajectory read_timeseries_csv(std::istream& is) {
    Trajectory traj;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header) throw std::runtime_error("csv: unexpected header: " + line);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, 10> vals{};
        std::size_t pos = 0;
        for (int i = 0; i < 10; ++i) {
            auto comma = line.find(',', pos);
            std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                           : comma - pos);
            vals[i] = detail::parse_double(cell, "csv line " + std::to_string(lineno));
            if (comma == std::string::npos) {
                if (i != 9)
                    throw std::runtime_error("csv: short row at line " + std::to_string(lineno));
                break;
            }
            pos = comma + 1;
        }
        traj.t.push_back(vals[0]);
        std::array<double, 9> sv;
        std::copy(vals.begin() + 1, vals.end(), sv.begin());
        traj.x.push_back(State::from_array(sv));
    }
    return traj;
}

namespace detail {

inline std::string format_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

// R0 with selected parameters factored out of the closed form, e.g.
// R0 = 32.3028 * a_v * sqrt(c_vh*c_hv) at baseline rates. Supported free
// parameters: a_v (linear) and c_vh, c_hv (under the square root).
struct FormulaReport {
    double coefficient = 0.0;
    std::string expression;
};

inline FormulaReport report_formulas(const Params& p, const std::vector<std::string>& free) {
    p.validate();
    bool free_av = false, free_cvh = false, free_chv = false;
    for (const auto& name : free) {
        if (name == "a_v")
            free_av = true;
        else if (name == "c_vh")
            free_cvh = true;
        else if (name == "c_hv")
            free_chv = true;
        else
            throw std::invalid_argument(
                "report_formulas: unsupported free parameter '" + name +
                "' (supported: a_v, c_vh, c_hv)");
    }

    Params base = p;
    if (free_av) base.a_v = 1.0;
    if (free_cvh) base.c_vh = 1.0;
    if (free_chv) base.c_hv = 1.0;

    FormulaReport rep;
    rep.coefficient = r0(base);
    rep.expression = "R0 = " + detail::format_num(rep.coefficient);
    if (free_av) rep.expression += " * a_v";
    if (free_cvh && free_chv)
        rep.expression += " * sqrt(c_vh*c_hv)";
    else if (free_cvh)
        rep.expression += " * sqrt(c_vh)";
    else if (free_chv)
        rep.expression += " * sqrt(c_hv)";
    return rep;
}

namespace detail {

inline void render_state(std::ostream& os, const State& s) {
    for (std::size_t i = 0; i < State::size; ++i)
        os << (i ? ", " : "") << State::names[i] << " = " << format_num(s[i]);
}

}  // namespace detail

inline bool wants_output(const ScenarioConfig& cfg, const std::string& selector) {
    for (const auto& s : cfg.outputs)
        if (s == selector) return true;
    return false;
}

// Plain-text analysis: reproduction number, survival thresholds, all eight
// equilibria with existence verdicts, and the stability classification of
// every existing equilibrium.
inline std::string render_analysis_report(const ScenarioConfig& cfg) {
    std::ostringstream os;
    const Params& p = cfg.params;
    os << "scenario: " << cfg.name << "\n";

    if (wants_output(cfg, "r0")) {
        R0Split s = r0_split(p);
        os << "\nreproduction number\n";
        os << "  R0   = " << detail::format_num(s.r0) << "\n";
        os << "  R0_h = " << detail::format_num(s.host_factor)
           << "  (host side: a_v c_vh nu_h / (A B))\n";
        os << "  R0_v = " << detail::format_num(s.vector_factor)
           << "  (vector side: a_v c_hv nu_v / ((d_v+d_iv)(d_v+nu_v)))\n";
    }
    if (wants_output(cfg, "thresholds")) {
        os << "\nmosquito offspring numbers\n";
        os << "  O_0 (no fish)           = " << detail::format_num(threshold_o0(p)) << "\n";
        os << "  O   (fish at capacity)  = " << detail::format_num(threshold_o(p)) << "\n";
    }

    bool want_eq = wants_output(cfg, "equilibria");
    bool want_st = wants_output(cfg, "stability");
    if (want_eq || want_st) {
        os << "\nequilibria\n";
        for (const Equilibrium& eq : all_equilibria(p)) {
            os << "  " << kind_name(eq.kind) << " (" << kind_description(eq.kind) << "): "
               << (eq.exists ? "exists" : "does not exist") << "\n";
            for (const auto& c : eq.checks)
                os << "      check: " << c.what << " = " << detail::format_num(c.value)
                   << " vs " << detail::format_num(c.bound) << " -> "
                   << (c.pass ? "ok" : "violated") << "\n";
            if (!eq.exists) continue;
            if (want_eq) {
                os << "      state: ";
                detail::render_state(os, eq.state);
                os << "\n      residual (max |d/dt|): " << detail::format_num(eq.residual)
                   << "\n";
            }
            if (want_st) {
                StabilityReport rep = classify(eq, p);
                os << "      stability: " << stability_name(rep.classification)
                   << " (max Re lambda = " << detail::format_num(rep.max_real_part) << ")\n";
                if (rep.theorem_stable.has_value())
                    os << "      closed-form verdict: "
                       << (*rep.theorem_stable ? "stable" : "unstable") << ", "
                       << (rep.agrees_with_theorem ? "agrees" : "DISAGREES") << "\n";
            }
        }
    }
    return os.str();
}

inline std::string render_sensitivity_report(const Params& p) {
    std::ostringstream os;
    for (SensitivityTarget t :
         {SensitivityTarget::r0_squared, SensitivityTarget::o0, SensitivityTarget::o}) {
        SensitivityTable an = sensitivity_analytic(t, p);
        SensitivityTable fd = sensitivity_finite_difference(t, p);
        os << "sensitivity of " << target_name(t) << " (value " << detail::format_num(an.value)
           << ")\n";
        os << "  parameter      analytic        finite-difference\n";
        for (std::size_t i = 0; i < an.entries.size(); ++i) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "  %-12s %15.9g %18.9g\n", an.entries[i].param,
                          an.entries[i].index, fd.entries[i].index);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

struct RunResult {
    std::vector<std::filesystem::path> artifacts;
    Trajectory trajectory;  // populated when a timeseries was produced
};

// Execute a scenario: integrate (when a timeseries is requested) and write the
// selected artifacts into out_dir. On integration failure the partial
// trajectory is kept next to the intended CSV with a ".partial" suffix and the
// failure is rethrown for the caller to report.
inline RunResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    RunResult result;

    if (wants_output(cfg, "timeseries")) {
        auto csv_path = out_dir / (cfg.name + ".csv");
        try {
            result.trajectory =
                integrate(cfg.initial, cfg.params, 0.0, cfg.horizon_days, cfg.sample_dt, cfg.tol);
        } catch (const IntegrationFailure& fail) {
            auto partial_path = csv_path;
            partial_path += ".partial";
            std::ofstream os(partial_path, std::ios::binary);
            write_timeseries_csv(os, fail.partial);
            throw;
        }
        std::ofstream os(csv_path, std::ios::binary);
        write_timeseries_csv(os, result.trajectory);
        result.artifacts.push_back(csv_path);
    }

    bool wants_report = wants_output(cfg, "r0") || wants_output(cfg, "thresholds") ||
                        wants_output(cfg, "equilibria") || wants_output(cfg, "stability");
    if (wants_report) {
        auto report_path = out_dir / (cfg.name + "_report.txt");
        std::ofstream os(report_path, std::ios::binary);
        os << render_analysis_report(cfg);
        result.artifacts.push_back(report_path);
    }
    if (wants_output(cfg, "sensitivity")) {
        auto sens_path = out_dir / (cfg.name + "_sensitivity.txt");
        std::ofstream os(sens_path, std::ios::binary);
        os << render_sensitivity_report(cfg.params);
        result.artifacts.push_back(sens_path);
    }
    return result;
}

}  // namespace vhd

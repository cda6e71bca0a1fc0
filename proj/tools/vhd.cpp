// Command line front end: simulate scenarios, analyze equilibria and
// stability, tabulate sensitivity indices, and print factored reproduction
// number formulas. Scenario arguments accept either a config file path or a
// built-in preset name.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vhd/io.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

vhd::ScenarioConfig resolve_scenario(const std::string& arg) {
    if (std::filesystem::exists(arg)) return vhd::load_config(arg);
    for (const auto& [name, cfg] : vhd::presets())
        if (name == arg) return cfg;
    std::string names;
    for (const auto& [name, cfg] : vhd::presets()) names += (names.empty() ? "" : ", ") + name;
    throw vhd::ConfigError("'" + arg + "' is neither a config file nor a preset (presets: " +
                           names + ")");
}

std::filesystem::path out_dir() {
    if (const char* env = std::getenv("VHD_OUT_DIR")) return env;
    return "out";
}

int cmd_simulate(const std::string& scenario) {
    vhd::ScenarioConfig cfg = resolve_scenario(scenario);
    vhd::RunResult result = vhd::run_scenario(cfg, out_dir());
    std::cout << "scenario " << cfg.name << " (config hash " << std::hex
              << vhd::config_hash(cfg) << std::dec << ")\n";
    if (!result.trajectory.t.empty()) {
        const auto& st = result.trajectory.stats;
        std::cout << "integrated " << result.trajectory.t.back() << " days in "
                  << st.steps_accepted << " steps (" << st.steps_rejected << " rejected, "
                  << st.rhs_evals << " derivative evaluations)\n";
    }
    for (const auto& a : result.artifacts) std::cout << "wrote " << a.string() << "\n";
    return 0;
}

int cmd_analyze(const std::string& scenario) {
    vhd::ScenarioConfig cfg = resolve_scenario(scenario);
    // Analysis always covers the full report, independent of the scenario's
    // output selection.
    cfg.outputs = {"r0", "thresholds", "equilibria", "stability"};
    std::cout << vhd::render_analysis_report(cfg);
    return 0;
}

int cmd_sensitivity(const std::string& scenario, const std::string& target) {
    vhd::ScenarioConfig cfg = resolve_scenario(scenario);
    if (target.empty()) {
        std::cout << vhd::render_sensitivity_report(cfg.params);
        return 0;
    }
    vhd::SensitivityTarget t;
    if (target == "r0sq")
        t = vhd::SensitivityTarget::r0_squared;
    else if (target == "o0")
        t = vhd::SensitivityTarget::o0;
    else if (target == "o")
        t = vhd::SensitivityTarget::o;
    else
        throw vhd::ConfigError("unknown sensitivity target '" + target +
                               "' (expected r0sq, o0, or o)");
    vhd::SensitivityTable an = vhd::sensitivity_analytic(t, cfg.params);
    vhd::SensitivityTable fd = vhd::sensitivity_finite_difference(t, cfg.params);
    std::cout << "sensitivity of " << vhd::target_name(t) << " (value "
              << vhd::detail::format_num(an.value) << ")\n";
    std::cout << "  parameter      analytic        finite-difference\n";
    for (std::size_t i = 0; i < an.entries.size(); ++i) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "  %-12s %15.9g %18.9g\n", an.entries[i].param,
                      an.entries[i].index, fd.entries[i].index);
        std::cout << buf;
    }
    return 0;
}

int cmd_presets_list() {
    for (const auto& [name, cfg] : vhd::presets()) {
        std::cout << name << ": a_v=" << cfg.params.a_v << " c_vh=" << cfg.params.c_vh
                  << " c_hv=" << cfg.params.c_hv << " G(0)=" << cfg.initial.g
                  << " horizon=" << cfg.horizon_days << "d\n";
    }
    return 0;
}

int cmd_report_formulas(const std::string& scenario, const std::vector<std::string>& free) {
    vhd::Params p =
        scenario.empty() ? vhd::Params::baseline() : resolve_scenario(scenario).params;
    vhd::FormulaReport rep = vhd::report_formulas(p, free);
    std::cout << rep.expression << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vector-host dynamics with larvae-eating fish"};
    app.require_subcommand(1);

    std::string scenario, target;
    std::vector<std::string> free_params;

    auto* sim = app.add_subcommand("simulate", "integrate a scenario and write its artifacts");
    sim->add_option("scenario", scenario, "config file or preset name")->required();

    auto* ana = app.add_subcommand("analyze",
                                   "print reproduction number, thresholds, equilibria, stability");
    ana->add_option("scenario", scenario, "config file or preset name")->required();

    auto* sens = app.add_subcommand("sensitivity", "print normalized sensitivity indices");
    sens->add_option("scenario", scenario, "config file or preset name")->required();
    sens->add_option("--target", target, "one of: r0sq, o0, o (default: all)");

    auto* pre = app.add_subcommand("presets", "built-in scenarios");
    pre->add_subcommand("list", "list preset names and key settings");

    auto* form = app.add_subcommand("report-formulas",
                                    "print R0 with chosen parameters factored out");
    form->add_option("scenario", scenario, "config file or preset name (default: baseline rates)");
    form->add_option("--free", free_params, "parameters kept symbolic (a_v, c_vh, c_hv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(scenario);
        if (ana->parsed()) return cmd_analyze(scenario);
        if (sens->parsed()) return cmd_sensitivity(scenario, target);
        if (pre->parsed()) return cmd_presets_list();
        if (form->parsed()) return cmd_report_formulas(scenario, free_params);
    } catch (const vhd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const vhd::IntegrationFailure& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const vhd::EndemicSolveError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    }
    return 0;
}

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vhd/model.hpp"
#include "vhd/params.hpp"

namespace vhd {

// Quantities whose parameter sensitivity is of interest: the squared
// reproduction number and the two vector offspring numbers.
enum class SensitivityTarget { r0_squared, o0, o };

inline const char* target_name(SensitivityTarget t) {
    switch (t) {
        case SensitivityTarget::r0_squared: return "R0^2";
        case SensitivityTarget::o0: return "O_0";
        case SensitivityTarget::o: return "O";
    }
    return "?";
}

inline double target_value(SensitivityTarget t, const Params& p) {
    switch (t) {
        case SensitivityTarget::r0_squared: {
            double r = r0(p);
            return r * r;
        }
        case SensitivityTarget::o0: return threshold_o0(p);
        case SensitivityTarget::o: return threshold_o(p);
    }
    throw std::invalid_argument("target_value: unknown target");
}

struct SensitivityEntry {
    const char* param = "";
    double index = 0.0;
};

// Normalized forward sensitivity indices gamma = (dx/dtheta) * (theta / x):
// the relative change of the target per relative change of the parameter.
// Entries follow the canonical parameter order.
struct SensitivityTable {
    SensitivityTarget target{};
    double value = 0.0;  // target value at the evaluation point
    std::array<SensitivityEntry, param_fields.size()> entries{};

    double at(const std::string& name) const {
        for (const auto& e : entries)
            if (name == e.param) return e.index;
        throw std::invalid_argument("sensitivity table: unknown parameter " + name);
    }
};

// Indices from differentiating the closed-form target expressions. Parameters
// the target does not depend on get an exact zero.
inline SensitivityTable sensitivity_analytic(SensitivityTarget t, const Params& p) {
    p.validate();
    SensitivityTable tab;
    tab.target = t;
    tab.value = target_value(t, p);
    if (tab.value == 0.0)
        throw std::domain_error("sensitivity: target value is zero, indices undefined");
    for (std::size_t i = 0; i < param_fields.size(); ++i) tab.entries[i].param = param_fields[i].name;

    auto set = [&](const char* name, double v) {
        for (auto& e : tab.entries)
            if (std::string(name) == e.param) e.index = v;
    };

    switch (t) {
        case SensitivityTarget::r0_squared: {
            double A = p.infectious_removal();
            double B = p.incubating_removal();
            double C = p.d_v + p.d_iv;
            double D = p.d_v + p.nu_v;
            set("a_v", 2.0);
            set("c_vh", 1.0);
            set("c_hv", 1.0);
            set("nu_h", (p.d_h - p.p * p.B_h) / B);
            set("nu_v", p.d_v / D);
            set("theta", -p.theta / A);
            set("B_h", p.B_h * (p.q / A + p.p / B));
            set("p", p.p * p.B_h / B);
            set("q", p.q * p.B_h / A);
            set("d_h", -p.d_h * (A + B) / (A * B));
            set("d_i", -p.d_i / A);
            set("d_iv", -p.d_iv / C);
            set("d_v", -p.d_v * (1.0 / C + 1.0 / D));
            break;
        }
        case SensitivityTarget::o0: {
            double E = p.alpha + p.d_q;
            set("epsilon", 1.0);
            set("k", 1.0);
            set("f", 1.0);
            set("d_v", -1.0);
            set("alpha", p.d_q / E);
            set("d_q", -p.d_q / E);
            break;
        }
        case SensitivityTarget::o: {
            double E = p.alpha + p.d_q + p.phi * p.K_x;
            set("epsilon", 1.0);
            set("k", 1.0);
            set("f", 1.0);
            set("d_v", -1.0);
            set("alpha", (p.d_q + p.phi * p.K_x) / E);
            set("d_q", -p.d_q / E);
            set("phi", -p.phi * p.K_x / E);
            set("K_x", -p.phi * p.K_x / E);
            break;
        }
    }
    return tab;
}

// Central-difference counterpart with a relative step. Independent of the
// analytic derivatives; used to cross-check them. Parameters that are exactly
// zero keep a zero index (no relative perturbation is possible).
inline SensitivityTable sensitivity_finite_difference(SensitivityTarget t, const Params& p,
                                                      double rel_step = 1e-6) {
    p.validate();
    if (!(rel_step > 0.0 && rel_step < 1e-2))
        throw std::invalid_argument("sensitivity: rel_step out of range");
    SensitivityTable tab;
    tab.target = t;
    tab.value = target_value(t, p);
    if (tab.value == 0.0)
        throw std::domain_error("sensitivity: target value is zero, indices undefined");

    for (std::size_t i = 0; i < param_fields.size(); ++i) {
        tab.entries[i].param = param_fields[i].name;
        double v0 = p.*(param_fields[i].member);
        if (v0 == 0.0) continue;
        Params hi = p, lo = p;
        hi.*(param_fields[i].member) = v0 * (1.0 + rel_step);
        lo.*(param_fields[i].member) = v0 * (1.0 - rel_step);
        double fhi = target_value(t, hi);
        double flo = target_value(t, lo);
        tab.entries[i].index = (fhi - flo) / (2.0 * rel_step * tab.value);
    }
    return tab;
}

}  // namespace vhd

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vhd {

// Model parameters. All rates are per day, capacities are head counts,
// probabilities and fractions are dimensionless in [0,1].
struct Params {
    // host demography
    double lambda_h = 19.0;     // host recruitment (births + immigration), heads/day
    double d_h = 0.000039;      // host natural mortality
    double d_i = 0.001;         // host disease-induced mortality
    double B_h = 0.019;         // host birth rate feeding vertical transmission
    double p = 0.07;            // fraction of births from incubating hosts that are infected
    double q = 0.07;            // fraction of births from infectious hosts that are infected

    // disease progression
    double a_v = 3.0425;        // vector biting rate, bites/vector/day
    double c_vh = 1.0;          // transmission probability vector -> host per bite
    double c_hv = 1.0;          // transmission probability host -> vector per bite
    double nu_h = 0.1429;       // host incubation progression rate
    double nu_v = 0.25;         // vector incubation progression rate
    double theta = 0.02;        // host recovery rate

    // vector life cycle
    double epsilon = 16.25;     // eggs laid per adult vector per day
    double k = 0.9;             // hatching fraction
    double K_q = 5000.0;        // aquatic-stage carrying capacity
    double alpha = 0.083;       // aquatic -> adult maturation rate
    double f = 0.5;             // fraction of emerging adults that are female
    double d_q = 0.048;         // aquatic-stage mortality
    double d_v = 0.042;         // adult vector natural mortality
    double d_iv = 0.00001;      // adult vector disease-induced mortality

    // larvivorous fish predation
    double phi = 0.35;          // predation rate per fish on aquatic stages
    double rho = 0.37;          // intrinsic fish growth rate
    double psi = 0.05;          // extra fish growth per consumed aquatic vector
    double K_x = 1000.0;        // fish carrying capacity

    // Net removal rate from the infectious host class. Vertical transmission
    // (q B_h) re-enters the class and offsets part of the outflow.
    double infectious_removal() const { return theta - q * B_h + d_h + d_i; }

    // Net removal rate from the incubating host class, offset by p B_h.
    double incubating_removal() const { return d_h + nu_h - p * B_h; }

    // Throws std::invalid_argument on the first violated constraint.
    void validate() const;

    // Literature baseline for a Zika outbreak with Gambusia affinis control.
    static Params baseline() { return Params{}; }
};

// Name registry so configs, reports and sensitivity tables can iterate the
// parameter set in one canonical order.
struct ParamField {
    const char* name;
    double Params::*member;
};

inline constexpr std::array<ParamField, 24> param_fields{{
    {"lambda_h", &Params::lambda_h},
    {"d_h", &Params::d_h},
    {"d_i", &Params::d_i},
    {"B_h", &Params::B_h},
    {"p", &Params::p},
    {"q", &Params::q},
    {"a_v", &Params::a_v},
    {"c_vh", &Params::c_vh},
    {"c_hv", &Params::c_hv},
    {"nu_h", &Params::nu_h},
    {"nu_v", &Params::nu_v},
    {"theta", &Params::theta},
    {"epsilon", &Params::epsilon},
    {"k", &Params::k},
    {"K_q", &Params::K_q},
    {"alpha", &Params::alpha},
    {"f", &Params::f},
    {"d_q", &Params::d_q},
    {"d_v", &Params::d_v},
    {"d_iv", &Params::d_iv},
    {"phi", &Params::phi},
    {"rho", &Params::rho},
    {"psi", &Params::psi},
    {"K_x", &Params::K_x},
}};

inline const ParamField* find_param_field(const std::string& name) {
    for (const auto& field : param_fields) {
        if (name == field.name) return &field;
    }
    return nullptr;
}

inline void Params::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("params: " + msg); };

    for (const auto& field : param_fields) {
        double v = this->*(field.member);
        if (!std::isfinite(v)) fail(std::string(field.name) + " must be finite");
        if (v < 0.0) fail(std::string(field.name) + " must be nonnegative");
    }
    for (const char* name : {"p", "q", "k", "f", "c_vh", "c_hv"}) {
        if (this->*(find_param_field(name)->member) > 1.0)
            fail(std::string(name) + " is a fraction and must not exceed 1");
    }
    if (lambda_h <= 0.0) fail("lambda_h must be positive");
    if (d_h <= 0.0) fail("d_h must be positive");
    if (d_v <= 0.0) fail("d_v must be positive");
    if (K_q <= 0.0) fail("K_q must be positive");
    if (K_x <= 0.0) fail("K_x must be positive");
    if (alpha + d_q <= 0.0) fail("alpha + d_q must be positive");
    // Vertical transmission must not overwhelm natural outflow, otherwise the
    // incubating / infectious classes have no finite steady state.
    if (incubating_removal() <= 0.0)
        fail("d_h + nu_h - p*B_h must be positive");
    if (infectious_removal() <= 0.0)
        fail("theta - q*B_h + d_h + d_i must be positive");
}

}  // namespace vhd

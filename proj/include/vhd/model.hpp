#pragma once

#include <cmath>
#include <stdexcept>

#include "vhd/params.hpp"
#include "vhd/state.hpp"

namespace vhd {

// Per-capita forces of infection and the population totals they divide by.
struct Forces {
    double lam_h = 0.0;  // rate at which one susceptible host gets infected
    double lam_v = 0.0;  // rate at which one susceptible vector gets infected
    double n_h = 0.0;    // total hosts
    double n_v = 0.0;    // total adult vectors
};

// Standard frequency-dependent transmission: lam_h = c_vh a_v I_v / N_h and
// lam_v = c_hv a_v I_h / N_v. Requires N_h > 0; an empty vector population is
// allowed as long as there is nothing to transmit (I_h = 0).
inline Forces forces_of_infection(const State& x, const Params& p) {
    Forces fr;
    fr.n_h = x.total_hosts();
    fr.n_v = x.total_adult_vectors();
    if (!(fr.n_h > 0.0))
        throw std::domain_error("forces_of_infection: total host population must be positive");
    fr.lam_h = p.c_vh * p.a_v * x.i_v / fr.n_h;
    if (fr.n_v > 0.0) {
        fr.lam_v = p.c_hv * p.a_v * x.i_h / fr.n_v;
    } else if (x.i_h != 0.0) {
        throw std::domain_error("forces_of_infection: no adult vectors but infectious hosts present");
    }
    return fr;
}

// Time derivative of the full system.
//
// Hosts follow an SEIR chain with recruitment lambda_h and vertical
// transmission: the flows p B_h E_h and q B_h I_h are newborns that arrive
// directly in the incubating and infectious classes instead of in S_h.
// Aquatic vectors grow logistically from eggs laid by all adults,
// mature at rate alpha, and are eaten at rate phi per fish. Adults emerge
// female with fraction f and follow an SEI chain. Fish grow logistically with
// a bonus proportional to the aquatic vectors they consume.
//
// Transmission terms use the convention 0/0 = 0 so that disease-free and
// vector-free states are valid inputs. Negative entries are accepted (the
// derivative is evaluated as a smooth extension) so long as the divisor
// populations stay positive where a division is actually needed.
inline State rhs(const State& x, const Params& p) {
    if (!x.all_finite()) throw std::domain_error("rhs: state must be finite");

    double n_h = x.total_hosts();
    double n_v = x.total_adult_vectors();

    double infect_h = 0.0;  // lam_h * S_h
    if (x.i_v != 0.0 && x.s_h != 0.0) {
        if (!(n_h > 0.0))
            throw std::domain_error("rhs: host transmission term requires positive N_h");
        infect_h = p.c_vh * p.a_v * x.i_v * x.s_h / n_h;
    }
    double infect_v = 0.0;  // lam_v * S_v
    if (x.i_h != 0.0 && x.s_v != 0.0) {
        if (!(n_v > 0.0))
            throw std::domain_error("rhs: vector transmission term requires positive N_v");
        infect_v = p.c_hv * p.a_v * x.i_h * x.s_v / n_v;
    }

    State d;
    d.s_h = p.lambda_h - p.p * p.B_h * x.e_h - p.q * p.B_h * x.i_h - infect_h - p.d_h * x.s_h;
    d.e_h = p.p * p.B_h * x.e_h + infect_h - (p.d_h + p.nu_h) * x.e_h;
    d.i_h = p.q * p.B_h * x.i_h + p.nu_h * x.e_h - (p.theta + p.d_h + p.d_i) * x.i_h;
    d.r_h = p.theta * x.i_h - p.d_h * x.r_h;
    d.m_q = p.epsilon * p.k * (1.0 - x.m_q / p.K_q) * n_v - (p.alpha + p.d_q) * x.m_q -
            p.phi * x.m_q * x.g;
    d.s_v = p.f * p.alpha * x.m_q - infect_v - p.d_v * x.s_v;
    d.e_v = infect_v - (p.nu_v + p.d_v) * x.e_v;
    d.i_v = p.nu_v * x.e_v - (p.d_v + p.d_iv) * x.i_v;
    d.g = (p.rho + p.psi * x.m_q) * x.g * (1.0 - x.g / p.K_x);
    return d;
}

// Basic reproduction number split into the two halves of the transmission
// cycle: host-to-host via one vector generation and vector-to-vector via one
// host generation. r0 is the geometric mean of the two.
struct R0Split {
    double r0 = 0.0;
    double host_factor = 0.0;    // a_v c_vh nu_h / (A B)
    double vector_factor = 0.0;  // a_v c_hv nu_v / ((d_v + d_iv)(d_v + nu_v))
};

inline R0Split r0_split(const Params& p) {
    double A = p.infectious_removal();
    double B = p.incubating_removal();
    R0Split s;
    s.host_factor = p.a_v * p.c_vh * p.nu_h / (A * B);
    s.vector_factor = p.a_v * p.c_hv * p.nu_v / ((p.d_v + p.d_iv) * (p.d_v + p.nu_v));
    s.r0 = std::sqrt(s.host_factor * s.vector_factor);
    return s;
}

inline double r0(const Params& p) { return r0_split(p).r0; }

// Vector offspring number at fish level g: expected female adults produced per
// female adult over its lifetime, with predation phi*g acting on the aquatic
// stage. The vector population persists at fish level g iff this exceeds 1.
inline double survival_threshold(const Params& p, double g) {
    return p.epsilon * p.k * p.f * p.alpha / (p.d_v * (p.alpha + p.d_q + p.phi * g));
}

// Threshold without fish.
inline double threshold_o0(const Params& p) { return survival_threshold(p, 0.0); }

// Threshold with fish at carrying capacity.
inline double threshold_o(const Params& p) { return survival_threshold(p, p.K_x); }

}  // namespace vhd

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>

#include "vhd/equilibria.hpp"
#include "vhd/model.hpp"
#include "vhd/params.hpp"
#include "vhd/state.hpp"

namespace vhd {

using Matrix9 = Eigen::Matrix<double, 9, 9>;

// Jacobian of the vector field at a state. Obtained by differentiating the
// balance equations, not by transcribing any tabulated matrix, so it stays
// correct for every admissible state.
//
// On the vector-free boundary (N_v = 0) the transmission ratio S_v / N_v is
// taken as its invasion limit 1 (an introduced vector is susceptible), and
// the second-order ratios I_h S_v / N_v^2 vanish. This is the continuous
// extension used when linearizing around vector-free equilibria.
inline Matrix9 jacobian(const State& x, const Params& p) {
    if (!x.all_finite()) throw std::domain_error("jacobian: state must be finite");
    double n_h = x.total_hosts();
    double n_v = x.total_adult_vectors();
    if (!(n_h > 0.0)) throw std::domain_error("jacobian: total host population must be positive");

    Matrix9 J = Matrix9::Zero();

    // host transmission T_h = c_vh a_v I_v S_h / N_h
    double th_s = p.c_vh * p.a_v * x.i_v * (n_h - x.s_h) / (n_h * n_h);
    double th_other = -p.c_vh * p.a_v * x.i_v * x.s_h / (n_h * n_h);
    double th_iv = p.c_vh * p.a_v * x.s_h / n_h;

    J(0, 0) = -th_s - p.d_h;
    J(0, 1) = -p.p * p.B_h - th_other;
    J(0, 2) = -p.q * p.B_h - th_other;
    J(0, 3) = -th_other;
    J(0, 7) = -th_iv;

    J(1, 0) = th_s;
    J(1, 1) = p.p * p.B_h - (p.d_h + p.nu_h) + th_other;
    J(1, 2) = th_other;
    J(1, 3) = th_other;
    J(1, 7) = th_iv;

    J(2, 1) = p.nu_h;
    J(2, 2) = p.q * p.B_h - (p.theta + p.d_h + p.d_i);

    J(3, 2) = p.theta;
    J(3, 3) = -p.d_h;

    J(4, 4) = -p.epsilon * p.k * n_v / p.K_q - (p.alpha + p.d_q + p.phi * x.g);
    J(4, 5) = J(4, 6) = J(4, 7) = p.epsilon * p.k * (1.0 - x.m_q / p.K_q);
    J(4, 8) = -p.phi * x.m_q;

    // vector transmission T_v = c_hv a_v I_h S_v / N_v, with the boundary
    // convention S_v / N_v -> 1 and quadratic ratios -> 0 as N_v -> 0
    double tv_ih, tv_s, tv_other;
    if (n_v > 0.0) {
        tv_ih = p.c_hv * p.a_v * x.s_v / n_v;
        tv_s = p.c_hv * p.a_v * x.i_h * (n_v - x.s_v) / (n_v * n_v);
        tv_other = -p.c_hv * p.a_v * x.i_h * x.s_v / (n_v * n_v);
    } else {
        tv_ih = p.c_hv * p.a_v;
        tv_s = 0.0;
        tv_other = 0.0;
    }

    J(5, 2) = -tv_ih;
    J(5, 4) = p.f * p.alpha;
    J(5, 5) = -p.d_v - tv_s;
    J(5, 6) = -tv_other;
    J(5, 7) = -tv_other;

    J(6, 2) = tv_ih;
    J(6, 5) = tv_s;
    J(6, 6) = -(p.d_v + p.nu_v) + tv_other;
    J(6, 7) = tv_other;

    J(7, 6) = p.nu_v;
    J(7, 7) = -(p.d_v + p.d_iv);

    J(8, 4) = p.psi * x.g * (1.0 - x.g / p.K_x);
    J(8, 8) = (p.rho + p.psi * x.m_q) * (1.0 - 2.0 * x.g / p.K_x);

    return J;
}

// Next-generation-matrix construction over the infected classes
// (E_h, I_h, E_v, I_v): K = T * (-Sigma)^{-1}, with T collecting new
// infections and Sigma the within-class transitions. r0 is the spectral
// radius of K.
struct NgmDecomposition {
    Eigen::Matrix4d transmission;        // T
    Eigen::Matrix4d transitions;         // Sigma
    Eigen::Matrix4d residence;           // (-Sigma)^{-1}, mean residence times
    Eigen::Matrix4d next_generation;     // K
    double r0 = 0.0;
};

inline NgmDecomposition ngm_r0(const Params& p) {
    p.validate();
    NgmDecomposition d;
    d.transmission.setZero();
    d.transmission(0, 3) = p.a_v * p.c_vh;
    d.transmission(2, 1) = p.a_v * p.c_hv;

    d.transitions.setZero();
    d.transitions(0, 0) = p.p * p.B_h - p.d_h - p.nu_h;
    d.transitions(1, 0) = p.nu_h;
    d.transitions(1, 1) = p.q * p.B_h - p.theta - p.d_h - p.d_i;
    d.transitions(2, 2) = -p.d_v - p.nu_v;
    d.transitions(3, 2) = p.nu_v;
    d.transitions(3, 3) = -p.d_v - p.d_iv;

    d.residence = (-d.transitions).inverse();
    d.next_generation = d.transmission * d.residence;

    Eigen::EigenSolver<Eigen::Matrix4d> es(d.next_generation, false);
    double radius = 0.0;
    for (int i = 0; i < 4; ++i) radius = std::max(radius, std::abs(es.eigenvalues()[i]));
    d.r0 = radius;
    return d;
}

// Routh-Hurwitz data for the disease-free equilibria. The linearization there
// factors into two host relaxation modes, the fish mode, a 2x2 aquatic/adult
// vector block, and a quartic over the infected classes; the quartic is the
// same at every disease-free point. Stability of E2 reduces to three gates.
struct RouthHurwitz {
    // quartic x^4 + a1 x^3 + a2 x^2 + a3 x + a4 over the infected classes
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0;
    double b1 = 0, b2 = 0, c1 = 0;
    // quadratic x^2 + q1 x + q0 for the aquatic/adult block with fish at K_x
    double q1 = 0, q0 = 0;

    bool gate_r0 = false;  // R0^2 < 1  (a4 > 0)
    bool gate_o = false;   // O < 1    (q0 > 0)
    bool gate_c1 = false;  // c1 > 0

    bool predicts_stable() const { return gate_r0 && gate_o && gate_c1; }

    // All Hurwitz determinants of the quartic are positive, i.e. every root
    // has negative real part.
    bool quartic_hurwitz() const {
        return a1 > 0 && a2 > 0 && a3 > 0 && a4 > 0 && b1 > 0 && c1 > 0;
    }
};

inline RouthHurwitz routh_hurwitz_e2(const Params& p) {
    p.validate();
    double A = p.infectious_removal();
    double B = p.incubating_removal();
    double C = p.d_v + p.d_iv;
    double D = p.d_v + p.nu_v;

    RouthHurwitz rh;
    rh.a1 = A + B + C + D;
    rh.a2 = A * B + (A + B) * (C + D) + C * D;
    rh.a3 = A * B * (C + D) + (A + B) * C * D;
    rh.a4 = A * B * C * D - p.a_v * p.a_v * p.c_vh * p.c_hv * p.nu_h * p.nu_v;
    rh.b1 = (rh.a1 * rh.a2 - rh.a3) / rh.a1;
    rh.b2 = rh.a4;
    rh.c1 = (rh.b1 * rh.a3 - rh.a1 * rh.b2) / rh.b1;

    rh.q1 = p.alpha + p.d_q + p.d_v + p.phi * p.K_x;
    rh.q0 = p.alpha * p.d_v + p.d_q * p.d_v + p.phi * p.d_v * p.K_x -
            p.f * p.k * p.alpha * p.epsilon;

    double r = r0(p);
    rh.gate_r0 = r * r < 1.0;
    rh.gate_o = threshold_o(p) < 1.0;
    rh.gate_c1 = rh.c1 > 0.0;
    return rh;
}

enum class StabilityClass { stable, unstable, marginal };

inline const char* stability_name(StabilityClass c) {
    switch (c) {
        case StabilityClass::stable: return "stable";
        case StabilityClass::unstable: return "unstable";
        case StabilityClass::marginal: return "marginal";
    }
    return "?";
}

struct StabilityReport {
    EquilibriumKind kind{};
    std::array<std::complex<double>, 9> eigenvalues{};  // sorted by real part, descending
    double max_real_part = 0.0;
    StabilityClass classification = StabilityClass::marginal;

    double r0 = 0.0;
    double o0 = 0.0;
    double o = 0.0;
    RouthHurwitz rh;

    // Closed-form stability verdict where the theory provides one (E1..E4);
    // empty for the endemic equilibria, which are judged numerically only.
    std::optional<bool> theorem_stable;
    bool agrees_with_theorem = true;
};

// Numerical local stability of an existing equilibrium: eigenvalues of the
// Jacobian, classified by the sign of the largest real part with a small
// marginal band to absorb rounding. Where a closed-form criterion exists the
// report also records its verdict and whether the two agree.
inline StabilityReport classify(const Equilibrium& eq, const Params& p) {
    if (!eq.exists)
        throw std::invalid_argument("classify: equilibrium does not exist for these parameters");
    p.validate();

    StabilityReport rep;
    rep.kind = eq.kind;
    rep.r0 = r0(p);
    rep.o0 = threshold_o0(p);
    rep.o = threshold_o(p);
    rep.rh = routh_hurwitz_e2(p);

    Matrix9 J = jacobian(eq.state, p);
    Eigen::EigenSolver<Matrix9> es(J);
    for (int i = 0; i < 9; ++i) rep.eigenvalues[i] = es.eigenvalues()[i];
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.real() != b.real()) return a.real() > b.real();
                  return a.imag() < b.imag();
              });

    double scale = 0.0;
    for (const auto& ev : rep.eigenvalues) scale = std::max(scale, std::abs(ev));
    rep.max_real_part = rep.eigenvalues[0].real();

    double band = 1e-9 * std::max(1.0, scale);
    if (rep.max_real_part < -band)
        rep.classification = StabilityClass::stable;
    else if (rep.max_real_part > band)
        rep.classification = StabilityClass::unstable;
    else
        rep.classification = StabilityClass::marginal;

    switch (eq.kind) {
        case EquilibriumKind::e1:
        case EquilibriumKind::e3:
            // the fish-free points always have the fish growth mode rho (+
            // predation bonus) as an unstable direction
            rep.theorem_stable = false;
            break;
        case EquilibriumKind::e2:
            rep.theorem_stable = rep.rh.predicts_stable();
            break;
        case EquilibriumKind::e4:
            rep.theorem_stable = rep.rh.gate_r0 && rep.rh.gate_c1;
            break;
        default:
            rep.theorem_stable = std::nullopt;
            break;
    }
    if (rep.theorem_stable.has_value())
        rep.agrees_with_theorem =
            *rep.theorem_stable == (rep.classification == StabilityClass::stable);
    return rep;
}

}  // namespace vhd

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "vhd/model.hpp"
#include "vhd/params.hpp"
#include "vhd/state.hpp"

namespace vhd {

// The system has eight candidate equilibria, indexed by which of the three
// populations (disease, vectors, fish) are present.
enum class EquilibriumKind {
    e1,  // hosts only: no disease, no vectors, no fish
    e2,  // hosts + fish at carrying capacity
    e3,  // hosts + vectors, disease-free, no fish
    e4,  // hosts + vectors + fish, disease-free
    e5,  // endemic hosts without vectors (infeasible)
    e6,  // endemic hosts + fish without vectors (infeasible)
    e7,  // fully endemic, no fish
    e8,  // fully endemic with fish at carrying capacity
};

inline const char* kind_name(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::e1: return "E1";
        case EquilibriumKind::e2: return "E2";
        case EquilibriumKind::e3: return "E3";
        case EquilibriumKind::e4: return "E4";
        case EquilibriumKind::e5: return "E5";
        case EquilibriumKind::e6: return "E6";
        case EquilibriumKind::e7: return "E7";
        case EquilibriumKind::e8: return "E8";
    }
    return "?";
}

inline const char* kind_description(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::e1: return "vector-free and fish-free, disease-free";
        case EquilibriumKind::e2: return "vector-free with fish at carrying capacity";
        case EquilibriumKind::e3: return "disease-free with vectors, no fish";
        case EquilibriumKind::e4: return "disease-free with vectors and fish";
        case EquilibriumKind::e5: return "host-endemic without vectors";
        case EquilibriumKind::e6: return "host-endemic with fish, without vectors";
        case EquilibriumKind::e7: return "endemic without fish";
        case EquilibriumKind::e8: return "endemic with fish at carrying capacity";
    }
    return "?";
}

// One existence condition: `pass` records whether `value` clears `bound`.
struct ExistenceCheck {
    std::string what;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct Equilibrium {
    EquilibriumKind kind{};
    State state;
    bool exists = false;
    // max-abs of the time derivative at `state`; NaN when the state is not
    // defined (existence condition failed before a state could be built)
    double residual = std::numeric_limits<double>::quiet_NaN();
    std::vector<ExistenceCheck> checks;

    double relative_residual() const { return residual / (1.0 + state.max_abs()); }
};

inline double equilibrium_residual(const State& s, const Params& p) {
    return rhs(s, p).max_abs();
}

// Host compartments of any endemic equilibrium, parametrized by the force of
// infection lam_h. Solves the four host balance equations in closed form; the
// shared denominator is positive for every lam_h >= 0 whenever the removal
// rates A, B are positive, so the components are well defined and nonnegative.
struct HostComponents {
    double s_h = 0.0, e_h = 0.0, i_h = 0.0, r_h = 0.0;
    double n_h() const { return s_h + e_h + i_h + r_h; }
};

inline HostComponents human_endemic_components(double lam_h, const Params& p) {
    if (!std::isfinite(lam_h)) throw std::domain_error("human_endemic_components: lam_h must be finite");
    double A = p.infectious_removal();
    double B = p.incubating_removal();
    double den = A * B * p.d_h + lam_h * (A * B + p.p * p.B_h * A + p.q * p.B_h * p.nu_h);
    if (!(den > 0.0))
        throw std::domain_error("human_endemic_components: balance denominator not positive");
    HostComponents h;
    h.s_h = A * B * p.lambda_h / den;
    h.e_h = lam_h * A * p.lambda_h / den;
    h.i_h = lam_h * p.nu_h * p.lambda_h / den;
    h.r_h = p.theta * lam_h * p.nu_h * p.lambda_h / (p.d_h * den);
    return h;
}

// Vector compartments of an equilibrium with force of infection lam_v and fish
// level g. The adult chain gives S_v, E_v, I_v in terms of m_q, and the
// aquatic balance then fixes m_q through the offspring number at fish level g.
// Returns m_q <= 0 (and empty adult classes) when the vector population cannot
// sustain itself under these conditions.
struct VectorComponents {
    double m_q = 0.0, s_v = 0.0, e_v = 0.0, i_v = 0.0;
    double n_v() const { return s_v + e_v + i_v; }
};

inline VectorComponents vector_endemic_components(double lam_v, double g, const Params& p) {
    if (!(std::isfinite(lam_v) && lam_v >= 0.0))
        throw std::domain_error("vector_endemic_components: lam_v must be finite and nonnegative");
    double o_g = survival_threshold(p, g);
    // fraction of adults that are still alive per unit recruitment, weighted
    // over the susceptible -> incubating -> infectious chain
    double chain = 1.0 + lam_v * (p.d_v + p.d_iv + p.nu_v) /
                             ((p.d_v + p.nu_v) * (p.d_v + p.d_iv));
    VectorComponents v;
    v.m_q = p.K_q * (1.0 - (p.d_v + lam_v) / (p.d_v * o_g * chain));
    if (v.m_q <= 0.0) {
        v.m_q = std::min(v.m_q, 0.0);
        return v;
    }
    v.s_v = p.f * p.alpha * v.m_q / (p.d_v + lam_v);
    v.e_v = lam_v * v.s_v / (p.d_v + p.nu_v);
    v.i_v = p.nu_v * v.e_v / (p.d_v + p.d_iv);
    return v;
}

// Disease-free equilibria E1 through E4 in closed form. E3 and E4 carry a
// vector population and therefore exist only when the offspring number at the
// respective fish level exceeds one.
inline Equilibrium boundary_equilibrium(EquilibriumKind kind, const Params& p) {
    p.validate();
    Equilibrium eq;
    eq.kind = kind;
    eq.state.s_h = p.lambda_h / p.d_h;

    switch (kind) {
        case EquilibriumKind::e1:
            eq.exists = true;
            break;
        case EquilibriumKind::e2:
            eq.state.g = p.K_x;
            eq.exists = true;
            break;
        case EquilibriumKind::e3:
        case EquilibriumKind::e4: {
            bool with_fish = kind == EquilibriumKind::e4;
            double g = with_fish ? p.K_x : 0.0;
            double o = survival_threshold(p, g);
            eq.state.g = g;
            eq.checks.push_back({with_fish ? "offspring number with fish O" :
                                             "offspring number without fish O_0",
                                 o, 1.0, o > 1.0});
            if (o > 1.0) {
                eq.state.m_q = p.K_q * (1.0 - 1.0 / o);
                eq.state.s_v = p.f * p.alpha * p.K_q / p.d_v * (1.0 - 1.0 / o);
                eq.exists = true;
            }
            break;
        }
        default:
            throw std::invalid_argument(
                "boundary_equilibrium: only E1..E4 have closed forms; use "
                "infeasible_equilibrium or solve_endemic");
    }
    if (eq.exists) eq.residual = equilibrium_residual(eq.state, p);
    return eq;
}

// E5 and E6 would be endemic in hosts with no vector population. The force of
// infection that the host balance requires at such a point is
//   lam_h = -d_h A B / (d_h A + (theta + d_h) nu_h),
// strictly negative whenever A, B > 0, so these equilibria never exist for
// admissible parameters. They are reported with the offending value.
inline Equilibrium infeasible_equilibrium(EquilibriumKind kind, const Params& p) {
    if (kind != EquilibriumKind::e5 && kind != EquilibriumKind::e6)
        throw std::invalid_argument("infeasible_equilibrium: expects E5 or E6");
    p.validate();
    double A = p.infectious_removal();
    double B = p.incubating_removal();
    double lam_h = -p.d_h * A * B / (p.d_h * A + (p.theta + p.d_h) * p.nu_h);
    Equilibrium eq;
    eq.kind = kind;
    eq.exists = false;
    eq.checks.push_back(
        {"force of infection required by a vector-free endemic state", lam_h, 0.0, lam_h > 0.0});
    return eq;
}

struct EndemicSolveOptions {
    double seed_lam_h = 1e-3;
    double seed_lam_v = 1e-3;
    int budget = 200;  // Newton iterations; the bisection fallback gets the same
};

// Raised when neither Newton iteration nor the bisection fallback locates a
// root within the iteration budget.
class EndemicSolveError : public std::runtime_error {
  public:
    EndemicSolveError(const std::string& msg, double lh, double lv, double res)
        : std::runtime_error(msg), last_lam_h(lh), last_lam_v(lv), last_residual(res) {}
    double last_lam_h, last_lam_v, last_residual;
};

namespace detail {

// Residual of the two consistency equations in multiplied-out form:
//   F1 = lam_h N_h(lam_h) - c_vh a_v I_v(lam_v)
//   F2 = lam_v N_v(lam_v) - c_hv a_v I_h(lam_h)
// A root with positive entries is an endemic equilibrium.
struct EndemicSystem {
    const Params& p;
    double g;

    std::array<double, 2> residual(double lam_h, double lam_v) const {
        HostComponents h = human_endemic_components(lam_h, p);
        VectorComponents v = vector_endemic_components(lam_v, g, p);
        return {lam_h * h.n_h() - p.c_vh * p.a_v * v.i_v,
                lam_v * v.n_v() - p.c_hv * p.a_v * h.i_h};
    }

    double scale(double lam_h, double lam_v) const {
        HostComponents h = human_endemic_components(lam_h, p);
        VectorComponents v = vector_endemic_components(lam_v, g, p);
        return std::max({1.0, std::abs(lam_h) * h.n_h(), p.c_vh * p.a_v * v.i_v,
                         lam_v * v.n_v(), p.c_hv * p.a_v * h.i_h});
    }

    bool feasible(double lam_h, double lam_v) const {
        if (!(lam_h >= 0.0) || !(lam_v >= 0.0)) return false;
        return vector_endemic_components(lam_v, g, p).m_q > 0.0 || lam_v == 0.0;
    }

    double norm(const std::array<double, 2>& f) const {
        return std::max(std::abs(f[0]), std::abs(f[1]));
    }
};

}  // namespace detail

// Endemic equilibria E7 (no fish) and E8 (fish at carrying capacity). The two
// scalar unknowns are the forces of infection; everything else follows in
// closed form. A damped Newton iteration starts from the configured seed, and
// a sign-change bisection sweep over lam_v takes over if Newton stalls.
inline Equilibrium solve_endemic(EquilibriumKind kind, const Params& p,
                                 const EndemicSolveOptions& opts = {}) {
    if (kind != EquilibriumKind::e7 && kind != EquilibriumKind::e8)
        throw std::invalid_argument("solve_endemic: expects E7 or E8");
    p.validate();

    bool with_fish = kind == EquilibriumKind::e8;
    double g = with_fish ? p.K_x : 0.0;
    detail::EndemicSystem sys{p, g};

    Equilibrium eq;
    eq.kind = kind;

    double o = survival_threshold(p, g);
    eq.checks.push_back({with_fish ? "offspring number with fish O" :
                                     "offspring number without fish O_0",
                         o, 1.0, o > 1.0});
    if (!(o > 1.0)) return eq;  // no vector population, hence no endemic state

    double lh = opts.seed_lam_h, lv = opts.seed_lam_v;
    auto f = sys.residual(lh, lv);
    bool converged = false;

    for (int it = 0; it < opts.budget && !converged; ++it) {
        if (sys.norm(f) <= 1e-13 * sys.scale(lh, lv)) {
            converged = true;
            break;
        }
        // Jacobian by central differences; the system is smooth in both
        // variables on the feasible set.
        double hh = 1e-7 * std::max(std::abs(lh), 1e-9);
        double hv = 1e-7 * std::max(std::abs(lv), 1e-9);
        auto fdx = [&](double dlh, double dlv) {
            return sys.residual(std::max(lh + dlh, 0.0), std::max(lv + dlv, 0.0));
        };
        auto fp_h = fdx(hh, 0.0), fm_h = fdx(-hh, 0.0);
        auto fp_v = fdx(0.0, hv), fm_v = fdx(0.0, -hv);
        double j11 = (fp_h[0] - fm_h[0]) / (2 * hh), j12 = (fp_v[0] - fm_v[0]) / (2 * hv);
        double j21 = (fp_h[1] - fm_h[1]) / (2 * hh), j22 = (fp_v[1] - fm_v[1]) / (2 * hv);
        double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det)) break;
        double step_h = (j22 * f[0] - j12 * f[1]) / det;
        double step_v = (j11 * f[1] - j21 * f[0]) / det;

        double damping = 1.0;
        bool advanced = false;
        for (int half = 0; half < 40; ++half, damping *= 0.5) {
            double nlh = lh - damping * step_h;
            double nlv = lv - damping * step_v;
            if (!sys.feasible(nlh, nlv)) continue;
            auto nf = sys.residual(nlh, nlv);
            if (sys.norm(nf) < sys.norm(f)) {
                lh = nlh;
                lv = nlv;
                f = nf;
                advanced = true;
                break;
            }
        }
        if (!advanced) break;  // stalled; leave it to the fallback
    }
    if (!converged && sys.norm(f) <= 1e-13 * sys.scale(lh, lv)) converged = true;

    if (!converged) {
        // Fallback: collapse to one dimension. For a given lam_v the inner
        // equation F1(lam_h) = 0 is monotone in lam_h and is bisected; the
        // outer residual F2 is then swept over lam_v for a sign change.
        auto inner_lam_h = [&](double lam_v) {
            double iv = vector_endemic_components(lam_v, g, p).i_v;
            double target = p.c_vh * p.a_v * iv;
            if (target <= 0.0) return 0.0;
            double lo = 0.0, hi = 1.0;
            while (human_endemic_components(hi, p).n_h() * hi < target && hi < 1e12) hi *= 2.0;
            for (int i = 0; i < 200; ++i) {
                double mid = 0.5 * (lo + hi);
                (human_endemic_components(mid, p).n_h() * mid < target ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };
        auto outer = [&](double lam_v) {
            double lam_h = inner_lam_h(lam_v);
            return sys.residual(lam_h, lam_v)[1];
        };

        double first_val = outer(1e-12);
        double prev = 1e-12, prev_val = first_val;
        double root = -1.0;
        for (double cur = 1e-11; cur <= 1e12; cur *= 1.5) {
            if (!(vector_endemic_components(cur, g, p).m_q > 0.0)) break;
            double val = outer(cur);
            if ((prev_val < 0.0) != (val < 0.0)) {
                double lo = prev, hi = cur;
                for (int i = 0; i < 200; ++i) {
                    double mid = 0.5 * (lo + hi);
                    ((outer(mid) < 0.0) == (prev_val < 0.0) ? lo : hi) = mid;
                }
                root = 0.5 * (lo + hi);
                break;
            }
            prev = cur;
            prev_val = val;
        }
        if (root < 0.0) {
            // A positive outer residual on the whole sweep means the infection
            // dies back at every force level: the only nonnegative root is the
            // disease-free one at lam = 0.
            if (first_val > 0.0) {
                lh = lv = 0.0;
                f = sys.residual(lh, lv);
            } else {
                throw EndemicSolveError("solve_endemic: no convergence within budget", lh, lv,
                                        sys.norm(f));
            }
        } else {
            lv = root;
            lh = inner_lam_h(lv);
            f = sys.residual(lh, lv);
            if (sys.norm(f) > 1e-9 * sys.scale(lh, lv))
                throw EndemicSolveError("solve_endemic: fallback root not accurate enough", lh,
                                        lv, sys.norm(f));
        }
    }

    // A root at lam = 0 is the disease-free state, not an endemic one.
    eq.checks.push_back({"endemic force of infection on vectors", lv, 0.0, lv > 1e-12});
    eq.checks.push_back({"endemic force of infection on hosts", lh, 0.0, lh > 1e-12});

    HostComponents h = human_endemic_components(lh, p);
    VectorComponents v = vector_endemic_components(lv, g, p);
    eq.state = State{h.s_h, h.e_h, h.i_h, h.r_h, v.m_q, v.s_v, v.e_v, v.i_v, g};
    eq.residual = equilibrium_residual(eq.state, p);

    // Endemic-side existence ratio: vertical transmission alone must not be
    // able to sustain the infected host classes.
    double A2 = p.theta + p.d_h + p.d_i;
    double num = p.p * p.q * p.B_h * p.B_h * p.d_h + A2 * (p.d_h + lh) * (p.d_h + p.nu_h);
    double den = p.B_h * p.d_h *
                 (p.p * p.theta + (p.p + p.q) * p.d_h + p.p * p.d_i + p.q * (lh + p.nu_h));
    if (den > 0.0)
        eq.checks.push_back({"host balance existence ratio", num / den, 1.0, num / den > 1.0});

    bool positive = lv > 1e-12 && lh > 1e-12 && eq.state.all_nonnegative();
    eq.exists = positive;
    return eq;
}

// All eight candidate equilibria with existence verdicts. Solver failures on
// the endemic pair are reported as non-existence rather than thrown, so the
// result always has eight entries.
inline std::array<Equilibrium, 8> all_equilibria(const Params& p) {
    std::array<Equilibrium, 8> out;
    out[0] = boundary_equilibrium(EquilibriumKind::e1, p);
    out[1] = boundary_equilibrium(EquilibriumKind::e2, p);
    out[2] = boundary_equilibrium(EquilibriumKind::e3, p);
    out[3] = boundary_equilibrium(EquilibriumKind::e4, p);
    out[4] = infeasible_equilibrium(EquilibriumKind::e5, p);
    out[5] = infeasible_equilibrium(EquilibriumKind::e6, p);
    for (auto kind : {EquilibriumKind::e7, EquilibriumKind::e8}) {
        auto idx = kind == EquilibriumKind::e7 ? 6 : 7;
        try {
            out[idx] = solve_endemic(kind, p);
        } catch (const EndemicSolveError& e) {
            out[idx].kind = kind;
            out[idx].exists = false;
            out[idx].checks.push_back({std::string("root finder converged (") + e.what() + ")",
                                       0.0, 1.0, false});
        }
    }
    return out;
}

}  // namespace vhd

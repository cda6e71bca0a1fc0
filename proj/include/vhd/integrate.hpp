#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "vhd/model.hpp"
#include "vhd/params.hpp"
#include "vhd/state.hpp"

namespace vhd {

struct SolverStats {
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
    std::size_t rhs_evals = 0;
    double min_step = std::numeric_limits<double>::infinity();
    double max_step = 0.0;
    double tol = 0.0;
};

// Time series sampled on a fixed grid. t[i] and x[i] belong together.
struct Trajectory {
    std::vector<double> t;
    std::vector<State> x;
    SolverStats stats;

    std::size_t size() const { return t.size(); }
    const State& back() const { return x.back(); }
};

// Raised when a step cannot be completed: stiffness-driven step underflow,
// exhausted step budget, or a component that left the nonnegative region by
// more than the clamping allowance. Carries everything sampled so far.
class IntegrationFailure : public std::runtime_error {
  public:
    IntegrationFailure(const std::string& msg, Trajectory partial_, double t_fail_)
        : std::runtime_error(msg), partial(std::move(partial_)), t_fail(t_fail_) {}

    Trajectory partial;
    double t_fail;
};

namespace detail {

using Vec9 = std::array<double, 9>;

inline Vec9 eval_rhs(const Vec9& y, const Params& p) {
    return rhs(State::from_array(y), p).to_array();
}

}  // namespace detail

// One explicit Dormand-Prince 5(4) step of size h. The fifth-order result is
// propagated; the embedded fourth-order difference drives step control. The
// companion interpolant is fourth-order accurate on the whole step, which is
// what makes dense output on an arbitrary sample grid possible without
// constraining the step sequence.
struct Dp5Step {
    detail::Vec9 y0{};
    detail::Vec9 y1{};   // 5th-order solution at t + h
    detail::Vec9 err{};  // embedded error estimate (5th minus 4th order)
    detail::Vec9 k7{};   // derivative at y1, reusable as the next step's k1
    double h = 0.0;

    std::array<detail::Vec9, 5> rcont{};  // interpolation coefficients

    // Interpolant at t + theta*h, theta in [0,1]. Exact at both endpoints.
    State eval(double theta) const {
        double th1 = 1.0 - theta;
        State out;
        auto a = out.to_array();
        for (std::size_t i = 0; i < 9; ++i) {
            a[i] = rcont[0][i] +
                   theta * (rcont[1][i] +
                            th1 * (rcont[2][i] + theta * (rcont[3][i] + th1 * rcont[4][i])));
        }
        return State::from_array(a);
    }
};

inline Dp5Step dp5_step(const detail::Vec9& y0, const detail::Vec9& k1, double h,
                        const Params& p) {
    using detail::Vec9;

    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    Vec9 w;
    auto stage = [&](auto&&... coeff_k) {
        for (std::size_t i = 0; i < 9; ++i) {
            double acc = 0.0;
            ((acc += coeff_k.first * coeff_k.second[i]), ...);
            w[i] = y0[i] + h * acc;
        }
        return detail::eval_rhs(w, p);
    };

    Vec9 k2 = stage(std::pair{a21, k1});
    Vec9 k3 = stage(std::pair{a31, k1}, std::pair{a32, k2});
    Vec9 k4 = stage(std::pair{a41, k1}, std::pair{a42, k2}, std::pair{a43, k3});
    Vec9 k5 = stage(std::pair{a51, k1}, std::pair{a52, k2}, std::pair{a53, k3},
                    std::pair{a54, k4});
    Vec9 k6 = stage(std::pair{a61, k1}, std::pair{a62, k2}, std::pair{a63, k3},
                    std::pair{a64, k4}, std::pair{a65, k5});

    Dp5Step s;
    s.y0 = y0;
    s.h = h;
    for (std::size_t i = 0; i < 9; ++i) {
        s.y1[i] = y0[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                               a76 * k6[i]);
    }
    s.k7 = detail::eval_rhs(s.y1, p);

    for (std::size_t i = 0; i < 9; ++i) {
        s.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                        e7 * s.k7[i]);
        double ydiff = s.y1[i] - y0[i];
        double bspl = h * k1[i] - ydiff;
        s.rcont[0][i] = y0[i];
        s.rcont[1][i] = ydiff;
        s.rcont[2][i] = bspl;
        s.rcont[3][i] = ydiff - h * s.k7[i] - bspl;
        s.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                             d7 * s.k7[i]);
    }
    return s;
}

namespace detail {

inline double error_norm(const Vec9& err, const Vec9& y0, const Vec9& y1, double tol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
        double sc = tol + tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        double r = err[i] / sc;
        sum += r * r;
    }
    return std::sqrt(sum / 9.0);
}

// Starting step size from the local derivative and curvature estimates.
inline double initial_step(const Vec9& y0, const Vec9& f0, double span, double tol,
                           const Params& p, std::size_t& evals) {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
        double sc = tol + tol * std::abs(y0[i]);
        dnf += (f0[i] / sc) * (f0[i] / sc);
        dny += (y0[i] / sc) * (y0[i] / sc);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, span);

    Vec9 y1;
    for (std::size_t i = 0; i < 9; ++i) y1[i] = y0[i] + h * f0[i];
    Vec9 f1 = eval_rhs(y1, p);
    ++evals;

    double der2 = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
        double sc = tol + tol * std::abs(y0[i]);
        double d = (f1[i] - f0[i]) / sc;
        der2 += d * d;
    }
    der2 = std::sqrt(der2) / h;
    double der12 = std::max(der2, std::sqrt(dnf));
    double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, span});
}

}  // namespace detail

// Integrate from t0 to t1 and sample the solution at t0, t0 + sample_dt, ...
// and t1 (the final time is always included). Steps are chosen adaptively so
// the local error estimate stays below tol in a mixed absolute/relative norm;
// samples between step endpoints come from the dense interpolant.
//
// Components may undershoot zero by at most 10 * tol * max(1, |state|) due to
// discretization; such undershoots are clamped to zero. Anything worse aborts
// with IntegrationFailure, as do step-size underflow (stiffness beyond what an
// explicit method can damp) and an exhausted step budget. The failure object
// carries the part of the trajectory that was completed.
//
// The computation is deterministic: the same inputs produce bit-identical
// trajectories on every run.
inline Trajectory integrate(const State& initial, const Params& p, double t0, double t1,
                            double sample_dt, double tol) {
    p.validate();
    if (!initial.all_finite() || !initial.all_nonnegative())
        throw std::invalid_argument("integrate: initial state must be finite and nonnegative");
    if (!(initial.total_hosts() > 0.0))
        throw std::invalid_argument("integrate: initial host population must be positive");
    if (!(t1 > t0)) throw std::invalid_argument("integrate: t1 must exceed t0");
    if (!(sample_dt > 0.0)) throw std::invalid_argument("integrate: sample_dt must be positive");
    if (!(tol >= 1e-12 && tol <= 1e-2))
        throw std::invalid_argument("integrate: tol must lie in [1e-12, 1e-2]");

    using detail::Vec9;
    const double span = t1 - t0;
    const double t_eps = 1e-12 * std::max(1.0, std::abs(t1));
    const std::size_t max_steps = 2'000'000;

    // sample grid
    std::vector<double> sample_times;
    {
        auto j_max = static_cast<std::size_t>(std::floor(span / sample_dt + 1e-9));
        sample_times.reserve(j_max + 2);
        for (std::size_t j = 0; j <= j_max; ++j) {
            double ts = t0 + static_cast<double>(j) * sample_dt;
            sample_times.push_back(std::min(ts, t1));
        }
        if (sample_times.back() < t1 - t_eps) sample_times.push_back(t1);
    }

    Trajectory out;
    out.stats.tol = tol;
    out.t.reserve(sample_times.size());
    out.x.reserve(sample_times.size());

    auto fail = [&](const std::string& msg, double t_at) -> IntegrationFailure {
        return IntegrationFailure("integrate: " + msg, std::move(out), t_at);
    };

    // Clamp small negative undershoots; report by throwing on large ones.
    auto clamp_state = [&](State s, double t_at) {
        double allowance = 10.0 * tol * std::max(1.0, s.max_abs());
        auto a = s.to_array();
        bool changed = false;
        for (std::size_t i = 0; i < 9; ++i) {
            if (a[i] < 0.0) {
                if (a[i] < -allowance)
                    throw fail(std::string(State::names[i]) + " = " + std::to_string(a[i]) +
                                   " at t = " + std::to_string(t_at) +
                                   " exceeds the negativity allowance",
                               t_at);
                a[i] = 0.0;
                changed = true;
            }
        }
        return std::pair{State::from_array(a), changed};
    };

    State y = initial;
    out.t.push_back(sample_times[0]);
    out.x.push_back(y);
    std::size_t next_sample = 1;

    Vec9 yv = y.to_array();
    Vec9 k1 = detail::eval_rhs(yv, p);
    out.stats.rhs_evals = 1;

    double h = detail::initial_step(yv, k1, span, tol, p, out.stats.rhs_evals);
    double t = t0;

    // PI step-size controller constants
    constexpr double safety = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    constexpr double fac_min = 0.2, fac_max = 10.0;
    double facold = 1e-4;
    bool just_rejected = false;

    while (t < t1 - t_eps) {
        if (out.stats.steps_accepted + out.stats.steps_rejected >= max_steps)
            throw fail("step budget exhausted", t);
        h = std::min(h, t1 - t);
        if (!(h > 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)))
            throw fail("step size underflow (problem too stiff for the explicit method)", t);

        Dp5Step step = dp5_step(yv, k1, h, p);
        out.stats.rhs_evals += 6;
        double err = detail::error_norm(step.err, yv, step.y1, tol);

        if (err <= 1.0) {
            double t_new = t + h;
            if (std::abs(t_new - t1) <= t_eps) t_new = t1;

            auto [y_new, clamped] = clamp_state(State::from_array(step.y1), t_new);

            while (next_sample < sample_times.size() &&
                   sample_times[next_sample] <= t_new + t_eps) {
                double ts = sample_times[next_sample];
                State sample;
                if (ts >= t_new - t_eps) {
                    sample = y_new;
                } else {
                    double theta = std::clamp((ts - t) / h, 0.0, 1.0);
                    sample = clamp_state(step.eval(theta), ts).first;
                }
                out.t.push_back(sample_times[next_sample]);
                out.x.push_back(sample);
                ++next_sample;
            }

            out.stats.steps_accepted += 1;
            out.stats.min_step = std::min(out.stats.min_step, h);
            out.stats.max_step = std::max(out.stats.max_step, h);

            t = t_new;
            y = y_new;
            yv = y.to_array();
            if (clamped) {
                k1 = detail::eval_rhs(yv, p);
                ++out.stats.rhs_evals;
            } else {
                k1 = step.k7;
            }

            double fac11 = std::pow(std::max(err, 1e-30), expo1);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(1.0 / fac_max, std::min(1.0 / fac_min, fac / safety));
            double h_new = h / fac;
            if (just_rejected) h_new = std::min(h_new, h);
            facold = std::max(err, 1e-4);
            just_rejected = false;
            h = h_new;
        } else {
            out.stats.steps_rejected += 1;
            double fac11 = std::pow(err, expo1);
            h = h / std::min(1.0 / fac_min, fac11 / safety);
            just_rejected = true;
        }
    }

    return out;
}

}  // namespace vhd

#pragma once

// Shared test helpers: deterministic random parameter draws, quartic roots
// via the companion matrix, and a least-squares slope fit.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "vhd/params.hpp"

namespace vhd_test {

// Multiplicative perturbation of every parameter, redrawn until the result
// passes validation. Fractions are capped at 1.
inline vhd::Params draw_params(std::mt19937_64& rng, const vhd::Params& base, double spread) {
    std::uniform_real_distribution<double> u(1.0 - spread, 1.0 + spread);
    for (;;) {
        vhd::Params p = base;
        for (const auto& f : vhd::param_fields) p.*(f.member) = p.*(f.member) * u(rng);
        for (auto frac : {&vhd::Params::p, &vhd::Params::q, &vhd::Params::k, &vhd::Params::f,
                          &vhd::Params::c_vh, &vhd::Params::c_hv})
            p.*frac = std::min(p.*frac, 1.0);
        try {
            p.validate();
            return p;
        } catch (const std::invalid_argument&) {
        }
    }
}

inline vhd::Params low_contact(vhd::Params p = vhd::Params::baseline()) {
    p.a_v = 0.25;
    p.c_vh = 0.2;
    p.c_hv = 0.25;
    return p;
}

// Roots of x^4 + a1 x^3 + a2 x^2 + a3 x + a4.
inline std::array<std::complex<double>, 4> quartic_roots(double a1, double a2, double a3,
                                                         double a4) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = -a1;
    m(0, 1) = -a2;
    m(0, 2) = -a3;
    m(0, 3) = -a4;
    m(1, 0) = m(2, 1) = m(3, 2) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix4d> es(m, false);
    std::array<std::complex<double>, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()[i];
    return out;
}

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: bad input");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace vhd_test

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace vhd {

// System state: four host compartments, aquatic vectors, three adult vector
// compartments, and the fish population.
struct State {
    double s_h = 0.0;  // susceptible hosts
    double e_h = 0.0;  // incubating hosts
    double i_h = 0.0;  // infectious hosts
    double r_h = 0.0;  // recovered hosts
    double m_q = 0.0;  // aquatic-stage vectors (eggs/larvae/pupae)
    double s_v = 0.0;  // susceptible adult vectors
    double e_v = 0.0;  // incubating adult vectors
    double i_v = 0.0;  // infectious adult vectors
    double g = 0.0;    // fish

    static constexpr std::size_t size = 9;
    static constexpr std::array<const char*, size> names{
        "S_h", "E_h", "I_h", "R_h", "m_q", "S_v", "E_v", "I_v", "G"};

    double total_hosts() const { return s_h + e_h + i_h + r_h; }
    double total_adult_vectors() const { return s_v + e_v + i_v; }

    std::array<double, size> to_array() const {
        return {s_h, e_h, i_h, r_h, m_q, s_v, e_v, i_v, g};
    }

    static State from_array(const std::array<double, size>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8]};
    }

    double operator[](std::size_t i) const { return to_array()[i]; }

    bool all_finite() const {
        for (double v : to_array())
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool all_nonnegative() const {
        for (double v : to_array())
            if (v < 0.0) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : to_array()) m = std::max(m, std::abs(v));
        return m;
    }
};

inline State operator+(const State& a, const State& b) {
    auto x = a.to_array();
    auto y = b.to_array();
    for (std::size_t i = 0; i < State::size; ++i) x[i] += y[i];
    return State::from_array(x);
}

inline State operator-(const State& a, const State& b) {
    auto x = a.to_array();
    auto y = b.to_array();
    for (std::size_t i = 0; i < State::size; ++i) x[i] -= y[i];
    return State::from_array(x);
}

inline State operator*(double c, const State& a) {
    auto x = a.to_array();
    for (double& v : x) v *= c;
    return State::from_array(x);
}

}  // namespace vhd

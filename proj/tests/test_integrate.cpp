#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "support.hpp"
#include "vhd/config.hpp"
#include "vhd/integrate.hpp"

using vhd::Params;
using vhd::State;
using vhd::Trajectory;

namespace {

State reference_initial() {
    State x{};
    x.s_h = 6000;
    x.e_h = 2000;
    x.i_h = 1000;
    x.r_h = 1000;
    x.m_q = 1100;
    x.s_v = 300;
    x.e_v = 100;
    x.i_v = 100;
    return x;
}

double rel_gap(const State& a, const State& b) {
    double scale = std::max({1.0, a.max_abs(), b.max_abs()});
    return (a - b).max_abs() / scale;
}

}  // namespace

TEST_CASE("a steady state stays put") {
    Params p = Params::baseline();
    State e2{};
    e2.s_h = p.lambda_h / p.d_h;
    e2.g = p.K_x;

    Trajectory traj = vhd::integrate(e2, p, 0.0, 300.0, 1.0, 1e-8);
    REQUIRE(traj.size() == 301);
    for (const State& x : traj.x) CHECK(rel_gap(x, e2) < 1e-6);
}

TEST_CASE("argument validation") {
    Params p = Params::baseline();
    State x = reference_initial();
    CHECK_THROWS_AS(vhd::integrate(x, p, 0.0, 0.0, 0.5, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(vhd::integrate(x, p, 0.0, 10.0, 0.0, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(vhd::integrate(x, p, 0.0, 10.0, 0.5, 1e-1), std::invalid_argument);
    CHECK_THROWS_AS(vhd::integrate(x, p, 0.0, 10.0, 0.5, 1e-13), std::invalid_argument);

    State bad = x;
    bad.m_q = -1.0;
    CHECK_THROWS_AS(vhd::integrate(bad, p, 0.0, 10.0, 0.5, 1e-8), std::invalid_argument);
    bad = x;
    bad.s_h = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(vhd::integrate(bad, p, 0.0, 10.0, 0.5, 1e-8), std::invalid_argument);
    State no_hosts{};
    no_hosts.m_q = 100.0;
    CHECK_THROWS_AS(vhd::integrate(no_hosts, p, 0.0, 10.0, 0.5, 1e-8), std::invalid_argument);
}

TEST_CASE("sampling grid covers the endpoints") {
    Params p = Params::baseline();
    State x = reference_initial();
    Trajectory traj = vhd::integrate(x, p, 0.0, 10.3, 0.5, 1e-6);
    CHECK(traj.t.front() == 0.0);
    CHECK(traj.t.back() == 10.3);
    REQUIRE(traj.size() == 22);  // 0, 0.5, ..., 10.0, then 10.3
    for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.t[i] > traj.t[i - 1]);
    CHECK(rel_gap(traj.x.front(), x) == 0.0);
}

TEST_CASE("identical inputs give bit-identical trajectories") {
    vhd::ScenarioConfig cfg = vhd::preset("fig1b");
    Trajectory a = vhd::integrate(cfg.initial, cfg.params, 0.0, 120.0, 0.5, 1e-8);
    Trajectory b = vhd::integrate(cfg.initial, cfg.params, 0.0, 120.0, 0.5, 1e-8);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.t[i] == b.t[i]);
        CHECK(std::memcmp(a.x[i].to_array().data(), b.x[i].to_array().data(),
                          9 * sizeof(double)) == 0);
    }
}

TEST_CASE("sample spacing does not perturb the solution") {
    // The step sequence is independent of the sample grid, so values at shared
    // sample times must agree bit for bit.
    vhd::ScenarioConfig cfg = vhd::preset("fig1b");
    Trajectory coarse = vhd::integrate(cfg.initial, cfg.params, 0.0, 60.0, 1.0, 1e-8);
    Trajectory fine = vhd::integrate(cfg.initial, cfg.params, 0.0, 60.0, 0.25, 1e-8);
    REQUIRE(fine.size() == 4 * (coarse.size() - 1) + 1);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        CHECK(coarse.t[i] == fine.t[4 * i]);
        CHECK(std::memcmp(coarse.x[i].to_array().data(), fine.x[4 * i].to_array().data(),
                          9 * sizeof(double)) == 0);
    }
}

TEST_CASE("population bounds hold along every preset trajectory") {
    for (const auto& [name, cfg] : vhd::presets()) {
        INFO("preset " << name);
        const Params& p = cfg.params;
        double human_cap = p.lambda_h / p.d_h;
        double vector_cap = p.f * p.alpha * p.K_q / p.d_v;
        REQUIRE(cfg.initial.total_hosts() <= human_cap);
        REQUIRE(cfg.initial.m_q <= p.K_q);
        REQUIRE(cfg.initial.total_adult_vectors() <= vector_cap);
        REQUIRE(cfg.initial.g <= p.K_x);

        Trajectory traj = vhd::integrate(cfg.initial, p, 0.0, cfg.horizon_days, cfg.sample_dt,
                                         cfg.tol);
        constexpr double slack = 1.0 + 1e-6;
        for (const State& x : traj.x) {
            CHECK(x.all_nonnegative());
            CHECK(x.total_hosts() <= human_cap * slack);
            CHECK(x.m_q <= p.K_q * slack);
            CHECK(x.total_adult_vectors() <= vector_cap * slack);
            CHECK(x.g <= p.K_x * slack);
        }
    }
}

TEST_CASE("tightening the tolerance tightens the answer") {
    vhd::ScenarioConfig cfg = vhd::preset("fig1b");
    State ref = vhd::integrate(cfg.initial, cfg.params, 0.0, 120.0, 120.0, 1e-10).back();
    double ref_scale = ref.max_abs();

    std::vector<double> log_tol, log_err;
    double prev = std::numeric_limits<double>::infinity();
    for (double tol : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9}) {
        State end = vhd::integrate(cfg.initial, cfg.params, 0.0, 120.0, 120.0, tol).back();
        double err = (end - ref).max_abs() / ref_scale;
        INFO("tol " << tol << " err " << err);
        CHECK(err < prev * 1.5);  // small slack for plateaus near the reference floor
        if (err > 1e-13) {
            log_tol.push_back(std::log10(tol));
            log_err.push_back(std::log10(err));
        }
        prev = err;
    }
    REQUIRE(log_tol.size() >= 4);
    double slope = vhd_test::fit_slope(log_tol, log_err);
    INFO("slope " << slope);
    CHECK(slope > 0.4);
    CHECK(slope < 1.7);
}

TEST_CASE("single fixed steps converge at fifth order") {
    vhd::ScenarioConfig cfg = vhd::preset("fig1b");
    auto y0 = cfg.initial.to_array();
    auto k1 = vhd::detail::eval_rhs(y0, cfg.params);

    // reference for y(h_max) via many tiny steps; h_max small enough that the
    // fastest mode (fish growth at ~53/day) is resolved at every step count
    const double h_max = 0.02;
    auto advance = [&](int n_steps) {
        auto y = y0;
        auto k = k1;
        double h = h_max / n_steps;
        for (int i = 0; i < n_steps; ++i) {
            auto s = vhd::dp5_step(y, k, h, cfg.params);
            y = s.y1;
            k = s.k7;
        }
        return y;
    };
    auto ref = advance(4096);

    std::vector<double> log_h, log_err;
    for (int n : {1, 2, 4, 8}) {
        auto y = advance(n);
        double err = 0.0;
        for (std::size_t i = 0; i < 9; ++i)
            err = std::max(err, std::abs(y[i] - ref[i]) / (1.0 + std::abs(ref[i])));
        log_h.push_back(std::log10(h_max / n));
        log_err.push_back(std::log10(err));
    }
    double order = vhd_test::fit_slope(log_h, log_err);
    INFO("measured order " << order);
    CHECK(order > 4.5);
    CHECK(order < 5.8);
}

TEST_CASE("overwhelming stiffness fails loudly with the partial result") {
    Params p = Params::baseline();
    p.phi = 1e7;  // fish clear the larval pool at ~1e10/day: far beyond explicit stepping
    State x = reference_initial();
    x.g = p.K_x;

    try {
        vhd::integrate(x, p, 0.0, 100.0, 0.5, 1e-8);
        FAIL("expected IntegrationFailure");
    } catch (const vhd::IntegrationFailure& e) {
        CHECK(e.t_fail < 100.0);
        REQUIRE(!e.partial.t.empty());
        CHECK(e.partial.t.front() == 0.0);
        CHECK(rel_gap(e.partial.x.front(), x) == 0.0);
    }
}

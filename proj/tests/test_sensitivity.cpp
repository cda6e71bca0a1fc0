#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"
#include "vhd/sensitivity.hpp"

using Catch::Matchers::WithinAbs;
using vhd::Params;
using vhd::SensitivityTable;
using vhd::SensitivityTarget;

TEST_CASE("named index values at default parameters") {
    Params p = Params::baseline();

    SensitivityTable r0sq = vhd::sensitivity_analytic(SensitivityTarget::r0_squared, p);
    CHECK(r0sq.at("a_v") == 2.0);
    CHECK(r0sq.at("c_vh") == 1.0);
    CHECK(r0sq.at("c_hv") == 1.0);
    CHECK_THAT(r0sq.at("theta"), WithinAbs(-1.01476, 1e-5));
    CHECK_THAT(r0sq.at("d_v"), WithinAbs(-1.1436, 1e-4));
    CHECK_THAT(r0sq.at("nu_v"), WithinAbs(p.d_v / (p.d_v + p.nu_v), 1e-12));
    CHECK_THAT(r0sq.at("nu_v"), WithinAbs(0.143836, 1e-6));

    SensitivityTable o0 = vhd::sensitivity_analytic(SensitivityTarget::o0, p);
    CHECK(o0.at("epsilon") == 1.0);
    CHECK(o0.at("k") == 1.0);
    CHECK(o0.at("f") == 1.0);
    CHECK(o0.at("d_v") == -1.0);
    CHECK_THAT(o0.at("alpha"), WithinAbs(0.366412, 1e-6));

    SensitivityTable o = vhd::sensitivity_analytic(SensitivityTarget::o, p);
    CHECK_THAT(o.at("alpha"), WithinAbs(0.999763, 1e-6));
    CHECK_THAT(o.at("phi"), WithinAbs(-0.999626, 1e-6));
    CHECK_THAT(o.at("K_x"), WithinAbs(-0.999626, 1e-6));
    CHECK_THAT(o.at("d_q"), WithinAbs(-0.000137092, 1e-9));
}

TEST_CASE("parameters absent from a target have exactly zero index") {
    Params p = Params::baseline();
    SensitivityTable r0sq = vhd::sensitivity_analytic(SensitivityTarget::r0_squared, p);
    for (const char* name : {"K_q", "alpha", "epsilon", "k", "d_q", "phi", "f", "rho", "psi",
                             "K_x", "lambda_h"})
        CHECK(r0sq.at(name) == 0.0);

    SensitivityTable o = vhd::sensitivity_analytic(SensitivityTarget::o, p);
    for (const char* name : {"a_v", "c_vh", "c_hv", "nu_h", "nu_v", "theta", "B_h", "p", "q",
                             "d_h", "d_i", "d_iv", "K_q", "rho", "psi", "lambda_h"})
        CHECK(o.at(name) == 0.0);
}

TEST_CASE("every table covers every parameter exactly once") {
    Params p = Params::baseline();
    for (auto target :
         {SensitivityTarget::r0_squared, SensitivityTarget::o0, SensitivityTarget::o}) {
        SensitivityTable t = vhd::sensitivity_analytic(target, p);
        REQUIRE(t.entries.size() == vhd::param_fields.size());
        for (std::size_t i = 0; i < t.entries.size(); ++i)
            CHECK(std::string(t.entries[i].param) == vhd::param_fields[i].name);
    }
}

TEST_CASE("analytic indices agree with the finite-difference oracle") {
    auto check_all = [](const Params& p) {
        for (auto target :
             {SensitivityTarget::r0_squared, SensitivityTarget::o0, SensitivityTarget::o}) {
            SensitivityTable an = vhd::sensitivity_analytic(target, p);
            SensitivityTable fd = vhd::sensitivity_finite_difference(target, p);
            for (std::size_t i = 0; i < an.entries.size(); ++i) {
                INFO(vhd::target_name(target) << " / " << an.entries[i].param);
                CHECK_THAT(an.entries[i].index, WithinAbs(fd.entries[i].index, 1e-6));
            }
        }
    };
    check_all(Params::baseline());
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i)
        check_all(vhd_test::draw_params(rng, Params::baseline(), 0.3));
}

TEST_CASE("maturation and aquatic-mortality indices are mirror images") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 20; ++i) {
        Params p = vhd_test::draw_params(rng, Params::baseline(), 0.5);
        SensitivityTable o0 = vhd::sensitivity_analytic(SensitivityTarget::o0, p);
        double expected = p.d_q / (p.alpha + p.d_q);
        CHECK_THAT(o0.at("alpha"), WithinAbs(expected, 1e-12));
        CHECK_THAT(o0.at("d_q"), WithinAbs(-expected, 1e-12));
    }
}

TEST_CASE("index signs are stable across the parameter region") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 30; ++i) {
        Params p = vhd_test::draw_params(rng, Params::baseline(), 0.5);
        SensitivityTable t = vhd::sensitivity_analytic(SensitivityTarget::r0_squared, p);
        CHECK(t.at("theta") < 0.0);
        CHECK(t.at("a_v") > 0.0);
    }
}

TEST_CASE("a vanishing target has no well-defined indices") {
    Params p = Params::baseline();
    p.c_vh = 0.0;  // squared reproduction number becomes 0
    CHECK_THROWS_AS(vhd::sensitivity_analytic(SensitivityTarget::r0_squared, p),
                    std::domain_error);
    CHECK_THROWS_AS(vhd::sensitivity_finite_difference(SensitivityTarget::r0_squared, p),
                    std::domain_error);
}

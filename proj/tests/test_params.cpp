#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vpfocus/params.hpp"

using namespace vpfocus;

namespace {

const TargetSpec reference{1.0, 10.0, 1.0, 2.0, 3.0};

double term(const std::vector<NamedTerm>& terms, const std::string& name)
{
    for (const auto& t : terms)
        if (t.name == name)
            return t.value;
    FAIL("missing term " << name);
    return 0.0;
}

} // namespace

TEST_SUITE("params") {

TEST_CASE("classical constants for the reference targets")
{
    const ParameterSet p = derive_parameters(SystemKind::VP, reference);
    const double s2 = std::sqrt(2.0);
    CHECK(p.k == 0.625);
    CHECK(p.eps == doctest::Approx((std::sqrt(5.0) - s2) / (8.0 * s2)).epsilon(1e-15));
    CHECK(p.eps == doctest::Approx(0.0726424).epsilon(1e-6));
    // Independent evaluation of the dominating density term 16 sqrt2 (b^3 - a^3) C2 / (3 (sqrt(a^2+b^2) - sqrt2 a)).
    const double density = 16.0 * s2 * 7.0 * 10.0 / (3.0 * (std::sqrt(5.0) - s2));
    CHECK(p.a0 == doctest::Approx(density).epsilon(1e-14));
    CHECK(p.a0 == doctest::Approx(642.4167754876).epsilon(1e-11)); // high-precision reference
    CHECK(term(p.a0_terms, "density_target") == p.a0);
    for (const auto& t : p.a0_terms)
        CHECK(p.a0 >= t.value);
    CHECK(p.a0_terms.size() == 6);

    CHECK(p.d == doctest::Approx(0.5 * (1.0 + std::sqrt(0.625) * 2.0)).epsilon(1e-15));
    CHECK(p.delta == doctest::Approx(2.0 * p.eps).epsilon(1e-14));
    CHECK(vp_velocity_window_margin(p) > 0.0);
    CHECK(p.T > 0.0);
    for (const auto& b : p.T_terms)
        CHECK(p.T <= b.value);
    CHECK(p.l_max == doctest::Approx(p.delta * p.delta * std::pow(p.a0 + p.eps, 2) / (p.T * p.T)).epsilon(1e-14));
    CHECK(p.T == doctest::Approx(0.89997).epsilon(1e-4));
}

TEST_CASE("classical T is the largest admissible time")
{
    const ParameterSet p = derive_parameters(SystemKind::VP, reference);
    // Slightly larger T: the bounds evaluated at the larger l_max no longer admit it.
    const double T_big = p.T * (1.0 + 1e-6);
    const double l_big = p.delta * p.delta * std::pow(p.a0 + p.eps, 2) / (T_big * T_big);
    double cap = 1e300;
    for (const auto& b : vp_time_bounds(p, l_big))
        cap = std::min(cap, b.value);
    CHECK(T_big > cap);
}

TEST_CASE("relativistic constants for the reference targets")
{
    const ParameterSet p = derive_parameters(SystemKind::RVP, reference);
    const double s2 = std::sqrt(2.0);
    CHECK(p.k == 0.625);
    CHECK(p.eps == doctest::Approx((std::sqrt(5.0) - s2) / (4.0 * s2)).epsilon(1e-15));
    CHECK(p.eps == doctest::Approx(0.145284).epsilon(1e-5));
    const double envelope = std::pow(344.0 * std::numbers::pi / (0.375 * 4.0), 1.5);
    CHECK(p.a0 == doctest::Approx(envelope).epsilon(1e-14));
    CHECK(p.a0_terms.size() == 10);
    for (const auto& t : p.a0_terms)
        CHECK(p.a0 >= t.value);

    CHECK(p.N > 1.0);
    const double sn = std::sqrt(p.N);
    const double a02 = p.a0 * p.a0;
    CHECK(p.h <= (p.N - 1.0) * a02 / (2.0 * (p.N + 1.0)) * (1.0 + 1e-9));
    CHECK(p.h <= (sn - 1.0) * a02 / (1.0 + sn) * (1.0 + 1e-9));
    CHECK(p.h * p.a0 > p.eps);
    CHECK(p.delta == doctest::Approx(p.h * p.a0 - p.eps).epsilon(1e-15));
    CHECK(p.d == doctest::Approx(std::pow(p.a0, 3) - p.a0).epsilon(1e-15));
    REQUIRE(p.T_terms.size() == 2);
    CHECK(p.T >= p.T_terms[0].value);
    CHECK(p.T <= p.T_terms[1].value);
    const auto m = rvp_interval_margins(p);
    CHECK(m.ratio_margin > 0.0);
    CHECK(m.square_margin > 0.0);
}

TEST_CASE("mass bounds")
{
    const ParameterSet p = derive_parameters(SystemKind::VP, reference);
    const double pi = std::numbers::pi;
    CHECK(p.mass_lower_bound() == doctest::Approx(2 * pi * p.a0 * p.eps + pi / 6 * std::pow(p.eps, 3) / p.a0));
    CHECK(p.mass_upper_bound() == doctest::Approx(8 * pi * p.a0 * p.eps + 8 * pi / 3 * std::pow(p.eps, 3) / p.a0));
    CHECK(p.mass_lower_bound() == doctest::Approx(293.2).epsilon(1e-3));
}

TEST_CASE("safety factor scales a0")
{
    DeriveOptions o;
    o.safety_factor = 2.0;
    const ParameterSet p = derive_parameters(SystemKind::VP, reference, o);
    CHECK(p.a0 == doctest::Approx(2.0 * 642.4167754876).epsilon(1e-11));
    o.safety_factor = 0.5;
    CHECK_THROWS_AS(derive_parameters(SystemKind::VP, reference, o), DomainError);
}

TEST_CASE("invalid targets are rejected")
{
    CHECK_THROWS_AS(derive_parameters(SystemKind::VP, {1.0, 10.0, 2.0, 1.0, 3.0}), DomainError);
    CHECK_THROWS_AS(derive_parameters(SystemKind::VP, {1.0, 10.0, 1.0, 1.0, 3.0}), DomainError);
    CHECK_THROWS_AS(derive_parameters(SystemKind::VP, {1.0, 10.0, 1.0, 2.0, 2.0}), DomainError);
    CHECK_THROWS_AS(derive_parameters(SystemKind::RVP, {0.0, 10.0, 1.0, 2.0, 3.0}), DomainError);
    CHECK_THROWS_AS(derive_parameters(SystemKind::RVP, {1.0, -1.0, 1.0, 2.0, 3.0}), DomainError);
    CHECK_THROWS_AS(derive_parameters(SystemKind::VP, {1.0, 10.0, 0.0, 2.0, 3.0}), DomainError);
}

TEST_CASE("wide target shells are infeasible for the classical time bound")
{
    try {
        derive_parameters(SystemKind::VP, {1.0, 10.0, 1.0, 100.0, 200.0});
        FAIL("expected infeasibility");
    } catch (const InfeasibleError& e) {
        CHECK(e.constraint() == "vp_time_fixed_point");
    }
    CHECK_NOTHROW(derive_parameters(SystemKind::RVP, {1.0, 10.0, 1.0, 100.0, 200.0}));
}

TEST_CASE("derivation is deterministic")
{
    const ParameterSet p = derive_parameters(SystemKind::RVP, reference);
    const ParameterSet q = derive_parameters(SystemKind::RVP, reference);
    CHECK(p.T == q.T);
    CHECK(p.delta == q.delta);
}

}

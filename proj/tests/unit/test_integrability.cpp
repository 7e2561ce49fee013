#include "systems.hpp"

#include <doctest.h>

using namespace testsys;

TEST_SUITE("integrability")
{
    TEST_CASE("oscillator passes every structural registry")
    {
        const auto sf = oscillator();
        for (const auto& rep : {conformal_residuals(sf), standard_residuals(sf), flat_residuals(sf), proper_residuals(sf)})
            CHECK(rep.max_abs() == 0.0);
        CHECK(conformal_residuals(sf).entries.size() == 6);
    }

    TEST_CASE("SW-I passes every structural registry")
    {
        const auto sf = sw1();
        CHECK(conformal_residuals(sf, {true}).max_abs() < 1e-12);
        CHECK(flat_residuals(sf, {true}).max_abs() < 1e-12);
        CHECK(proper_residuals(sf, {true}).max_abs() < 1e-12);
        CHECK(standard_residuals(to_standard_gauge(sf), {true}).max_abs() < 1e-12);
    }

    TEST_CASE("Delta-t example")
    {
        const auto sf = make_structure(ConformalChart::flat({0.5, 1.5, -0.5, 0.5, 3, 3}), w(), 0.0);
        const auto rep = conformal_residuals(sf);
        CHECK(std::abs(rep.entries.at("Delta-t").max_abs - 4.0 / 3.0 * 2.5) < 1e-12);
        const auto at1 = evaluate(conformal_equations(sf), std::vector<ChartPoint>{{1, 0}});
        CHECK(std::abs(at1.entries.at("Delta-t").max_abs - 4.0 / 3.0) < 1e-14);
        CHECK(!rep.passes(1e-9));
    }

    TEST_CASE("gauge covariance of the registries")
    {
        const Field U = Field(0.2) * x() * y() + Field(0.1) * sq(x());
        const auto g = gauge_transform(sw1(), U);
        CHECK(conformal_residuals(g, {true}).max_abs() < 1e-12);
        // tau is not conformally invariant: the rescaled system is no longer proper.
        CHECK_THROWS_AS((void)proper_residuals(g, {true}), NotProper);
        CHECK(flat_residuals(to_flat_gauge(g), {true}).max_abs() < 1e-12);
        CHECK(standard_residuals(to_standard_gauge(g), {true}).max_abs() < 1e-12);
        // A broken system stays broken after rescaling.
        const auto br = make_structure(ConformalChart::flat(sw_domain()), w(), 0.0);
        CHECK(conformal_residuals(gauge_transform(br, U), {true}).max_abs() > 1e-3);
    }

    TEST_CASE("proper registry")
    {
        CHECK(proper_residuals(oscillator()).max_abs() == 0.0);
        const cplx c(0.5, 0.3);
        const auto sf = make_structure(ConformalChart::flat({-1, 1, -1, 1, 5, 5}), Field(c), 0.0);
        CHECK(std::abs(proper_residuals(sf).entries.at("P:Delta-t").max_abs - 4.0 / 3.0 * std::norm(c)) < 1e-14);
        const auto toy = make_structure(ConformalChart::flat({-1, 1, -1, 1, 5, 5}), w(), 0.0);
        CHECK_THROWS_AS((void)proper_residuals(toy), NotProper);
    }

    TEST_CASE("standard registry needs t_z = 0")
    {
        CHECK(!is_standard_gauge(sw1()));
        CHECK(is_standard_gauge(to_standard_gauge(sw1())));
    }

    TEST_CASE("Bertrand-Darboux examples")
    {
        const ConformalChart flat = ConformalChart::flat({-1, 1, -1, 1, 5, 5});
        const ConformalChart sph = ConformalChart::sphere({-1, 1, -1, 1, 5, 5});
        const Field V = exp(x()) * y() + sq(z()) * w();
        // K = g: K_zz = 0, K_zzbar = phi^2/2.
        CHECK(max_on(bertrand_darboux_killing(sph, 0.0, sph.g_zzbar(), V), sph.domain()) < 1e-12);
        CHECK(max_on(bertrand_darboux_killing(flat, 0.25, 0.25, sq(x()) + sq(y())), flat.domain()) < 1e-15);
        CHECK(max_on(bertrand_darboux_killing(flat, 0.25, 0.25, x() * y()), flat.domain()) > 0.1);
    }

    TEST_CASE("Bertrand-Darboux with rho")
    {
        const Domain d{0.3, 1.3, 0.2, 0.9, 5, 5};
        const ConformalChart flat = ConformalChart::flat(d);
        // C = zbar dz^2 + z dzbar^2 with the Kepler potential.
        const Field kepler = exp(Field(-0.5) * log(z() * w()));
        CHECK(max_on(bertrand_darboux_residual(flat, w(), z(), kepler), d) < 1e-13);
        CHECK(max_on(bertrand_darboux_residual(flat, w(), z(), sq(x()) * y()), d) > 0.1);
    }

    TEST_CASE("Wilczynski examples")
    {
        const auto osc = oscillator();
        CHECK(wilczynski_residual(osc, osc_potential(1.0, 0.7, -0.4, 0.25)).max_abs() == 0.0);
        const auto bad = wilczynski_residual(osc, pow(z(), 3) + pow(w(), 3));
        CHECK(bad.entries.at("W1").max_abs > 1.0);
        CHECK(wilczynski_residual(osc, Field(2.5), true).max_abs() == 0.0);
        const auto sf = sw1();
        CHECK(wilczynski_residual(sf, sw1_potential(1.0, 0.3, 0.7, 0.0), false, {true}).max_abs() < 1e-12);
        CHECK(wilczynski_residual(sf, sw1_potential(0.4, -0.2, 0.5, 1.0), true, {true}).max_abs() < 1e-12);
        CHECK(wilczynski_residual(sf, pow(x(), 4), false, {true}).max_abs() > 1e-3);
    }

    TEST_CASE("Wilczynski on a rescaled system")
    {
        const Field U = Field(0.2) * x() * y() + Field(0.1) * sq(x());
        const auto g = gauge_transform(sw1(), U);
        const Field V = sw1_potential(1.0, 0.3, 0.7, 0.0) * exp(Field(-2.0) * U);
        CHECK(wilczynski_residual(g, V, false, {true}).max_abs() < 1e-11);
    }

    TEST_CASE("second prolongation coefficients are symmetric")
    {
        const auto sf = sw1();
        const auto c = second_prolongation(sf, tau_from(sf));
        CHECK(c.q22 == c.q11);
        CHECK(max_on(c.q21 - c.q12.conj(), sw_domain()) < 1e-14);
        CHECK(max_on(c.gamma2 - c.gamma1.conj(), sw_domain()) < 1e-14);
    }

    TEST_CASE("tensor identities")
    {
        const auto unit = tensor_identity_residuals({1.0, 1.0, 0.0, 0.0, 0.0});
        CHECK(unit.at("S-identity") == 0.0);
        CHECK(tensor_identity_residuals({1.3, {0.2, 0.5}, {-0.3, 0.7}, 0, 0}).at("Z-identity") < 1e-13);
        CHECK(tensor_identity_check(5, 100).max_abs() < 1e-12);
    }

    TEST_CASE("hook identity needs coefficient 1")
    {
        const IdentitySample d{1.3, {0.2, 0.5}, {-0.3, 0.7}, {0.4, -0.1}, {0.9, 0.2}};
        CHECK(tensor_identity_residuals(d, 1.0).at("hookZ-identity") < 1e-13);
        CHECK(tensor_identity_residuals(d, 0.5).at("hookZ-identity") > 0.1);
    }

    TEST_CASE("remn components vanish on proper systems")
    {
        const auto sf = sw1();
        CHECK(max_on(remn_component(sf), sw_domain()) < 1e-10);
        auto [dw, dz] = dremn_components(sf);
        CHECK(max_on(dw, sw_domain()) < 1e-9);
        CHECK(max_on(dz, sw_domain()) < 1e-9);
    }

    TEST_CASE("report bookkeeping")
    {
        ResidualReport a, b;
        a.entries["x"].max_abs = 1e-3;
        b.entries["y"].max_abs = 2e-3;
        a.merge(b);
        CHECK(a.max_abs() == 2e-3);
        CHECK(a.failing(1.5e-3) == std::vector<std::string>{"y"});
        const std::vector<ChartPoint> pts = {{0, 0}, {1, 1}};
        const auto r = evaluate({Equation{"inv", {Component{{Field(1.0) / z()}}}}}, pts, {false, 0.5});
        CHECK(r.entries.at("inv").excluded == 1);
        CHECK_THROWS_AS((void)evaluate({Equation{"inv", {Component{{Field(1.0) / z()}}}}}, pts, {false, 0.1}),
                        DomainError);
    }
}

#include "systems.hpp"

#include "superint/jet.hpp"

#include <doctest.h>

using namespace testsys;

TEST_SUITE("reconstruct")
{
    TEST_CASE("oscillator potential from its seed")
    {
        const auto sf = oscillator();
        for (auto a : {std::array<double, 4>{1, 1, 1, 0}, std::array<double, 4>{1.3, 0.7, -0.4, 0.25}}) {
            const PotentialSeed seed{a[3], {a[1], a[2]}, 4 * a[0]};
            const auto tr = integrate_potential(sf, TauMode::conformal, seed, ChartPath::straight(0.0, {1, 1}));
            CHECK(std::abs(tr.end()[0] - (2 * a[0] + 2 * a[1] - 2 * a[2] + a[3])) < 1e-8);
            CHECK(tr.warnings.empty());
        }
    }

    TEST_CASE("constants solve the proper system")
    {
        const auto tr = integrate_potential(oscillator(), TauMode::proper, {1.0, 0.0, 0.0},
                                            ChartPath{{0.0, {1, 0}, {1, 1}, {-0.5, 1}}});
        for (const auto& y : tr.y) CHECK(std::abs(y[0] - 1.0) < 1e-14);
    }

    TEST_CASE("path independence")
    {
        const PotentialSeed seed{0.25, {0.7, -0.4}, 5.2};
        CHECK(potential_path_independence(oscillator(), TauMode::conformal, seed, {1, 1}) < 1e-8);
        CHECK(potential_path_independence(oscillator(), TauMode::conformal, {}, {1, 1}) == 0.0);
        const auto sw = sw1();
        CHECK(potential_path_independence(sw, TauMode::proper, {1.0, {0.3, 0.1}, 2.0}, {1.2, 0.85}) < 1e-8);
        // L-shaped against straight.
        const PotentialSeed s2{1.0, {0.3, 0.1}, 2.0};
        const auto a = integrate_potential(sw, TauMode::proper, s2, ChartPath::straight({0.5, 0.5}, {1.2, 0.85}));
        const auto b = integrate_potential(sw, TauMode::proper, s2, ChartPath{{{0.5, 0.5}, {1.2, 0.5}, {1.2, 0.85}}});
        CHECK(std::abs(a.end()[0] - b.end()[0]) < 1e-8);
    }

    TEST_CASE("reconstructed potential matches the closed form")
    {
        const auto sw = sw1();
        const Field V = sw1_potential(1.0, 0.3, 0.7, 0.0);
        const ChartPoint b = sw.base;
        const PotentialSeed seed{V.eval(b).real(), V.dz().eval(b), sw.chart.laplacian(V).eval(b).real()};
        const auto tr = integrate_potential(sw, TauMode::proper, seed, ChartPath::straight(b.z(), {1.2, 0.85}));
        CHECK(std::abs(tr.end()[0] - V.eval({1.2, 0.85})) < 1e-8);
        CHECK(std::abs(tr.end()[1] - V.dz().eval({1.2, 0.85})) < 1e-8);
    }

    TEST_CASE("a broken structure equation shows up as holonomy")
    {
        const auto br = make_structure(ConformalChart::flat(osc_domain()), 0.0, z() * w());
        const PotentialSeed seed{0.25, {0.7, -0.4}, 5.2};
        CHECK(potential_path_independence(br, TauMode::conformal, seed, {1, 1}) > 1e-3);
        const auto tr = integrate_potential(br, TauMode::conformal, seed, ChartPath::straight(0.0, {1, 1}));
        CHECK(!tr.warnings.empty());
    }

    TEST_CASE("endpoint maps have full rank")
    {
        CHECK(potential_endpoint_map(oscillator(), TauMode::proper, {1, 1}).rank() == 4);
        CHECK(killing_endpoint_map(oscillator(), {1, 1}).rank() == 2);
        CHECK(potential_endpoint_map(sw1(), TauMode::proper, {1.2, 0.85}).rank() == 4);
        CHECK(killing_endpoint_map(sw1(), {1.2, 0.85}).rank() == 2);
    }

    TEST_CASE("Killing seeds")
    {
        const auto sf = oscillator();
        const auto a = integrate_killing(sf, {1.0, 0.0}, ChartPath::straight(0.0, {1, -1}));
        for (const auto& y : a.y) CHECK((std::abs(y[0] - 1.0) < 1e-14 && std::abs(y[1]) < 1e-14));
        const auto b = integrate_killing(sf, {0.0, 1.0}, ChartPath::straight(0.0, {1, -1}));
        CHECK(std::abs(b.end()[1] - 1.0) < 1e-14);
        CHECK(std::abs(b.end()[0]) < 1e-14);
        CHECK(killing_holomorphy_defect(sw1(), {0.25, 0.25}, {1.0, 0.6}) < 1e-6);
        const auto sph = sphere_structure(generic_L1(), generic_L2(), sphere_domain(), {0.4, 0.4});
        IntegratorOptions tight;
        tight.tol = 1e-13;
        CHECK(killing_holomorphy_defect(sph, {{0.3, 0.1}, {0.3, -0.1}}, {0.6, 0.5}, 2e-4, tight) < 1e-7);
    }

    TEST_CASE("proper flat structure propagation")
    {
        const auto zero = integrate_structure_proper_flat({}, ChartPath::straight(0.0, {0.2, 0.1}));
        for (const auto& v : zero.end()) CHECK(v == 0.0);
        CHECK_THROWS_AS((void)integrate_structure_proper_flat({0.4, 0.0, 0.0}, ChartPath::straight(0.0, 0.1)),
                        SeedObstruction);
        try {
            (void)integrate_structure_proper_flat({0.4, 0.0, 0.0}, ChartPath::straight(0.0, 0.1));
        } catch (const SeedObstruction& e) {
            CHECK(e.dremn() > 0.1);
        }
        const auto seed = solve_proper_flat_seed({0.4, 0.2}, 0.3);
        const auto r = proper_flat_algebraic(seed);
        CHECK(r.remn < 1e-12);
        CHECK(r.dremn < 1e-12);
        const auto tr = integrate_structure_proper_flat(seed, ChartPath::straight(0.0, {0.2, -0.15}));
        const auto& y = tr.end();
        const double D = std::exp(-4.0 * y[3].real() / 3.0);
        CHECK(std::abs(D * d_jet(3, 0).eval({y[0], y[1], y[2]})) < 1e-8);
        const auto alg = proper_flat_algebraic({y[0], y[1], y[2]});
        CHECK(alg.remn < 1e-8);
    }

    TEST_CASE("jets")
    {
        // The third pure derivatives vanish identically.
        CHECK(d_jet(3, 0).terms().empty());
        CHECK(d_jet(0, 3).terms().empty());
        CHECK(!d_jet(2, 2).terms().empty());
        const JetPoly s = JetPoly::var(JetPoly::s);
        CHECK(std::abs(s.Dz().eval({0.5, 0.0, 2.0}) - 4.0 / 3.0) < 1e-15);
    }

    TEST_CASE("path fan")
    {
        const auto fan = path_fan(0.0, {1, 1}, 4);
        CHECK(fan.size() == 4);
        for (const auto& p : fan) {
            CHECK(p.vertices.front() == cplx(0.0));
            CHECK(p.vertices.back() == cplx(1, 1));
        }
        CHECK(std::abs(fan[0].length() - 2.0) < 1e-15);
    }

    TEST_CASE("leaving the domain aborts")
    {
        const auto sf = make_structure(ConformalChart::flat({0, 1, 0, 1, 3, 3}), 0.0, 0.0);
        CHECK_THROWS_AS((void)integrate_potential(sf, TauMode::proper, {1.0, 0.0, 0.0}, ChartPath::straight(0.5, 2.0)),
                        DomainExit);
    }
}

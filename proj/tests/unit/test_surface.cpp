#include "systems.hpp"

#include <doctest.h>

using namespace testsys;

TEST_SUITE("surface")
{
    TEST_CASE("scalar curvature")
    {
        CHECK(ConformalChart::flat().scalar_curvature().is_zero());
        const Domain d{-0.9, 0.9, -0.9, 0.9, 7, 7};
        CHECK(max_on(ConformalChart::sphere(d).scalar_curvature() - Field(2.0), d) < 1e-13);
        const ConformalChart disk(Field(2.0) / (Field(1.0) - z() * w()), {-0.6, 0.6, -0.6, 0.6, 7, 7});
        CHECK(max_on(disk.scalar_curvature() + Field(2.0), disk.domain()) < 1e-13);
    }

    TEST_CASE("christoffel symbols")
    {
        auto [g, gb] = ConformalChart::flat().christoffel();
        CHECK(g.is_zero());
        CHECK(gb.is_zero());
        const Domain d{-1, 1, -1, 1, 5, 5};
        auto [gs, gsb] = ConformalChart::sphere(d).christoffel();
        CHECK(max_on(gs + Field(2.0) * w() / (Field(1.0) + z() * w()), d) < 1e-14);
        CHECK(max_on(gsb - gs.conj(), d) < 1e-15);
        auto [ge, geb] = ConformalChart(exp(Field(0.5) * (z() + w())), d).christoffel();
        CHECK(max_on(ge - Field(1.0), d) < 1e-14);
    }

    TEST_CASE("laplacian")
    {
        const ConformalChart flat = ConformalChart::flat();
        CHECK(flat.laplacian(z() * w()) == Field(4.0));
        CHECK(flat.laplacian(sq(z())).is_zero());
        CHECK(std::abs(ConformalChart::sphere().laplacian(z() * w()).eval({0, 0}) - 1.0) < 1e-15);
    }

    TEST_CASE("covariant hessian")
    {
        const Hessian h = ConformalChart::flat().covariant_hessian(sq(z()));
        CHECK(h.zz == Field(2.0));
        CHECK(h.zzbar.is_zero());
        CHECK(h.zbarzbar.is_zero());
        const Hessian c = ConformalChart::sphere().covariant_hessian(Field(3.0));
        CHECK(c.zz.is_zero());
        CHECK(c.zzbar.is_zero());
        const Hessian s = ConformalChart::sphere().covariant_hessian(z() + w());
        CHECK(std::abs(s.zz.eval({1, 0}) - 1.0) < 1e-15);
    }

    TEST_CASE("metric components")
    {
        const ConformalChart s = ConformalChart::sphere();
        CHECK(std::abs(s.g_zzbar().eval({0, 0}) - 2.0) < 1e-15);
        CHECK(std::abs(s.ginv_zzbar().eval({0, 0}) - 0.5) < 1e-15);
        CHECK(ConformalChart::flat().is_flat());
        CHECK(!s.is_flat());
    }

    TEST_CASE("domain grid")
    {
        const Domain d{0, 1, 0, 2, 3, 5};
        const auto g = d.grid();
        CHECK(g.size() == 15);
        CHECK(d.contains({1, 2}));
        CHECK(!d.contains({1.1, 0}));
    }
}

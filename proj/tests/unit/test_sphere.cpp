#include "systems.hpp"

#include "superint/catalog.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <random>

using namespace testsys;

namespace {

cplx form(const Sym3& L, const std::array<cplx, 3>& a, const std::array<cplx, 3>& b)
{
    cplx r = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r += L(i, j) * a[i] * b[j];
    return r;
}

// Chart derivative d_z x of the embedding by central differences.
std::array<cplx, 3> xz_fd(cplx z, double h = 1e-5)
{
    auto d = [&](cplx dir) {
        Vec3 p = stereographic_inverse(z + h * dir), m = stereographic_inverse(z - h * dir);
        return std::array<double, 3>{(p[0] - m[0]) / (2 * h), (p[1] - m[1]) / (2 * h), (p[2] - m[2]) / (2 * h)};
    };
    auto dx = d(1.0), dy = d(cplx(0, 1));
    return {0.5 * cplx(dx[0], -dy[0]), 0.5 * cplx(dx[1], -dy[1]), 0.5 * cplx(dx[2], -dy[2])};
}

std::array<cplx, 3> conj3(const std::array<cplx, 3>& a) { return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])}; }

Sym3 random_trace_free(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Sym3 L;
    for (auto& e : L.e) e = u(rng);
    L.e[5] = -L.e[0] - L.e[3];
    return L;
}

Sym3Q random_rational(std::mt19937& rng)
{
    std::uniform_int_distribution<int> n(-9, 9), d(1, 5);
    Sym3Q L;
    for (auto& e : L.e) e = mpq_class(n(rng), d(rng)), e.canonicalize();
    L.e[5] = -L.e[0] - L.e[3];
    return L;
}

std::array<Vec3, 3> random_rotation(std::mt19937& rng)
{
    std::normal_distribution<double> g;
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = g(rng);
    Eigen::Matrix3d Q = Eigen::HouseholderQR<Eigen::Matrix3d>(M).householderQ();
    std::array<Vec3, 3> out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = Q(i, j);
    return out;
}

}  // namespace

TEST_SUITE("sphere")
{
    TEST_CASE("stereographic chart")
    {
        const Vec3 s = stereographic_inverse(0.0);
        CHECK(s[2] == -1.0);
        const cplx z(0.3, -0.7);
        CHECK(std::abs(stereographic(stereographic_inverse(z)) - z) < 1e-15);
        CHECK_THROWS_AS((void)stereographic({0, 0, 1}), NorthPole);
    }

    TEST_CASE("restriction against brute-force projection")
    {
        std::mt19937 rng(2);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int k = 0; k < 5; ++k) {
            Sym3 L;
            for (auto& e : L.e) e = u(rng);
            const cplx z(u(rng), u(rng));
            const Vec3 x = stereographic_inverse(z);
            const auto xz = xz_fd(z), xw = conj3(xz);
            const std::array<cplx, 3> xc = {x[0], x[1], x[2]};
            const SphereRestriction r = restrict_to_sphere(L, x);
            CHECK(std::abs(r.Lzz - form(L, xz, xz)) < 1e-8);
            CHECK(std::abs(r.Lzw - form(L, xz, xw)) < 1e-8);
            CHECK(std::abs(r.Lww - form(L, xw, xw)) < 1e-8);
            CHECK(std::abs(r.lz + form(L, xz, xc)) < 1e-8);
            CHECK(std::abs(r.lw + form(L, xw, xc)) < 1e-8);
        }
    }

    TEST_CASE("restriction examples")
    {
        const Sym3 I{{1, 0, 0, 1, 0, 1}};
        const cplx z(0.4, 0.1);
        const auto r = restrict_to_sphere(I, stereographic_inverse(z));
        const double phi = 2.0 / (1.0 + std::norm(z));
        CHECK(std::abs(r.Lzz) < 1e-15);
        CHECK(std::abs(r.Lzw - 0.5 * phi * phi) < 1e-14);
        CHECK(std::abs(r.lz) < 1e-15);
        const auto p = restrict_to_sphere(generic_L2(), {0, 0, -1});
        CHECK(std::abs(p.Lzz) < 1e-15);
        CHECK(std::abs(p.Lzw - 2.0) < 1e-15);
        CHECK(std::abs(p.lz) < 1e-15);
        // e1 e2 + e2 e1 at (1, 0, 0): lambda(v) = -v_2.
        const Sym3 E{{0, 1, 0, 0, 0, 0}};
        const cplx z1 = stereographic({1, 0, 0});
        const auto q = restrict_to_sphere(E, {1, 0, 0});
        CHECK(std::abs(q.lz + xz_fd(z1)[1]) < 1e-8);
    }

    TEST_CASE("special to Killing")
    {
        const Sym3 I{{1, 0, 0, 1, 0, 1}};
        const cplx z(0.2, 0.3);
        const auto r = restrict_to_sphere(I, stereographic_inverse(z));
        const auto k = special_to_killing(r, z);
        // K = -g: trace relation tr K = -tr L.
        CHECK(std::abs(k.kzw + r.Lzw) < 1e-15);
        CHECK(std::abs(k.kzz) < 1e-15);
        std::mt19937 rng(4);
        for (int n = 0; n < 3; ++n) {
            Sym3 L = random_trace_free(rng);
            CHECK(sinyukov_residual(L, {0.3, -0.2}) < 1e-8);
            CHECK(killing_residual(L, {0.3, -0.2}) < 1e-8);
        }
    }

    TEST_CASE("Plücker coordinates")
    {
        const Sym3 A{{1, 0, 0, -1, 0, 0}}, B{{0, 1, 0, 0, 0, 0}};
        const Vec3 south{0, 0, -1};
        const auto p = plucker(A, B, south);
        const auto la = l_vector(restrict_to_sphere(A, south)), lb = l_vector(restrict_to_sphere(B, south));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) CHECK(std::abs(p.m[i][j] - (la[i] * lb[j] - la[j] * lb[i])) < 1e-15);
        CHECK(std::abs(p(1, -1) - cplx(0, 8)) < 1e-14);

        Sym3 A2 = A;
        for (auto& e : A2.e) e *= 3.0;
        const auto par = plucker(A, A2, stereographic_inverse({0.3, 0.2}));
        for (const auto& row : par.m)
            for (const auto& v : row) CHECK(std::abs(v) < 1e-14);

        const Vec3 x = stereographic_inverse({0.3, 0.2});
        const auto ab = plucker(A, B, x), ba = plucker(B, A, x);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) CHECK(std::abs(ab.m[i][j] + ba.m[i][j]) < 1e-15);
        CHECK(plucker_relations_max(ab) < 1e-14);
    }

    TEST_CASE("exact Plücker relations")
    {
        std::mt19937 rng(8);
        for (int k = 0; k < 5; ++k) {
            const QC z(mpq_class(k + 1, 7), mpq_class(-k, 5));
            CHECK(plucker_relations_exact(plucker(random_rational(rng), random_rational(rng), z)));
        }
    }

    TEST_CASE("structure read-off")
    {
        // Both tensors diagonal at the south pole: lambda = 0, so p_{1,2} = s = 0 there.
        const Sym3 A{{1, 0, 0, -1, 0, 0}}, B{{0, 1, 0, 0, 0, 0}};
        CHECK(std::abs(sphere_structure_functions(A, B, 0.0).s) < 1e-15);

        const Sym3 R1{{1, 2, -1, 3, 0.5, -4}}, R2{{2, -1, 3, -5, 1, 3}};
        const cplx z(0.3, 0.2);
        const auto v = sphere_structure_functions(R1, R2, z);
        Sym3 R2c = R2, R2m = R2;
        for (int k = 0; k < 6; ++k) R2c.e[k] *= -2.5, R2m.e[k] += 0.7 * R1.e[k];
        for (const Sym3& other : {R2c, R2m}) {
            const auto u = sphere_structure_functions(R1, other, z);
            CHECK(std::abs(u.s - v.s) < 1e-12 * std::abs(v.s));
            CHECK(std::abs(u.tz - v.tz) < 1e-12 * std::abs(v.tz));
            CHECK(std::abs(u.xi - v.xi) < 1e-10 * std::abs(v.xi));
        }
        CHECK_THROWS_AS((void)sphere_structure(A, A), SingularDenominator);
    }

    TEST_CASE("generic pair satisfies the constraint")
    {
        for (cplx z : {cplx(0.3, 0.2), cplx(-0.7, 0.4), cplx(1.5, -0.3)})
            CHECK(sphere_constraint_residual(generic_L1(), generic_L2(), z) < 1e-9);
        const Sym3Q A{{1, 0, 0, -1, 0, 0}}, B{{1, 0, 0, 1, 0, -2}};
        CHECK(sphere_constraint_exact(A, B, QC(mpq_class(3, 10), mpq_class(1, 5))).is_zero());
        CHECK(cleared_polynomial(A, B, QC(mpq_class(-7, 10), mpq_class(2, 5))).is_zero());
    }

    TEST_CASE("random pair violates the constraint, float and exact agree")
    {
        const Sym3Q Q1{{1, 2, -1, 3, mpq_class(1, 2), -4}}, Q2{{2, -1, 3, -5, 1, 3}};
        const Sym3 R1 = to_double(Q1), R2 = to_double(Q2);
        const QC zq(mpq_class(3, 10), mpq_class(1, 5));
        const cplx exact = sphere_constraint_exact(Q1, Q2, zq).to_cplx();
        const cplx fl = sphere_constraint_component(R1, R2, zq.to_cplx());
        CHECK(std::abs(exact) > 1.0);
        CHECK(std::abs(fl - exact) < 1e-10 * std::abs(exact));
        const cplx ce = cleared_polynomial(Q1, Q2, zq).to_cplx();
        const cplx cf = cleared_polynomial_float(R1, R2, zq.to_cplx());
        CHECK(std::abs(ce - cf) < 1e-10 * std::abs(ce));
    }

    TEST_CASE("regression fixture")
    {
        std::ifstream in(std::string(SUPERINT_FIXTURE_DIR) + "/sphere_regression_exact.json");
        REQUIRE(in.good());
        const json fx = json::parse(in);
        Sym3Q Q1, Q2;
        for (int k = 0; k < 6; ++k) {
            Q1.e[k] = mpq_class(fx["L1"][k].get<std::string>());
            Q2.e[k] = mpq_class(fx["L2"][k].get<std::string>());
            Q1.e[k].canonicalize(), Q2.e[k].canonicalize();
        }
        const Sym3 L1 = to_double(Q1), L2 = to_double(Q2);
        for (const auto& p : fx["points"]) {
            const QC z(mpq_class(p["z"][0].get<std::string>()), mpq_class(p["z"][1].get<std::string>()));
            const QC F = sphere_constraint_exact(Q1, Q2, z);
            CHECK(F.re.get_str() == p["F"][0].get<std::string>());
            CHECK(F.im.get_str() == p["F"][1].get<std::string>());
            const QC c = cleared_polynomial(Q1, Q2, z);
            CHECK(c.re.get_str() == p["cleared"][0].get<std::string>());
            const cplx ff = sphere_constraint_component(L1, L2, z.to_cplx());
            CHECK(std::abs(ff - F.to_cplx()) < 1e-12 * std::abs(F.to_cplx()));
        }
    }

    TEST_CASE("cleared polynomial is homogeneous of degree 6 in the pair")
    {
        std::mt19937 rng(21);
        const Sym3Q A = random_rational(rng), B = random_rational(rng);
        const QC z(mpq_class(2, 9), mpq_class(-1, 4));
        const QC base = cleared_polynomial(A, B, z);
        REQUIRE(!base.is_zero());
        for (int c : {2, 3}) {
            Sym3Q cA = A, cB = B;
            for (int k = 0; k < 6; ++k) cA.e[k] *= c, cB.e[k] *= c;
            const QC scaled = cleared_polynomial(cA, cB, z);
            CHECK(scaled == base * QC(mpq_class(static_cast<long>(std::pow(c, 6)))));
        }
        // F itself is projective.
        Sym3Q cA = A, cB = B;
        for (int k = 0; k < 6; ++k) cA.e[k] *= 2, cB.e[k] *= 2;
        CHECK(sphere_constraint_exact(cA, cB, z) == sphere_constraint_exact(A, B, z));
    }

    TEST_CASE("residual is finite away from p_{1,-1} = 0")
    {
        const Sym3 R1{{1, 2, -1, 3, 0.5, -4}}, R2{{2, -1, 3, -5, 1, 3}};
        int finite = 0;
        for (int i = 0; i < 21; ++i)
            for (int j = 0; j < 21; ++j) {
                const cplx z(-1.0 + 0.1 * i, -1.0 + 0.1 * j);
                try {
                    if (std::isfinite(sphere_constraint_residual(R1, R2, z))) ++finite;
                } catch (const SingularDenominator&) {
                }
            }
        CHECK(finite > 400);
    }

    TEST_CASE("rotation invariance of the constraint residual")
    {
        std::mt19937 rng(31);
        const Sym3 R1{{1, 2, -1, 3, 0.5, -4}}, R2{{2, -1, 3, -5, 1, 3}};
        const cplx z(0.3, 0.2);
        const double r0 = sphere_constraint_residual(R1, R2, z);
        for (int k = 0; k < 2; ++k) {
            const auto Q = random_rotation(rng);
            const Vec3 x = stereographic_inverse(z);
            Vec3 qx{};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) qx[i] += Q[i][j] * x[j];
            const double r1 = sphere_constraint_residual(rotate(R1, Q), rotate(R2, Q), stereographic(qx));
            CHECK(std::abs(r1 - r0) < 1e-9 * r0);
        }
    }

    TEST_CASE("sphere structure passes the registries")
    {
        const auto sf = sphere_structure(generic_L1(), generic_L2(), sphere_domain(), {0.4, 0.4});
        CHECK(conformal_residuals(sf, {true}).max_abs() < 1e-12);
        CHECK(proper_residuals(sf, {true}).max_abs() < 1e-9);
    }
}

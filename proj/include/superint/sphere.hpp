#pragma once

#include "superint/structure.hpp"

#include <gmpxx.h>

#include <array>
#include <stdexcept>
#include <string>

namespace superint {

class NorthPole : public std::runtime_error {
public:
    NorthPole() : std::runtime_error("point is the north pole; stereographic chart undefined") {}
};

class SingularDenominator : public std::runtime_error {
public:
    SingularDenominator() : std::runtime_error("p_{1,-1} vanishes at this point") {}
};

using Vec3 = std::array<double, 3>;

// Symmetric 3x3 tensor stored as (xx, xy, xz, yy, yz, zz).
template <class T>
struct SymTensor3 {
    std::array<T, 6> e{};

    [[nodiscard]] T operator()(int i, int j) const
    {
        static constexpr int idx[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
        return e[idx[i][j]];
    }
    [[nodiscard]] T trace() const { return e[0] + e[3] + e[5]; }
};

using Sym3 = SymTensor3<double>;
using Sym3Q = SymTensor3<mpq_class>;

// Gaussian rational.
struct QC {
    mpq_class re;
    mpq_class im;

    QC() = default;
    QC(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}  // NOLINT(google-explicit-constructor)

    [[nodiscard]] QC conj() const { return {re, -im}; }
    [[nodiscard]] bool is_zero() const { return re == 0 && im == 0; }
    [[nodiscard]] cplx to_cplx() const { return {re.get_d(), im.get_d()}; }
    [[nodiscard]] std::string str() const;

    friend QC operator+(const QC& a, const QC& b) { return {a.re + b.re, a.im + b.im}; }
    friend QC operator-(const QC& a, const QC& b) { return {a.re - b.re, a.im - b.im}; }
    friend QC operator-(const QC& a) { return {-a.re, -a.im}; }
    friend QC operator*(const QC& a, const QC& b)
    {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend QC operator/(const QC& a, const QC& b);
    friend bool operator==(const QC& a, const QC& b) { return a.re == b.re && a.im == b.im; }
};

[[nodiscard]] QC qpow(const QC& a, int n);

// Chart components at a point: L_zz, L_zw, L_ww and lambda_z, lambda_w.
template <class C>
struct SphereRestrictionT {
    C Lzz, Lzw, Lww, lz, lw;
};
using SphereRestriction = SphereRestrictionT<cplx>;
using SphereRestrictionQ = SphereRestrictionT<QC>;

[[nodiscard]] cplx stereographic(const Vec3& x);
[[nodiscard]] Vec3 stereographic_inverse(cplx z);

// L(v,w) = Lhat(v,w), lambda(v) = -Lhat(v,x) for tangent v, w.
[[nodiscard]] SphereRestriction restrict_to_sphere(const Sym3& L, const Vec3& x);
[[nodiscard]] SphereRestrictionQ restrict_to_sphere(const Sym3Q& L, const QC& z);

// K = L - (tr L) g in chart components (K_zz, K_zw).
struct KillingComponents {
    cplx kzz;
    cplx kzw;
};
[[nodiscard]] KillingComponents special_to_killing(const SphereRestriction& r, cplx z);

// Finite-difference residuals at chart point z (step h, one Richardson step)
// of L_{ij,k} = lambda_i g_jk + lambda_j g_ik and of the Killing equation for
// K = L - (tr L) g.
[[nodiscard]] double sinyukov_residual(const Sym3& L, cplx z, double h = 1e-3);
[[nodiscard]] double killing_residual(const Sym3& L, cplx z, double h = 1e-3);

// p = l1 ^ l2 with l = (lambda_w, L_ww, L_wz, L_zz, lambda_z) indexed -2..2.
template <class C>
struct PluckerPointT {
    std::array<std::array<C, 5>, 5> m{};

    [[nodiscard]] const C& operator()(int i, int j) const { return m[i + 2][j + 2]; }
};
using PluckerPoint = PluckerPointT<cplx>;
using PluckerPointQ = PluckerPointT<QC>;

template <class C>
[[nodiscard]] std::array<C, 5> l_vector(const SphereRestrictionT<C>& r)
{
    return {r.lw, r.Lww, r.Lzw, r.Lzz, r.lz};
}

template <class C>
[[nodiscard]] PluckerPointT<C> wedge(const std::array<C, 5>& a, const std::array<C, 5>& b)
{
    PluckerPointT<C> p;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) p.m[i][j] = a[i] * b[j] - b[i] * a[j];
    return p;
}

[[nodiscard]] PluckerPoint plucker(const Sym3& L1, const Sym3& L2, const Vec3& x);
[[nodiscard]] PluckerPointQ plucker(const Sym3Q& L1, const Sym3Q& L2, const QC& z);

// The five quadratic relations p_ij p_kl - p_ik p_jl + p_il p_jk.
[[nodiscard]] double plucker_relations_max(const PluckerPoint& p);
[[nodiscard]] bool plucker_relations_exact(const PluckerPointQ& p);

// Symbolic restriction on the stereographic chart, as fields of z and zbar.
[[nodiscard]] SphereRestrictionT<Field> restriction_fields(const Sym3& L);

// Structure functions read off from the Plücker coordinates:
//   t_z = (3/4) phi^2 p_{-2,1} / p_{1,-1},  s = (3/4) phi^2 p_{1,2} / p_{1,-1}.
[[nodiscard]] StructureFunctions sphere_structure(const Sym3& L1, const Sym3& L2, Domain domain = {},
                                                  ChartPoint base = {});

struct SphereValues {
    cplx tz;
    cplx s;
    cplx xi;
};
[[nodiscard]] SphereValues sphere_structure_functions(const Sym3& L1, const Sym3& L2, cplx z);

// Remn with R = 2 on the sphere chart: F = E + 2 phi^2 t_z.
[[nodiscard]] cplx sphere_constraint_component(const Sym3& L1, const Sym3& L2, cplx z);
// Pointwise norm of the covector F/phi^2 dz + c.c., which is rotation invariant.
[[nodiscard]] double sphere_constraint_residual(const Sym3& L1, const Sym3& L2, cplx z);

// Exact path: F evaluated in Gaussian rationals, then multiplied by
// p_{1,-1}^clear_p_power (1+|z|^2)^clear_q_power. These are the smallest
// exponents that leave a polynomial in (z, zbar), found by exact finite
// differences along rational lines; the result has total degree 10.
inline constexpr int clear_p_power = 3;
inline constexpr int clear_q_power = 20;
[[nodiscard]] QC sphere_constraint_exact(const Sym3Q& L1, const Sym3Q& L2, const QC& z);
[[nodiscard]] QC cleared_polynomial(const Sym3Q& L1, const Sym3Q& L2, const QC& z);
// Same quantity in floating point, for the dual-path check.
[[nodiscard]] cplx cleared_polynomial_float(const Sym3& L1, const Sym3& L2, cplx z);

[[nodiscard]] Sym3 to_double(const Sym3Q& L);
[[nodiscard]] Sym3 rotate(const Sym3& L, const std::array<Vec3, 3>& Q);

}  // namespace superint

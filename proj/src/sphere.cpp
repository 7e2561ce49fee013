#include "superint/sphere.hpp"

#include <cmath>

namespace superint {

QC operator/(const QC& a, const QC& b)
{
    mpq_class d = b.re * b.re + b.im * b.im;
    if (d == 0) throw DomainError("division by zero", "exact rational");
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

QC qpow(const QC& a, int n)
{
    if (n < 0) return QC(1) / qpow(a, -n);
    QC r(1);
    for (int k = 0; k < n; ++k) r = r * a;
    return r;
}

std::string QC::str() const
{
    if (im == 0) return re.get_str();
    return re.get_str() + (im < 0 ? " - " : " + ") + mpq_class(abs(im)).get_str() + "*i";
}

cplx stereographic(const Vec3& x)
{
    if (std::abs(1.0 - x[2]) < 1e-12) throw NorthPole();
    return cplx(x[0], x[1]) / (1.0 - x[2]);
}

Vec3 stereographic_inverse(cplx z)
{
    double n = std::norm(z);
    return {2.0 * z.real() / (1.0 + n), 2.0 * z.imag() / (1.0 + n), (n - 1.0) / (1.0 + n)};
}

namespace {

// Position and chart derivatives of the embedding at z, w = conj(z).
template <class C>
struct Frame {
    std::array<C, 3> x, xz, xw, xzw, xww;
    C q;
};

template <class C>
Frame<C> frame(const C& z, const C& w, const C& one, const C& i)
{
    Frame<C> f;
    C q = one + z * w;
    C q2 = q * q;
    C q3 = q2 * q;
    f.q = q;
    f.x = {(z + w) / q, -(i * (z - w)) / q, (z * w - one) / q};
    std::array<C, 3> M = {one - w * w, -(i * (one + w * w)), (one + one) * w};
    std::array<C, 3> N = {one - z * z, i * (one + z * z), (one + one) * z};
    std::array<C, 3> dM = {-((one + one) * w), -((one + one) * i * w), one + one};
    for (int k = 0; k < 3; ++k) {
        f.xz[k] = M[k] / q2;
        f.xw[k] = N[k] / q2;
        f.xzw[k] = dM[k] / q2 - (one + one) * z * M[k] / q3;
        f.xww[k] = -((one + one) * z * N[k]) / q3;
    }
    return f;
}

template <class C, class S>
C bil(const S& L, const std::array<C, 3>& a, const std::array<C, 3>& b)
{
    C r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r = r + C(L(i, j)) * a[i] * b[j];
    return r;
}

template <class C, class S>
SphereRestrictionT<C> restrict_frame(const S& L, const Frame<C>& f)
{
    return {bil<C>(L, f.xz, f.xz), bil<C>(L, f.xz, f.xw), bil<C>(L, f.xw, f.xw), -bil<C>(L, f.xz, f.x),
            -bil<C>(L, f.xw, f.x)};
}

// zbar-derivatives of the restricted components.
template <class C, class S>
SphereRestrictionT<C> restrict_frame_dw(const S& L, const Frame<C>& f)
{
    C two = C(1) + C(1);
    return {two * bil<C>(L, f.xzw, f.xz), bil<C>(L, f.xzw, f.xw) + bil<C>(L, f.xz, f.xww),
            two * bil<C>(L, f.xww, f.xw), -(bil<C>(L, f.xzw, f.x) + bil<C>(L, f.xz, f.xw)),
            -(bil<C>(L, f.xww, f.x) + bil<C>(L, f.xw, f.xw))};
}

std::array<Field, 3> embedding_fields()
{
    Field z = Field::z();
    Field w = Field::zbar();
    Field q = Field(1.0) + z * w;
    return {(z + w) / q, -Field::i() * (z - w) / q, (z * w - Field(1.0)) / q};
}

Field bil_f(const Sym3& L, const std::array<Field, 3>& a, const std::array<Field, 3>& b)
{
    Field r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (L(i, j) != 0.0) r += Field(L(i, j)) * a[i] * b[j];
        }
    return r;
}

}  // namespace

SphereRestriction restrict_to_sphere(const Sym3& L, const Vec3& x)
{
    double n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (std::abs(n - 1.0) > 1e-12) throw std::invalid_argument("point is not on the unit sphere");
    cplx z = stereographic(x);
    auto f = frame<cplx>(z, std::conj(z), cplx(1.0), cplx(0.0, 1.0));
    return restrict_frame<cplx>(L, f);
}

SphereRestrictionQ restrict_to_sphere(const Sym3Q& L, const QC& z)
{
    auto f = frame<QC>(z, z.conj(), QC(1), QC(0, 1));
    return restrict_frame<QC>(L, f);
}

KillingComponents special_to_killing(const SphereRestriction& r, cplx /*z*/)
{
    // tr L = (4/phi^2) L_zw and g_zw = phi^2/2, so K_zw = L_zw - 2 L_zw.
    return {r.Lzz, -r.Lzw};
}

double sinyukov_residual(const Sym3& L, cplx z, double h)
{
    auto r = restriction_fields(L);
    ChartPoint p = ChartPoint::from_z(z);
    cplx w = std::conj(z);
    double q = 1.0 + std::norm(z);
    double e2f = 4.0 / (q * q);
    cplx G = -2.0 * w / q;
    auto dz = [&](const Field& f) { return fd_probe_richardson(f, p, Var::z, h); };
    auto dw = [&](const Field& f) { return fd_probe_richardson(f, p, Var::zbar, h); };
    cplx Lzz = r.Lzz.eval(p), Lzw = r.Lzw.eval(p), Lww = r.Lww.eval(p);
    cplx lz = r.lz.eval(p), lw = r.lw.eval(p);
    double m = 0.0;
    for (cplx v : {dz(r.Lzz) - 2.0 * G * Lzz, dw(r.Lzz) - e2f * lz, dz(r.Lzw) - G * Lzw - 0.5 * e2f * lz,
                   dw(r.Lzw) - std::conj(G) * Lzw - 0.5 * e2f * lw, dw(r.Lww) - 2.0 * std::conj(G) * Lww,
                   dz(r.Lww) - e2f * lw})
        m = std::max(m, std::abs(v));
    return m;
}

double killing_residual(const Sym3& L, cplx z, double h)
{
    auto r = restriction_fields(L);
    Field kzz = r.Lzz, kzw = -r.Lzw, kww = r.Lww;
    ChartPoint p = ChartPoint::from_z(z);
    cplx w = std::conj(z);
    cplx G = -2.0 * w / (1.0 + std::norm(z));
    auto dz = [&](const Field& f) { return fd_probe_richardson(f, p, Var::z, h); };
    auto dw = [&](const Field& f) { return fd_probe_richardson(f, p, Var::zbar, h); };
    cplx Kzz = kzz.eval(p), Kzw = kzw.eval(p), Kww = kww.eval(p);
    double m = 0.0;
    for (cplx v : {dz(kzz) - 2.0 * G * Kzz, dw(kzz) + 2.0 * (dz(kzw) - G * Kzw),
                   dw(kww) - 2.0 * std::conj(G) * Kww, dz(kww) + 2.0 * (dw(kzw) - std::conj(G) * Kzw)})
        m = std::max(m, std::abs(v));
    return m;
}

PluckerPoint plucker(const Sym3& L1, const Sym3& L2, const Vec3& x)
{
    return wedge(l_vector(restrict_to_sphere(L1, x)), l_vector(restrict_to_sphere(L2, x)));
}

PluckerPointQ plucker(const Sym3Q& L1, const Sym3Q& L2, const QC& z)
{
    return wedge(l_vector(restrict_to_sphere(L1, z)), l_vector(restrict_to_sphere(L2, z)));
}

namespace {

template <class C, class F>
void for_relations(const PluckerPointT<C>& p, F&& fn)
{
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            for (int k = j + 1; k < 5; ++k)
                for (int l = k + 1; l < 5; ++l)
                    fn(p.m[i][j] * p.m[k][l] - p.m[i][k] * p.m[j][l] + p.m[i][l] * p.m[j][k]);
}

}  // namespace

double plucker_relations_max(const PluckerPoint& p)
{
    double r = 0.0;
    for_relations(p, [&](const cplx& v) { r = std::max(r, std::abs(v)); });
    return r;
}

bool plucker_relations_exact(const PluckerPointQ& p)
{
    bool ok = true;
    for_relations(p, [&](const QC& v) { ok = ok && v.is_zero(); });
    return ok;
}

SphereRestrictionT<Field> restriction_fields(const Sym3& L)
{
    auto x = embedding_fields();
    std::array<Field, 3> xz, xw;
    for (int k = 0; k < 3; ++k) {
        xz[k] = x[k].dz();
        xw[k] = x[k].dzbar();
    }
    return {bil_f(L, xz, xz), bil_f(L, xz, xw), bil_f(L, xw, xw), -bil_f(L, xz, x), -bil_f(L, xw, x)};
}

StructureFunctions sphere_structure(const Sym3& L1, const Sym3& L2, Domain domain, ChartPoint base)
{
    auto a = restriction_fields(L1);
    auto b = restriction_fields(L2);
    Field p12 = a.Lzz * b.lz - b.Lzz * a.lz;
    Field pm21 = b.Lzz * a.lw - a.Lzz * b.lw;
    Field p1m1 = a.Lzz * b.Lww - b.Lzz * a.Lww;
    if (p1m1.is_zero()) throw SingularDenominator();
    ConformalChart chart = ConformalChart::sphere(domain);
    Field pre = Field(0.75) * sq(chart.phi()) / p1m1;
    return make_structure_tz(chart, pre * p12, pre * pm21, base);
}

SphereValues sphere_structure_functions(const Sym3& L1, const Sym3& L2, cplx z)
{
    auto sf = sphere_structure(L1, L2);
    ChartPoint p = ChartPoint::from_z(z);
    try {
        return {sf.tz.eval(p), sf.s.eval(p), xi_from(sf).eval(p)};
    } catch (const DomainError&) {
        throw SingularDenominator();
    }
}

namespace {

Field sphere_remn_field(const StructureFunctions& sf)
{
    Field s = sf.s, sb = sf.sbar(), T = sf.tz, Tb = sf.tzbar();
    Field xi = xi_from(sf);
    Field xib = xi.conj();
    Field e2f = sq(sf.chart.phi());
    return Field(80.0 / 9.0) * s * sb * T + Field(16.0 / 9.0) * s * sq(Tb) - Field(4.0) * s * xib +
           Field(4.0 / 3.0) * xi * Tb + Field(2.0) * e2f * T;
}

}  // namespace

cplx sphere_constraint_component(const Sym3& L1, const Sym3& L2, cplx z)
{
    auto sf = sphere_structure(L1, L2);
    try {
        return sphere_remn_field(sf).eval(ChartPoint::from_z(z));
    } catch (const DomainError&) {
        throw SingularDenominator();
    }
}

double sphere_constraint_residual(const Sym3& L1, const Sym3& L2, cplx z)
{
    double phi = 2.0 / (1.0 + std::norm(z));
    return 2.0 * std::abs(sphere_constraint_component(L1, L2, z)) / (phi * phi * phi);
}

QC sphere_constraint_exact(const Sym3Q& L1, const Sym3Q& L2, const QC& z)
{
    QC one(1);
    auto f = frame<QC>(z, z.conj(), one, QC(0, 1));
    auto a = restrict_frame<QC>(L1, f);
    auto b = restrict_frame<QC>(L2, f);
    auto da = restrict_frame_dw<QC>(L1, f);
    auto db = restrict_frame_dw<QC>(L2, f);

    QC p12 = a.Lzz * b.lz - b.Lzz * a.lz;
    QC dp12 = da.Lzz * b.lz + a.Lzz * db.lz - db.Lzz * a.lz - b.Lzz * da.lz;
    QC pm21 = b.Lzz * a.lw - a.Lzz * b.lw;
    QC p = a.Lzz * b.Lww - b.Lzz * a.Lww;
    QC dp = da.Lzz * b.Lww + a.Lzz * db.Lww - db.Lzz * a.Lww - b.Lzz * da.Lww;
    if (p.is_zero()) throw SingularDenominator();

    QC e2f = QC(4) / (f.q * f.q);
    QC fw = -(z / f.q);  // d_zbar log phi
    QC c34(mpq_class(3, 4));
    QC s = c34 * e2f * p12 / p;
    QC ds = c34 * e2f * ((QC(2) * fw * p12 + dp12) / p - p12 * dp / (p * p));
    QC T = c34 * e2f * pm21 / p;
    QC Tb = T.conj();
    QC sb = s.conj();
    QC xi = QC(2) * ds + QC(4) * s * fw + QC(mpq_class(4, 3)) * s * Tb;
    QC xib = xi.conj();
    return QC(mpq_class(80, 9)) * s * sb * T + QC(mpq_class(16, 9)) * s * Tb * Tb - QC(4) * s * xib +
           QC(mpq_class(4, 3)) * xi * Tb + QC(2) * e2f * T;
}

QC cleared_polynomial(const Sym3Q& L1, const Sym3Q& L2, const QC& z)
{
    auto a = restrict_to_sphere(L1, z);
    auto b = restrict_to_sphere(L2, z);
    QC p = a.Lzz * b.Lww - b.Lzz * a.Lww;
    QC q = QC(1) + z * z.conj();
    return sphere_constraint_exact(L1, L2, z) * qpow(p, clear_p_power) * qpow(q, clear_q_power);
}

cplx cleared_polynomial_float(const Sym3& L1, const Sym3& L2, cplx z)
{
    auto r1 = restrict_to_sphere(L1, stereographic_inverse(z));
    auto r2 = restrict_to_sphere(L2, stereographic_inverse(z));
    cplx p = r1.Lzz * r2.Lww - r2.Lzz * r1.Lww;
    double q = 1.0 + std::norm(z);
    return sphere_constraint_component(L1, L2, z) * std::pow(p, clear_p_power) * std::pow(q, clear_q_power);
}

Sym3 to_double(const Sym3Q& L)
{
    Sym3 r;
    for (int k = 0; k < 6; ++k) r.e[k] = L.e[k].get_d();
    return r;
}

Sym3 rotate(const Sym3& L, const std::array<Vec3, 3>& Q)
{
    double m[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) v += Q[i][a] * L(a, b) * Q[j][b];
            m[i][j] = v;
        }
    return {{m[0][0], 0.5 * (m[0][1] + m[1][0]), 0.5 * (m[0][2] + m[2][0]), m[1][1], 0.5 * (m[1][2] + m[2][1]),
             m[2][2]}};
}

}  // namespace superint

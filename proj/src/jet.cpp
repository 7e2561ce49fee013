#include "superint/jet.hpp"

namespace superint {

JetPoly::JetPoly(cplx c)
{
    add({}, c);
}

JetPoly JetPoly::var(Var v)
{
    JetPoly p;
    Monomial m{};
    m[v] = 1;
    p.add(m, 1.0);
    return p;
}

void JetPoly::add(const Monomial& m, cplx c)
{
    if (c == 0.0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

JetPoly operator+(const JetPoly& a, const JetPoly& b)
{
    JetPoly r = a;
    for (const auto& [m, c] : b.terms_) r.add(m, c);
    return r;
}

JetPoly operator-(const JetPoly& a, const JetPoly& b)
{
    JetPoly r = a;
    for (const auto& [m, c] : b.terms_) r.add(m, -c);
    return r;
}

JetPoly operator*(const JetPoly& a, const JetPoly& b)
{
    JetPoly r;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) {
            JetPoly::Monomial m;
            for (int k = 0; k < 6; ++k) m[k] = ma[k] + mb[k];
            r.add(m, ca * cb);
        }
    return r;
}

namespace {

using V = JetPoly;

struct Rules {
    std::array<JetPoly, 6> dz, dw;
};

const Rules& rules()
{
    static const Rules r = [] {
        JetPoly s = V::var(V::s), sb = V::var(V::sb), xi = V::var(V::xi), xib = V::var(V::xib);
        JetPoly T = V::var(V::T), Tb = V::var(V::Tb);
        auto c = [](double v) { return JetPoly(cplx(v)); };
        Rules out;
        out.dz[V::s] = c(4.0 / 3.0) * T * s;
        out.dw[V::s] = c(0.5) * xi - c(2.0 / 3.0) * Tb * s;
        out.dz[V::sb] = c(0.5) * xib - c(2.0 / 3.0) * T * sb;
        out.dw[V::sb] = c(4.0 / 3.0) * Tb * sb;
        out.dz[V::xi] = c(16.0 / 3.0) * s * s * sb + c(4.0 / 3.0) * xi * T;
        out.dw[V::xi] = c(8.0 / 3.0) * s * xib;
        out.dz[V::xib] = c(8.0 / 3.0) * sb * xi;
        out.dw[V::xib] = c(16.0 / 3.0) * sb * sb * s + c(4.0 / 3.0) * xib * Tb;
        out.dz[V::T] = c(4.0 / 3.0) * T * T + c(2.0) * s * Tb - c(0.5) * xi;
        out.dw[V::T] = c(4.0 / 3.0) * s * sb;
        out.dz[V::Tb] = c(4.0 / 3.0) * s * sb;
        out.dw[V::Tb] = c(4.0 / 3.0) * Tb * Tb + c(2.0) * sb * T - c(0.5) * xib;
        return out;
    }();
    return r;
}

JetPoly derive(const std::map<JetPoly::Monomial, cplx>& terms, const std::array<JetPoly, 6>& rule)
{
    JetPoly r;
    for (const auto& [m, c] : terms)
        for (int k = 0; k < 6; ++k) {
            if (m[k] == 0) continue;
            JetPoly::Monomial rest = m;
            rest[k] -= 1;
            JetPoly mono(c * double(m[k]));
            for (int j = 0; j < 6; ++j)
                for (int e = 0; e < rest[j]; ++e) mono = mono * V::var(static_cast<V::Var>(j));
            r = r + mono * rule[k];
        }
    return r;
}

}  // namespace

JetPoly JetPoly::Dz() const
{
    return derive(terms_, rules().dz);
}

JetPoly JetPoly::Dzbar() const
{
    return derive(terms_, rules().dw);
}

cplx JetPoly::eval(const Values& v) const
{
    const std::array<cplx, 6> x = {v.s, std::conj(v.s), v.xi, std::conj(v.xi), v.T, std::conj(v.T)};
    cplx r = 0.0;
    for (const auto& [m, c] : terms_) {
        cplx t = c;
        for (int k = 0; k < 6; ++k)
            for (int e = 0; e < m[k]; ++e) t *= x[k];
        r += t;
    }
    return r;
}

JetPoly remn_jet()
{
    JetPoly s = JetPoly::var(JetPoly::s), sb = JetPoly::var(JetPoly::sb), xi = JetPoly::var(JetPoly::xi), xib = JetPoly::var(JetPoly::xib);
    JetPoly T = JetPoly::var(JetPoly::T), Tb = JetPoly::var(JetPoly::Tb);
    auto c = [](double v) { return JetPoly(cplx(v)); };
    return c(80.0 / 9.0) * s * sb * T + c(16.0 / 9.0) * s * Tb * Tb - c(4.0) * s * xib + c(4.0 / 3.0) * xi * Tb;
}

JetPoly d_jet(int a, int b)
{
    JetPoly P(1.0);
    JetPoly T = JetPoly::var(JetPoly::T), Tb = JetPoly::var(JetPoly::Tb);
    for (int k = 0; k < a; ++k) P = P.Dz() - JetPoly(4.0 / 3.0) * T * P;
    for (int k = 0; k < b; ++k) P = P.Dzbar() - JetPoly(4.0 / 3.0) * Tb * P;
    return P;
}

}  // namespace superint

#include "superint/integrability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace superint {

namespace {

Field c(double v) { return Field(v); }

Component comp(std::initializer_list<Field> ts) { return Component{std::vector<Field>(ts)}; }

struct Ctx {
    Field s, sb, T, Tb, xi, xib, f, fz, fw, e2f, R, Rz;

    explicit Ctx(const StructureFunctions& sf)
        : s(sf.s), sb(sf.sbar()), T(sf.tz), Tb(sf.tzbar()), xi(xi_from(sf)), xib(xi.conj()), f(sf.chart.log_phi()),
          fz(f.dz()), fw(f.dzbar()), e2f(sq(sf.chart.phi())), R(sf.chart.scalar_curvature()), Rz(R.dz())
    {
    }

    [[nodiscard]] Field tzz() const { return T.dz() - c(2.0) * fz * T; }
};

Equation delta_t(const Ctx& k, const std::string& name)
{
    return {name, {comp({k.T.dzbar(), -c(4.0 / 3.0) * k.s * k.sb, -c(3.0 / 8.0) * k.e2f * k.R})}};
}

Equation ds(const Ctx& k, const std::string& name)
{
    return {name, {comp({k.s.dz(), -c(4.0) * (k.T * c(1.0 / 3.0) + k.fz) * k.s})}};
}

Equation dxi(const Ctx& k, const std::string& name)
{
    return {name,
            {comp({k.xi.dz(), -c(16.0 / 3.0) * sq(k.s) * k.sb, -c(4.0 / 3.0) * k.xi * k.T, -c(4.0) * k.fz * k.xi}),
             comp({k.xi.dzbar(), -c(8.0 / 3.0) * k.s * k.xib})}};
}

}  // namespace

double ResidualReport::max_abs() const
{
    double m = 0.0;
    for (const auto& [_, e] : entries) m = std::max(m, e.max_abs);
    return m;
}

std::vector<std::string> ResidualReport::failing(double tol) const
{
    std::vector<std::string> out;
    for (const auto& [name, e] : entries) {
        if (!(e.max_abs < tol)) out.push_back(name);
    }
    return out;
}

void ResidualReport::merge(const ResidualReport& other)
{
    for (const auto& [name, e] : other.entries) entries[name] = e;
}

ResidualReport evaluate(const std::vector<Equation>& eqs, const std::vector<ChartPoint>& pts, const ResidualOptions& opt)
{
    ResidualReport rep;
    for (const auto& eq : eqs) {
        std::vector<Field> flat;
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        for (const auto& k : eq.components) {
            spans.emplace_back(flat.size(), k.terms.size());
            flat.insert(flat.end(), k.terms.begin(), k.terms.end());
        }
        FieldBatch batch(flat);
        ResidualEntry e;
        for (const auto& p : pts) {
            std::vector<cplx> v;
            try {
                v = batch.eval(p);
            } catch (const DomainError&) {
                ++e.excluded;
                continue;
            }
            if (++e.samples == 1) e.argmax = p;
            for (auto [start, n] : spans) {
                cplx r = 0.0;
                double scale = 0.0;
                for (std::size_t i = start; i < start + n; ++i) {
                    r += v[i];
                    scale = std::max(scale, std::abs(v[i]));
                }
                double a = std::abs(r);
                if (opt.relative) a /= 1.0 + scale;
                if (a > e.max_abs) {
                    e.max_abs = a;
                    e.argmax = p;
                }
            }
        }
        std::size_t total = static_cast<std::size_t>(e.samples + e.excluded);
        if (total > 0 && static_cast<double>(e.excluded) > opt.max_excluded_fraction * static_cast<double>(total)) {
            throw DomainError("too many singular grid points (" + std::to_string(e.excluded) + " of " +
                                  std::to_string(total) + ")",
                              eq.name);
        }
        rep.entries[eq.name] = e;
    }
    return rep;
}

ResidualReport evaluate(const std::vector<Equation>& eqs, const Domain& d, const ResidualOptions& opt)
{
    return evaluate(eqs, d.grid(), opt);
}

std::vector<Equation> conformal_equations(const StructureFunctions& sf)
{
    Ctx k(sf);
    Field tau = tau_from(sf);
    Field taub = tau.conj();
    Field gamma = c(2.0) * k.fz;
    Field S = k.e2f * k.s;
    std::vector<Equation> eqs;
    eqs.push_back(ds(k, "DS"));
    eqs.push_back(dxi(k, "DXi"));
    eqs.push_back({"divTau",
                   {comp({tau.dzbar(), c(2.0) * k.s * taub, -c(2.0) * k.s * k.xib, c(2.0 / 3.0) * k.xi * k.Tb,
                          c(8.0 / 9.0) * k.s * sq(k.Tb), c(40.0 / 9.0) * k.s * k.sb * k.T,
                          -k.e2f * (c(0.25) * k.Rz - c(0.5) * k.R * k.T)})}});
    Equation ddt{"DDt",
                 {comp({k.tzz(), -c(1.5) * tau, -c(4.0 / 3.0) * sq(k.T), -c(2.0) * k.s * k.Tb, c(0.5) * k.xi})}};
    ddt.components.push_back(delta_t(k, "").components.front());
    eqs.push_back(ddt);
    eqs.push_back(delta_t(k, "Delta-t"));
    eqs.push_back({"DS-sym", {comp({S.dz(), -c(3.0) * gamma * S, -c(4.0 / 3.0) * S * k.T})}});
    return eqs;
}

bool is_standard_gauge(const StructureFunctions& sf, double tol)
{
    if (sf.tz.is_zero()) return true;
    for (const auto& p : sf.chart.domain().grid()) {
        try {
            if (std::abs(sf.tz.eval(p)) > tol) return false;
        } catch (const DomainError&) {
        }
    }
    return true;
}

std::vector<Equation> standard_equations(const StructureFunctions& sf)
{
    if (!is_standard_gauge(sf)) throw GaugeMismatch("standard-gauge registry needs t_z == 0");
    Ctx k(sf);
    Field tau = tau_from(sf);
    std::vector<Equation> eqs;
    eqs.push_back({"std:DS", {comp({k.s.dz(), -c(4.0) * k.fz * k.s})}});
    eqs.push_back({"std:DXi",
                   {comp({k.xi.dz(), -c(16.0 / 3.0) * sq(k.s) * k.sb, -c(4.0) * k.fz * k.xi}),
                    comp({k.xi.dzbar(), -c(8.0 / 3.0) * k.s * k.xib})}});
    eqs.push_back({"std:Delta-t", {comp({k.R, c(2.0 / 9.0) * norm2_S(sf)})}});
    // Printed with -1/3; the Ricci-identity formula gives +1/3 (see docs).
    eqs.push_back({"std:tau", {comp({tau, -c(1.0 / 3.0) * k.xi})}});
    return eqs;
}

std::vector<Equation> flat_equations(const StructureFunctions& sf)
{
    if (!sf.chart.is_flat()) throw GaugeMismatch("flat-gauge registry needs phi == 1");
    Ctx k(sf);
    Field tau = tau_from(sf);
    Field taub = tau.conj();
    std::vector<Equation> eqs;
    eqs.push_back({"flat:Sz", {comp({k.s.dz(), -c(4.0 / 3.0) * k.T * k.s})}});
    eqs.push_back({"flat:Sw", {comp({k.s.dzbar(), -c(0.5) * k.xi, c(2.0 / 3.0) * k.Tb * k.s})}});
    eqs.push_back({"flat:Xiz", {comp({k.xi.dz(), -c(16.0 / 3.0) * sq(k.s) * k.sb, -c(4.0 / 3.0) * k.xi * k.T})}});
    eqs.push_back({"flat:Xiw", {comp({k.xi.dzbar(), -c(8.0 / 3.0) * k.s * k.xib})}});
    eqs.push_back({"flat:hess-t",
                   {comp({k.T.dz(), -c(4.0 / 3.0) * sq(k.T), -c(2.0) * k.Tb * k.s, -c(0.5) * (c(3.0) * tau - k.xi)})}});
    eqs.push_back({"flat:Delta-t", {comp({k.T.dzbar(), -c(4.0 / 3.0) * k.s * k.sb})}});
    eqs.push_back({"flat:aleph-w",
                   {comp({tau.dzbar(), c(40.0 / 9.0) * k.s * k.sb * k.T, c(8.0 / 9.0) * k.s * sq(k.Tb),
                          c(2.0 / 3.0) * k.xi * k.Tb, -c(2.0) * k.s * (k.xib - taub)})}});
    return eqs;
}

Field remn_component(const StructureFunctions& sf)
{
    Ctx k(sf);
    return c(80.0 / 9.0) * k.s * k.sb * k.T + c(16.0 / 9.0) * k.s * sq(k.Tb) - c(4.0) * k.s * k.xib +
           c(4.0 / 3.0) * k.xi * k.Tb - c(0.5) * k.e2f * k.Rz + k.R * k.e2f * k.T;
}

std::pair<Field, Field> dremn_components(const StructureFunctions& sf)
{
    Ctx k(sf);
    const Field &s = k.s, &sb = k.sb, &T = k.T, &Tb = k.Tb, &xi = k.xi, &xib = k.xib, &e2f = k.e2f, &R = k.R;
    // Partial derivatives of F with respect to its arguments.
    Field F_s = c(80.0 / 9.0) * sb * T + c(16.0 / 9.0) * sq(Tb) - c(4.0) * xib;
    Field F_sb = c(80.0 / 9.0) * s * T;
    Field F_T = c(80.0 / 9.0) * s * sb + R * e2f;
    Field F_Tb = c(32.0 / 9.0) * s * Tb + c(4.0 / 3.0) * xi;
    Field F_xi = c(4.0 / 3.0) * Tb;
    Field F_xib = -c(4.0) * s;
    Field F_e2f = -c(0.5) * k.Rz + R * T;
    Field F_R = e2f * T;
    Field F_Rz = -c(0.5) * e2f;

    auto total = [&](const Field& ds_, const Field& dsb, const Field& dxi_, const Field& dxib, const Field& dT,
                     const Field& dTb, const Field& de2f, const Field& dR, const Field& dRz) {
        return F_s * ds_ + F_sb * dsb + F_xi * dxi_ + F_xib * dxib + F_T * dT + F_Tb * dTb + F_e2f * de2f +
               F_R * dR + F_Rz * dRz;
    };
    const Field& fw = k.fw;
    const Field& fz = k.fz;
    Field w = total(c(0.5) * xi - c(2.0) * fw * s - c(2.0 / 3.0) * Tb * s,
                    c(4.0) * (Tb * c(1.0 / 3.0) + fw) * sb,
                    c(8.0 / 3.0) * s * xib,
                    c(16.0 / 3.0) * sq(sb) * s + c(4.0 / 3.0) * xib * Tb + c(4.0) * fw * xib,
                    c(4.0 / 3.0) * s * sb + c(3.0 / 8.0) * e2f * R,
                    c(2.0) * fw * Tb + c(4.0 / 3.0) * sq(Tb) + c(2.0) * sb * T - c(0.5) * xib,
                    c(2.0) * fw * e2f, R.dzbar(), k.Rz.dzbar());
    Field z = total(c(4.0) * (T * c(1.0 / 3.0) + fz) * s,
                    c(0.5) * xib - c(2.0) * fz * sb - c(2.0 / 3.0) * T * sb,
                    c(16.0 / 3.0) * sq(s) * sb + c(4.0 / 3.0) * xi * T + c(4.0) * fz * xi,
                    c(8.0 / 3.0) * sb * xi,
                    c(2.0) * fz * T + c(4.0 / 3.0) * sq(T) + c(2.0) * s * Tb - c(0.5) * xi,
                    c(4.0 / 3.0) * s * sb + c(3.0 / 8.0) * e2f * R,
                    c(2.0) * fz * e2f, k.Rz, k.Rz.dz());
    return {w, z};
}

std::vector<Equation> proper_equations(const StructureFunctions& sf)
{
    Ctx k(sf);
    std::vector<Equation> eqs;
    eqs.push_back(delta_t(k, "P:Delta-t"));
    eqs.push_back({"P:Hess-t",
                   {comp({k.tzz(), -c(4.0 / 3.0) * sq(k.T), -c(2.0) * k.s * k.Tb, c(0.5) * k.xi})}});
    eqs.push_back(ds(k, "P:DS"));
    eqs.push_back(dxi(k, "P:DXi"));
    eqs.push_back({"P:Remn",
                   {comp({c(80.0 / 9.0) * k.s * k.sb * k.T, c(16.0 / 9.0) * k.s * sq(k.Tb), -c(4.0) * k.s * k.xib,
                          c(4.0 / 3.0) * k.xi * k.Tb, -c(0.5) * k.e2f * k.Rz, k.R * k.e2f * k.T})}});
    auto [w, z] = dremn_components(sf);
    eqs.push_back({"P:DRemn", {comp({w}), comp({z})}});
    return eqs;
}

ResidualReport conformal_residuals(const StructureFunctions& sf, const ResidualOptions& opt)
{
    return evaluate(conformal_equations(sf), sf.chart.domain(), opt);
}

ResidualReport standard_residuals(const StructureFunctions& sf, const ResidualOptions& opt)
{
    return evaluate(standard_equations(sf), sf.chart.domain(), opt);
}

ResidualReport flat_residuals(const StructureFunctions& sf, const ResidualOptions& opt)
{
    return evaluate(flat_equations(sf), sf.chart.domain(), opt);
}

ResidualReport proper_residuals(const StructureFunctions& sf, const ResidualOptions& opt, double gate_tol)
{
    Field tau = tau_from(sf);
    if (!tau.is_zero()) {
        auto gate = evaluate({Equation{"tau", {comp({tau})}}}, sf.chart.domain());
        double m = gate.entries.at("tau").max_abs;
        if (!(m < gate_tol)) throw NotProper("tau does not vanish; not a proper-gauge system", m);
    }
    return evaluate(proper_equations(sf), sf.chart.domain(), opt);
}

SecondProlongationCoefficients second_prolongation(const StructureFunctions& sf, const Field& tau)
{
    Ctx k(sf);
    Field taub = tau.conj();
    SecondProlongationCoefficients q;
    q.q11 = c(10.0 / 3.0) * k.s * k.sb + c(3.0 / 8.0) * k.e2f * k.R;
    q.q22 = q.q11;
    q.q12 = k.s.dzbar() + c(2.0) * k.fw * k.s + c(2.0) * k.s * k.Tb + c(0.5) * tau;
    q.q21 = q.q12.conj();
    q.gamma1 = k.s * taub + c(0.5) * tau.dzbar();
    q.gamma2 = q.gamma1.conj();
    return q;
}

std::vector<Equation> wilczynski_equations(const StructureFunctions& sf, const Field& V, bool proper)
{
    Ctx k(sf);
    Field tau = proper ? Field(0.0) : tau_from(sf);
    Field taub = tau.conj();
    Hessian h = sf.chart.covariant_hessian(V);
    Field Vz = V.dz();
    Field Vw = V.dzbar();
    auto q = second_prolongation(sf, tau);
    std::vector<Equation> eqs;
    eqs.push_back({"W1", {comp({h.zz, -c(2.0) * k.T * Vz, -c(2.0) * k.s * Vw, -tau * V})}});
    eqs.push_back({"W1c", {comp({h.zbarzbar, -c(2.0) * k.Tb * Vw, -c(2.0) * k.sb * Vz, -taub * V})}});
    eqs.push_back({"W2", {comp({c(0.5) * h.zz.dzbar(), -q.q11 * Vz, -q.q12 * Vw, -q.gamma1 * V, -k.T * h.zzbar})}});
    eqs.push_back(
        {"W2c", {comp({c(0.5) * h.zbarzbar.dz(), -q.q22 * Vw, -q.q21 * Vz, -q.gamma2 * V, -k.Tb * h.zzbar})}});
    return eqs;
}

ResidualReport wilczynski_residual(const StructureFunctions& sf, const Field& V, bool proper,
                                   const ResidualOptions& opt)
{
    return evaluate(wilczynski_equations(sf, V, proper), sf.chart.domain(), opt);
}

Field bertrand_darboux_residual(const ConformalChart& chart, const Field& c1, const Field& c2, const Field& V)
{
    Field e2f = sq(chart.phi());
    Field e4f = sq(e2f);
    Field rho_z = (e4f * c1).dzbar() / e2f;
    Field rho_w = (e4f * c2).dz() / e2f;
    Field wz = c(2.0) * e2f * c1 * V.dzbar() + rho_z * V;
    Field ww = c(2.0) * e2f * c2 * V.dz() + rho_w * V;
    return ww.dz() - wz.dzbar();
}

Field bertrand_darboux_killing(const ConformalChart& chart, const Field& kzz, const Field& kzw, const Field& V)
{
    Field ginv = chart.ginv_zzbar();
    Field wz = ginv * (kzz * V.dzbar() + kzw * V.dz());
    Field ww = ginv * (kzz.conj() * V.dz() + kzw * V.dzbar());
    return ww.dz() - wz.dzbar();
}

// ---------------------------------------------------------------- identities

std::map<std::string, double> tensor_identity_residuals(const IdentitySample& d, double hook_coefficient)
{
    // Complex frame (dz, dzbar); index 0 = z, 1 = zbar.
    using A2 = std::array<std::array<cplx, 2>, 2>;
    using A3 = std::array<A2, 2>;
    const double e2f = d.phi * d.phi;
    A2 g{}, gi{};
    g[0][1] = g[1][0] = e2f / 2.0;
    gi[0][1] = gi[1][0] = 2.0 / e2f;
    A3 S{};
    S[0][0][0] = e2f * d.s;
    S[1][1][1] = e2f * std::conj(d.s);
    A2 Z{};
    Z[0][0] = d.zeta;
    Z[1][1] = std::conj(d.zeta);
    A3 DX{};  // DX[k][i][j] = nabla_k Xi_ij
    DX[0][0][0] = d.dxi_z;
    DX[1][0][0] = d.dxi_zbar;
    DX[1][1][1] = std::conj(d.dxi_z);
    DX[0][1][1] = std::conj(d.dxi_zbar);

    auto raise3 = [&](const A3& t) {
        A3 u{};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int cc = 0; cc < 2; ++cc)
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j)
                            for (int k = 0; k < 2; ++k) u[a][b][cc] += gi[a][i] * gi[b][j] * gi[cc][k] * t[i][j][k];
        return u;
    };
    A3 Su = raise3(S);
    cplx SS = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) SS += Su[i][j][k] * S[i][j][k];
    A2 Zu{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) Zu[a][b] += gi[a][i] * gi[b][j] * Z[i][j];
    cplx ZZ = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) ZZ += Zu[a][b] * Z[a][b];

    std::map<std::string, double> out;
    double r = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    cplx lhs = 0.0;
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b) lhs += S[i][j][a] * gi[a][b] * S[k][l][b];
                    cplx rhs = 0.25 * SS * (g[i][k] * g[j][l] + g[i][l] * g[j][k] - g[i][j] * g[k][l]);
                    r = std::max(r, std::abs(lhs - rhs));
                }
    out["S-identity"] = r;

    r = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            cplx lhs = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) lhs += Z[i][a] * gi[a][b] * Z[b][j];
            r = std::max(r, std::abs(lhs - 0.5 * g[i][j] * ZZ));
        }
    out["Z-identity"] = r;

    r = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    cplx v = g[i][j] * Z[k][l] - g[i][k] * Z[j][l] - g[j][l] * Z[i][k] + g[k][l] * Z[i][j];
                    r = std::max(r, std::abs(v));
                }
    out["gZ-identity"] = r;

    // S_ija Z^a_k against the trace-free symmetrization of S_iab Z^ab g_jk.
    std::array<cplx, 2> SZv{};
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) SZv[i] += S[i][a][b] * Zu[a][b];
    r = 0.0;
    for (int k = 0; k < 2; ++k) {
        A2 sym{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) sym[i][j] = SZv[i] * g[j][k] + SZv[j] * g[i][k];
        cplx tr = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) tr += gi[i][j] * sym[i][j];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                cplx lhs = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) lhs += S[i][j][a] * gi[a][b] * Z[b][k];
                cplx rhs = 0.5 * (sym[i][j] - 0.5 * g[i][j] * tr);
                r = std::max(r, std::abs(lhs - rhs));
            }
    }
    out["SZ-identity"] = r;

    // Antisymmetrize nabla_k Xi_ij in (j,k); Young symmetrizer of the hook
    // (ji | k) applied to g_ik D_j with D_j = nabla^a Xi_aj.
    std::array<cplx, 2> D{};
    for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) D[j] += gi[a][b] * DX[b][a][j];
    auto T = [&](int j, int i, int k) { return g[i][k] * D[j]; };
    auto sym_ji = [&](int j, int i, int k) { return T(j, i, k) + T(i, j, k); };
    r = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                cplx lhs = DX[k][i][j] - DX[j][i][k];
                cplx rhs = sym_ji(j, i, k) - sym_ji(k, i, j);
                r = std::max(r, std::abs(lhs - hook_coefficient * rhs));
            }
    out["hookZ-identity"] = r;
    return out;
}

ResidualReport tensor_identity_check(unsigned seed, int draws)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.3, 3.0);
    auto rc = [&] { return cplx(u(rng), u(rng)); };
    ResidualReport rep;
    for (int n = 0; n < draws; ++n) {
        IdentitySample d{pos(rng), rc(), rc(), rc(), rc()};
        auto res = tensor_identity_residuals(d);
        for (const auto& [name, v] : res) {
            auto& e = rep.entries[name];
            ++e.samples;
            if (v > e.max_abs) e.max_abs = v;
        }
    }
    return rep;
}

}  // namespace superint

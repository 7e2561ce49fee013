#include "superint/flatspace.hpp"

#include "superint/jet.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace superint {

namespace {

double factorial(int n)
{
    double r = 1.0;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

}  // namespace

FlatCorrespondence build_correspondence(const StructureFunctions& sf, double gate_tol)
{
    if (sf.chart.phi() != Field(1.0)) throw NotFlatGauge("correspondence needs phi == 1");
    if (!sf.t) throw std::invalid_argument("correspondence needs t, not only t_z");
    const Domain& d = sf.chart.domain();
    ResidualReport tau = evaluate({Equation{"tau", {Component{{tau_from(sf)}}}}}, d);
    if (tau.max_abs() >= gate_tol) throw NotProper("tau does not vanish; system is not proper", tau.max_abs());

    const Field s = sf.s, sb = sf.sbar(), T = sf.tz, Tb = sf.tzbar();
    const Field xi = xi_from(sf);
    FlatCorrespondence fc;
    fc.D = exp(Field(-4.0 / 3.0) * *sf.t);
    fc.Az = Field(az_factor) * fc.D * s;
    fc.Bw = fc.Az.conj();
    fc.beta = fc.D * s;
    fc.C11 = Field(4.0 / 3.0) * T;
    fc.C12 = Field(4.0 / 3.0) * s;
    fc.C21 = Field(4.0 / 3.0) * sb;
    fc.C22 = Field(4.0 / 3.0) * Tb;
    fc.C122 = Field(2.0 / 3.0) * xi - Field(8.0 / 9.0) * s * Tb;
    fc.C211 = fc.C122.conj();
    fc.domain = d;
    return fc;
}

FlatCorrespondence correspondence_from(const Field& D, const Field& Az, Domain domain)
{
    FlatCorrespondence fc;
    fc.D = D;
    fc.Az = Az;
    fc.Bw = Az.conj();
    fc.beta = Field(1.0 / az_factor) * Az;
    fc.domain = domain;
    return fc;
}

std::vector<Equation> obstruction_equations(const FlatCorrespondence& fc)
{
    auto one = [](const std::string& name, std::vector<Field> terms) {
        return Equation{name, {Component{std::move(terms)}}};
    };
    const Field Dzz = fc.D.wirtinger(Var::z, 2);
    const Field Dww = fc.D.wirtinger(Var::zbar, 2);
    return {
        one("D3z", {fc.D.wirtinger(Var::z, 3)}),
        one("D3w", {fc.D.wirtinger(Var::zbar, 3)}),
        one("D2z2w", {Dzz.wirtinger(Var::zbar, 2)}),
        one("Azz", {fc.Az.dz()}),
        one("Azw-Dzz", {fc.Az.dzbar(), -Dzz}),
        one("Bzw-Dww", {fc.Bw.dz(), -Dww}),
        one("Bww", {fc.Bw.dzbar()}),
    };
}

ResidualReport obstruction_residuals(const FlatCorrespondence& fc, const ResidualOptions& opt)
{
    return evaluate(obstruction_equations(fc), fc.domain, opt);
}

double holomorphy_check(const FlatCorrespondence& fc)
{
    return evaluate({Equation{"beta-z", {Component{{fc.beta.dz()}}}}}, fc.domain).max_abs();
}

Field correspondence_consistency(const FlatCorrespondence& fc, const Field& V)
{
    const Hessian h = ConformalChart::flat(fc.domain).covariant_hessian(V);
    return Field(2.0 / 3.0) * h.zz + fc.D.dz() / fc.D * V.dz() - fc.Az / fc.D * V.dzbar();
}

cplx BiquadraticFit::eval(cplx z) const
{
    const cplx u = z - center;
    const cplx v = std::conj(u);
    cplx r = 0.0, ua = 1.0;
    for (int a = 0; a < 3; ++a, ua *= u) {
        cplx vb = 1.0;
        for (int b = 0; b < 3; ++b, vb *= v) r += coeffs[a][b] * ua * vb;
    }
    return r;
}

BiquadraticFit fit_biquadratic(const std::vector<cplx>& z, const std::vector<double>& values, cplx center)
{
    const auto n = static_cast<Eigen::Index>(z.size());
    Eigen::MatrixXcd A(n, 9);
    Eigen::VectorXcd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx u = z[i] - center;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) A(i, 3 * a + b) = std::pow(u, a) * std::pow(std::conj(u), b);
        y(i) = values[i];
    }
    Eigen::VectorXcd c = A.colPivHouseholderQr().solve(y);
    BiquadraticFit fit;
    fit.center = center;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) fit.coeffs[a][b] = c(3 * a + b);
    for (Eigen::Index i = 0; i < n; ++i) fit.residual = std::max(fit.residual, std::abs(fit.eval(z[i]) - values[i]));
    return fit;
}

StructureFunctions proper_flat_structure(const ProperFlatSeed& seed, Domain domain, ChartPoint base)
{
    const JetPoly::Values v{seed.s, seed.xi, seed.tz};
    const Field u = Field::z() - Field(base.z());
    const Field ub = Field::zbar() - Field(base.zbar());
    Field D = Field(0.0);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            D += Field(d_jet(a, b).eval(v) / (factorial(a) * factorial(b))) * pow(u, a) * pow(ub, b);
    // beta_zbar = (3/4) D_zz, and D_zz depends on zbar only.
    Field beta = Field(seed.s);
    for (int b = 0; b < 3; ++b) beta += Field(0.75 * d_jet(2, b).eval(v) / factorial(b + 1)) * pow(ub, b + 1);
    return make_structure(ConformalChart::flat(domain), beta / D, Field(-0.75) * log(D), base);
}

PropagatedObstructions propagated_obstructions(const ProperFlatSeed& seed, const Domain& grid, ChartPoint base,
                                               const IntegratorOptions& opt)
{
    static const JetPoly J3z = d_jet(3, 0), J3w = d_jet(0, 3), J22 = d_jet(2, 2);
    static const JetPoly E = remn_jet();
    static const JetPoly Ew = E.Dzbar(), Ez = E.Dz();
    const StructureFunctions taylor = proper_flat_structure(seed, grid, base);
    const Field Dt = exp(Field(-4.0 / 3.0) * *taylor.t);

    PropagatedObstructions out;
    std::vector<cplx> zs;
    std::vector<double> Ds;
    for (const ChartPoint& p : grid.grid()) {
        const cplx z = p.z();
        std::vector<cplx> y = {seed.s, seed.xi, seed.tz, 0.0};
        if (z != base.z()) y = integrate_structure_proper_flat(seed, ChartPath::straight(base.z(), z), opt).end();
        const JetPoly::Values v{y[0], y[1], y[2]};
        const double t = y[3].real();
        const double D = std::exp(-4.0 * t / 3.0);
        out.d3z = std::max(out.d3z, std::abs(D * J3z.eval(v)));
        out.d3w = std::max(out.d3w, std::abs(D * J3w.eval(v)));
        out.d2z2w = std::max(out.d2z2w, std::abs(D * J22.eval(v)));
        out.algebraic = std::max({out.algebraic, std::abs(E.eval(v)), std::abs(Ew.eval(v)), std::abs(Ez.eval(v))});
        out.taylor_mismatch = std::max(out.taylor_mismatch, std::abs(Dt.eval(p) - D));
        zs.push_back(z);
        Ds.push_back(D);
        ++out.points;
    }
    out.fit_residual = fit_biquadratic(zs, Ds, base.z()).residual;
    return out;
}

}  // namespace superint

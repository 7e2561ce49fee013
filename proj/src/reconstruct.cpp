#include "superint/reconstruct.hpp"

#include "superint/jet.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace superint {

namespace odeint = boost::numeric::odeint;
using State = std::vector<cplx>;

SeedObstruction::SeedObstruction(double remn, double dremn)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "algebraic conditions violated at the seed: |Remn| = " << remn << ", |DRemn| = " << dremn;
          return os.str();
      }()),
      remn_(remn),
      dremn_(dremn)
{
}

double ChartPath::length() const
{
    double L = 0.0;
    for (std::size_t k = 1; k < vertices.size(); ++k) L += std::abs(vertices[k] - vertices[k - 1]);
    return L;
}

std::vector<ChartPath> path_fan(cplx a, cplx b, int n)
{
    const double dx = b.real() - a.real();
    const double dy = b.imag() - a.imag();
    std::vector<ChartPath> out;
    for (int k = 0; k < n; ++k) {
        // Later variants move the turning point of the staircases.
        const double f = k < 4 ? 0.5 : 1.0 / (2 + k / 4);
        ChartPath p;
        switch (k % 4) {
        case 0: p.vertices = {a, a + dx, b}; break;
        case 1: p.vertices = {a, a + cplx(0, dy), b}; break;
        case 2: p.vertices = {a, a + f * dx, a + cplx(f * dx, dy), b}; break;
        default: p.vertices = {a, a + cplx(0, f * dy), a + cplx(dx, f * dy), b}; break;
        }
        out.push_back(std::move(p));
    }
    return out;
}

Trajectory integrate_along(const PathRhs& rhs, State y0, const ChartPath& path, const IntegratorOptions& opt)
{
    if (path.vertices.size() < 2) throw std::invalid_argument("path needs at least two vertices");
    Trajectory tr;
    State y = std::move(y0);
    double total = 0.0;
    tr.sigma.push_back(0.0);
    tr.z.push_back(path.vertices.front());
    tr.y.push_back(y);

    odeint::runge_kutta4<State, double, State, double> rk;
    long steps = 0;
    double h = opt.h0;
    for (std::size_t seg = 1; seg < path.vertices.size(); ++seg) {
        const cplx a = path.vertices[seg - 1];
        const cplx b = path.vertices[seg];
        const double L = std::abs(b - a);
        if (L == 0.0) continue;
        const cplx dir = (b - a) / L;
        auto sys = [&](const State& x, State& dxdt, double sigma) {
            try {
                dxdt = rhs(a + dir * sigma, x, dir);
            } catch (const DomainError& e) {
                throw DomainExit(std::string("singular point on path: ") + e.what());
            }
        };
        double sig = 0.0;
        State y1, y2;
        while (sig < L) {
            if (++steps > opt.max_steps) throw StepFailure("step budget exhausted");
            const bool last = h >= L - sig;
            const double step = last ? L - sig : h;
            y1 = y;
            rk.do_step(sys, y1, sig, step);
            y2 = y;
            rk.do_step(sys, y2, sig, 0.5 * step);
            rk.do_step(sys, y2, sig + 0.5 * step, 0.5 * step);
            double err = 0.0, mag = 0.0;
            for (std::size_t k = 0; k < y.size(); ++k) {
                err = std::max(err, std::abs(y2[k] - y1[k]) / 15.0);
                mag = std::max(mag, std::abs(y2[k]));
            }
            if (!std::isfinite(err)) throw StepFailure("non-finite state");
            const double allowed = opt.tol * step * (1.0 + mag);
            if (err <= allowed) {
                for (std::size_t k = 0; k < y.size(); ++k) y[k] = y2[k] + (y2[k] - y1[k]) / 15.0;
                sig = last ? L : sig + step;
                tr.sigma.push_back(total + sig);
                tr.z.push_back(a + dir * sig);
                tr.y.push_back(y);
            }
            const double fac = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(allowed / err, 0.25), 0.2, 4.0);
            if (err > allowed || !last) h = step * fac;
            if (h < opt.hmin) throw StepFailure("tolerance unreachable: step below minimum");
        }
        total += L;
    }
    return tr;
}

namespace {

void check_path(const StructureFunctions& sf, const ChartPath& path, const IntegratorOptions& opt)
{
    if (!opt.check_domain) return;
    for (const cplx& v : path.vertices) {
        if (!sf.chart.domain().contains(ChartPoint::from_z(v), 1e-9)) {
            std::ostringstream os;
            os << "path vertex " << v << " leaves the chart domain";
            throw DomainExit(os.str());
        }
    }
}

void precondition(const StructureFunctions& sf, TauMode mode, const IntegratorOptions& opt, Trajectory& tr)
{
    if (!opt.check_preconditions) return;
    ResidualOptions ro;
    ro.relative = true;
    try {
        ResidualReport r = mode == TauMode::proper ? proper_residuals(sf, ro) : conformal_residuals(sf, ro);
        for (const auto& name : r.failing(opt.precondition_tol))
            tr.warnings.push_back("precondition: " + name + " residual " + std::to_string(r.entries.at(name).max_abs));
    } catch (const NotProper& e) {
        tr.warnings.push_back(std::string("precondition: ") + e.what());
    } catch (const DomainError& e) {
        tr.warnings.push_back(std::string("precondition check skipped: ") + e.what());
    }
}

}  // namespace

Trajectory integrate_potential(const StructureFunctions& sf, TauMode mode, const PotentialSeed& seed,
                               const ChartPath& path, const IntegratorOptions& opt)
{
    check_path(sf, path, opt);
    Field tau = mode == TauMode::proper ? Field(0.0) : tau_from(sf);
    auto pc = second_prolongation(sf, tau);
    Field G = Field(2.0) * sf.chart.log_phi().dz();
    Field e2f = sq(sf.chart.phi());
    FieldBatch batch({sf.tz, sf.s, tau, G, G.dzbar(), pc.q11, pc.q12, pc.gamma1, e2f});

    const ChartPoint p0 = ChartPoint::from_z(path.vertices.front());
    const double phi2 = e2f.eval(p0).real();
    State y0 = {seed.V0, seed.Vz0, std::conj(seed.Vz0), 0.25 * phi2 * seed.DeltaV0};

    auto rhs = [&](cplx z, const State& y, cplx dz) {
        auto v = batch.eval(ChartPoint::from_z(z));
        const cplx T = v[0], s = v[1], ta = v[2], g = v[3], gw = v[4], q11 = v[5], q12 = v[6], g1 = v[7];
        const cplx dw = std::conj(dz);
        const cplx V = y[0], Vz = y[1], Vw = y[2], M = y[3];
        const cplx Vzz = (2.0 * T + g) * Vz + 2.0 * s * Vw + ta * V;
        const cplx Vww = (2.0 * std::conj(T) + std::conj(g)) * Vw + 2.0 * std::conj(s) * Vz + std::conj(ta) * V;
        const cplx Mz = 2.0 * (q11 * Vz + q12 * Vw + g1 * V + T * M) + gw * Vz + g * M;
        const cplx Mw = 2.0 * (std::conj(q11) * Vw + std::conj(q12) * Vz + std::conj(g1) * V + std::conj(T) * M) +
                        std::conj(gw) * Vw + std::conj(g) * M;
        return State{Vz * dz + Vw * dw, Vzz * dz + M * dw, M * dz + Vww * dw, Mz * dz + Mw * dw};
    };
    Trajectory tr = integrate_along(rhs, std::move(y0), path, opt);
    for (std::size_t k = 0; k < tr.y.size(); ++k) {
        const double p2 = e2f.eval(ChartPoint::from_z(tr.z[k])).real();
        tr.y[k][3] *= 4.0 / p2;
    }
    const auto& e = tr.end();
    const double scale = 1.0 + std::abs(e[0]) + std::abs(e[1]) + std::abs(e[3]);
    if (std::abs(e[0].imag()) > 1e-10 * scale || std::abs(e[3].imag()) > 1e-10 * scale ||
        std::abs(e[2] - std::conj(e[1])) > 1e-10 * scale)
        tr.warnings.push_back("reality of V lost along the path");
    precondition(sf, mode, opt, tr);
    return tr;
}

Trajectory integrate_killing(const StructureFunctions& sf, const KillingSeed& seed, const ChartPath& path,
                             const IntegratorOptions& opt)
{
    check_path(sf, path, opt);
    FieldBatch batch({sf.s, sf.tz, sf.chart.log_phi().dz()});
    auto rhs = [&](cplx z, const State& y, cplx dz) {
        auto v = batch.eval(ChartPoint::from_z(z));
        const cplx s = v[0], T = v[1], fz = v[2];
        const cplx c1w = 4.0 / 3.0 * s * y[1] - 4.0 * (std::conj(T) / 3.0 + std::conj(fz)) * y[0];
        const cplx c2z = 4.0 / 3.0 * std::conj(s) * y[0] - 4.0 * (T / 3.0 + fz) * y[1];
        return State{c1w * std::conj(dz), c2z * dz};
    };
    Trajectory tr = integrate_along(rhs, {seed.c1, seed.c2}, path, opt);
    precondition(sf, TauMode::conformal, opt, tr);
    return tr;
}

double killing_holomorphy_defect(const StructureFunctions& sf, const KillingSeed& seed, cplx target, double h,
                                 const IntegratorOptions& opt)
{
    IntegratorOptions o = opt;
    o.check_preconditions = false;
    const cplx base = sf.base.z();
    auto at = [&](cplx z) { return integrate_killing(sf, seed, ChartPath::straight(base, z), o).end(); };
    auto xp = at(target + h), xm = at(target - h), yp = at(target + cplx(0, h)), ym = at(target - cplx(0, h));
    double m = 0.0;
    for (int k = 0; k < 2; ++k) {
        const cplx dx = (xp[k] - xm[k]) / (2.0 * h);
        const cplx dy = (yp[k] - ym[k]) / (2.0 * h);
        // c1 must not depend on z, c2 must not depend on zbar.
        const cplx d = k == 0 ? 0.5 * (dx - cplx(0, 1) * dy) : 0.5 * (dx + cplx(0, 1) * dy);
        m = std::max(m, std::abs(d));
    }
    return m;
}

AlgebraicResiduals proper_flat_algebraic(const ProperFlatSeed& v)
{
    static const JetPoly E = remn_jet();
    static const JetPoly Ew = E.Dzbar();
    static const JetPoly Ez = E.Dz();
    JetPoly::Values x{v.s, v.xi, v.tz};
    return {std::abs(E.eval(x)), std::max(std::abs(Ew.eval(x)), std::abs(Ez.eval(x)))};
}

Trajectory integrate_structure_proper_flat(const ProperFlatSeed& seed, const ChartPath& path,
                                           const IntegratorOptions& opt, double seed_tol)
{
    const auto res = proper_flat_algebraic(seed);
    const double scale = 1.0 + std::pow(std::abs(seed.s) + std::abs(seed.tz) + std::sqrt(std::abs(seed.xi)), 4);
    if (res.remn > seed_tol * scale || res.dremn > seed_tol * scale) throw SeedObstruction(res.remn, res.dremn);

    auto rhs = [](cplx, const State& y, cplx dz) {
        const cplx s = y[0], xi = y[1], T = y[2];
        const cplx sb = std::conj(s), xib = std::conj(xi), Tb = std::conj(T);
        const cplx dw = std::conj(dz);
        const cplx sz = 4.0 / 3.0 * T * s, sw = 0.5 * xi - 2.0 / 3.0 * Tb * s;
        const cplx xz = 16.0 / 3.0 * s * s * sb + 4.0 / 3.0 * xi * T, xw = 8.0 / 3.0 * s * xib;
        const cplx Tz = 4.0 / 3.0 * T * T + 2.0 * s * Tb - 0.5 * xi, Tw = 4.0 / 3.0 * s * sb;
        return State{sz * dz + sw * dw, xz * dz + xw * dw, Tz * dz + Tw * dw, 2.0 * (T * dz).real()};
    };
    return integrate_along(rhs, {seed.s, seed.xi, seed.tz, 0.0}, path, opt);
}

ProperFlatSeed solve_proper_flat_seed(cplx s, double theta)
{
    const cplx e = std::polar(1.0, theta);
    const double sig = std::abs(s);
    const double k = (std::pow(e, 3) * std::conj(s)).real();
    auto g = [&](double r) {
        return 27.0 * std::pow(sig, 4) - 18.0 * sig * sig * r * r - std::pow(r, 4) - 8.0 * std::pow(r, 3) * k;
    };
    auto xi_for = [&](cplx T) {
        const cplx Tb = std::conj(T);
        const cplx alpha = 4.0 / 3.0 * Tb;
        const cplx beta = -4.0 * s;
        const cplx c = -(80.0 / 9.0 * std::norm(s) * T + 16.0 / 9.0 * s * Tb * Tb);
        const double den = std::norm(alpha) - std::norm(beta);
        if (std::abs(den) < 1e-300) throw SeedObstruction(std::abs(c), 0.0);
        return (std::conj(alpha) * c - beta * std::conj(c)) / den;
    };
    ProperFlatSeed out{s, 0.0, 0.0};
    if (sig == 0.0) return out;
    double hi = sig;
    while (g(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e6 * (1.0 + sig)) throw SeedObstruction(0.0, g(hi));
    }
    std::uintmax_t iters = 200;
    auto [lo_r, hi_r] =
        boost::math::tools::toms748_solve(g, 0.0, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    const double r = 0.5 * (lo_r + hi_r);
    out.tz = r * e;
    out.xi = xi_for(out.tz);
    return out;
}

double potential_path_independence(const StructureFunctions& sf, TauMode mode, const PotentialSeed& seed,
                                   cplx target, int n_paths, const IntegratorOptions& opt)
{
    IntegratorOptions o = opt;
    o.check_preconditions = false;
    std::vector<State> ends;
    for (const auto& p : path_fan(sf.base.z(), target, n_paths)) ends.push_back(integrate_potential(sf, mode, seed, p, o).end());
    double m = 0.0;
    for (std::size_t a = 0; a < ends.size(); ++a)
        for (std::size_t b = a + 1; b < ends.size(); ++b) {
            double d = 0.0;
            for (std::size_t k = 0; k < ends[a].size(); ++k) d = std::max(d, std::abs(ends[a][k] - ends[b][k]));
            m = std::max(m, d);
        }
    return m;
}

int EndpointMap::rank(double tol) const
{
    return static_cast<int>(std::count_if(singular_values.begin(), singular_values.end(), [&](double s) { return s > tol; }));
}

int KillingEndpointMap::rank(double tol) const
{
    return static_cast<int>(std::count_if(singular_values.begin(), singular_values.end(), [&](double s) { return s > tol; }));
}

EndpointMap potential_endpoint_map(const StructureFunctions& sf, TauMode mode, cplx target, const IntegratorOptions& opt)
{
    IntegratorOptions o = opt;
    o.check_preconditions = false;
    const std::array<PotentialSeed, 4> unit = {
        PotentialSeed{1.0, 0.0, 0.0}, PotentialSeed{0.0, 1.0, 0.0}, PotentialSeed{0.0, cplx(0, 1), 0.0},
        PotentialSeed{0.0, 0.0, 1.0}};
    EndpointMap m;
    Eigen::Matrix4d A;
    for (int j = 0; j < 4; ++j) {
        auto e = integrate_potential(sf, mode, unit[j], ChartPath::straight(sf.base.z(), target), o).end();
        const std::array<double, 4> col = {e[0].real(), e[1].real(), e[1].imag(), e[3].real()};
        for (int i = 0; i < 4; ++i) m.matrix[i][j] = A(i, j) = col[i];
    }
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(A);
    for (int i = 0; i < 4; ++i) m.singular_values[i] = svd.singularValues()(i);
    return m;
}

KillingEndpointMap killing_endpoint_map(const StructureFunctions& sf, cplx target, const IntegratorOptions& opt)
{
    IntegratorOptions o = opt;
    o.check_preconditions = false;
    KillingEndpointMap m;
    Eigen::Matrix2cd A;
    const std::array<KillingSeed, 2> unit = {KillingSeed{1.0, 0.0}, KillingSeed{0.0, 1.0}};
    for (int j = 0; j < 2; ++j) {
        auto e = integrate_killing(sf, unit[j], ChartPath::straight(sf.base.z(), target), o).end();
        for (int i = 0; i < 2; ++i) m.matrix[i][j] = A(i, j) = e[i];
    }
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(A);
    for (int i = 0; i < 2; ++i) m.singular_values[i] = svd.singularValues()(i);
    return m;
}

}  // namespace superint

// Acceptance checks. Usage: acceptance N   (N = 1..9, or "all").

#include "superint/catalog.hpp"

#include <Eigen/Dense>
#include <fmt/core.h>

#include <chrono>
#include <functional>
#include <random>
#include <string>

using namespace superint;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string sci(double v) { return fmt::format("{:.3g}", v); }

double max_on(const Field& f, const Domain& d)
{
    double m = 0.0;
    for (const auto& p : d.grid()) m = std::max(m, std::abs(f.eval(p)));
    return m;
}

Field X() { return Field::x(); }
Field Y() { return Field::y(); }
Field Z() { return Field::z(); }
Field W() { return Field::zbar(); }

Domain sw_domain() { return {0.3, 1.3, 0.2, 0.9, 11, 11}; }

// s = 1.5 zbar / (z^2 - zbar^2), t = -(3/8) log(x^2 y^2).
StructureFunctions sw1()
{
    const Field s = Field(1.5) * W() / (Z() * Z() - W() * W());
    const Field t = Field(-3.0 / 8.0) * log(X() * X() * Y() * Y());
    return make_structure(ConformalChart::flat(sw_domain()), s, t, {0.5, 0.5});
}

StructureFunctions sw1_broken()
{
    return make_structure(ConformalChart::flat(sw_domain()), W(), 0.0, {0.5, 0.5});
}

SystemSpec sw1_spec()
{
    const auto fl = ConformalChart::flat(sw_domain());
    const Field V = X() * X() + Y() * Y() + Field(0.3) / (X() * X()) + Field(0.7) / (Y() * Y());
    return {fl, sw1(), V,
            {{"dx2", killing_observable(fl, 0.25, 0.25, X() * X() + Field(0.3) / (X() * X())), {}},
             {"dy2", killing_observable(fl, -0.25, 0.25, Y() * Y() + Field(0.7) / (Y() * Y())), {}}}};
}

Outcome criterion_1()
{
    Outcome o;
    const auto t0 = Clock::now();
    const auto sys = load_system(catalog_entry("harmonic-oscillator").spec);
    const Domain d = sys.spec.chart.domain();
    o.require(d.nx == 11 && d.ny == 11, "grid 11x11");
    for (const std::string r : {"conformal", "proper", "flat-correspondence", "wilczynski", "bracket"}) {
        const auto rep = run_registry(sys, r, {false, 100, 1});
        o.require(rep.passes(1e-9), r + " max " + sci(rep.max_abs()));
    }
    const double t = seconds_since(t0);
    o.require(t < 10.0, "runtime " + fmt::format("{:.2f}s", t));
    return o;
}

Field random_rescaling(std::mt19937& rng)
{
    std::uniform_real_distribution<double> c(-0.3, 0.3);
    return Field(c(rng)) + Field(c(rng)) * X() + Field(c(rng)) * Y() + Field(c(rng)) * X() * X() +
           Field(c(rng)) * X() * Y() + Field(c(rng)) * Y() * Y();
}

Outcome criterion_2()
{
    Outcome o;
    std::mt19937 rng(2);
    const auto sf = sw1();
    const auto br = sw1_broken();
    const Domain d = sw_domain();
    const Field xi0 = xi_from(sf);
    const Field u0 = invariant_u(sf);
    const bool pass0 = conformal_residuals(sf, {true}).passes(1e-8);
    const bool pass_br = conformal_residuals(br, {true}).passes(1e-8);
    o.require(pass0 && !pass_br, "reference statuses");
    double ds = 0, dxi = 0, du = 0, kept = 0, broke = 1e300;
    int status_changes = 0;
    for (int k = 0; k < 20; ++k) {
        const Field U = random_rescaling(rng);
        const auto g = gauge_transform(sf, U);
        ds = std::max(ds, max_on(g.s - sf.s, d));
        dxi = std::max(dxi, max_on(xi_from(g) - xi0, d));
        const Field diff = invariant_u(g) - u0;
        du = std::max(du, max_on(diff - Field(diff.eval(sf.base)), d));
        const auto rg = conformal_residuals(g, {true});
        const auto rb = conformal_residuals(gauge_transform(br, U), {true});
        // Back again: the inverse rescaling must restore the status too.
        const auto rback = conformal_residuals(gauge_transform(g, Field(-1.0) * U), {true});
        kept = std::max(kept, std::max(rg.max_abs(), rback.max_abs()));
        broke = std::min(broke, rb.max_abs());
        if (rg.passes(1e-8) != pass0 || rb.passes(1e-8) != pass_br || rback.passes(1e-8) != pass0) ++status_changes;
    }
    o.require(ds < 1e-10, "s " + sci(ds));
    o.require(dxi < 1e-10, "xi " + sci(dxi));
    o.require(du < 1e-11, "u - const " + sci(du));
    o.require(status_changes == 0,
              fmt::format("status kept in 20/20 (verified max {}, broken at least {})", sci(kept), sci(broke)));
    return o;
}

Outcome criterion_3()
{
    Outcome o;
    const auto sf = sw1();
    const PotentialSeed seed{1.0, {0.3, 0.1}, 2.0};
    const double good = potential_path_independence(sf, TauMode::proper, seed, {1.2, 0.85}, 4);
    o.require(good < 1e-8, "verified discrepancy " + sci(good));
    const auto osc = make_structure(ConformalChart::flat({-1.5, 1.5, -1.5, 1.5, 11, 11}), 0.0, 0.0);
    const double osc_good = potential_path_independence(osc, TauMode::conformal, {0.25, {0.7, -0.4}, 5.2}, {1, 1}, 4);
    o.require(osc_good < 1e-8, "oscillator discrepancy " + sci(osc_good));
    // t = |z|^2 breaks Delta t = 0 and nothing else.
    const auto br = make_structure(ConformalChart::flat({-1.5, 1.5, -1.5, 1.5, 11, 11}), 0.0, Z() * W());
    const double bad = potential_path_independence(br, TauMode::conformal, {0.25, {0.7, -0.4}, 5.2}, {1, 1}, 4);
    o.require(bad > 1e-3, "broken discrepancy " + sci(bad));
    return o;
}

Outcome criterion_4()
{
    Outcome o;
    const auto osc = make_structure(ConformalChart::flat({-1.5, 1.5, -1.5, 1.5, 11, 11}), 0.0, 0.0);
    const auto sph = load_system(catalog_entry("sphere-generic").spec);
    struct Case {
        std::string name;
        StructureFunctions sf;
        cplx target;
    };
    for (const auto& c : {Case{"oscillator", osc, {1, 1}}, Case{"SW-I", sw1(), {1.2, 0.85}},
                          Case{"sphere-generic", *sph.spec.sf, {0.6, 0.5}}}) {
        const auto pm = potential_endpoint_map(c.sf, TauMode::proper, c.target);
        const auto km = killing_endpoint_map(c.sf, c.target);
        o.require(pm.rank() == 4 && km.rank() == 2,
                  fmt::format("{} ranks {} and {} (smallest sv {})", c.name, pm.rank(), km.rank(),
                              sci(pm.singular_values[3])));
    }
    return o;
}

Outcome criterion_5()
{
    Outcome o;
    const auto t0 = Clock::now();
    const auto seed = solve_proper_flat_seed({0.4, 0.2}, 0.3);
    const auto po = propagated_obstructions(seed, {-0.25, 0.25, -0.25, 0.25, 11, 11}, {0, 0});
    const double t = seconds_since(t0);
    o.require(po.d3z < 1e-8, "D_zzz " + sci(po.d3z));
    o.require(po.d3w < 1e-8, "D_www " + sci(po.d3w));
    o.require(po.d2z2w < 1e-8, "D_zzww " + sci(po.d2z2w));
    o.require(po.fit_residual < 1e-7, "bi-quadratic fit " + sci(po.fit_residual));
    o.require(t < 30.0, fmt::format("{} points in {:.2f}s", po.points, t));
    return o;
}

Outcome criterion_6()
{
    Outcome o;
    const auto seeded = load_system(catalog_entry("flat-proper-seed").spec);
    struct Case {
        std::string name;
        StructureFunctions sf;
    };
    for (const auto& c : {Case{"SW-I", sw1()}, Case{"flat-proper-seed", *seeded.spec.sf}}) {
        const auto st = to_standard_gauge(c.sf);
        const Domain d = st.chart.domain();
        const Field tau = tau_from(st);
        const Field xi3 = xi_from(st) / Field(3.0);
        const double minus = max_on(tau + xi3, d);
        const double plus = max_on(tau - xi3, d);
        const double curv = max_on(st.chart.scalar_curvature() + Field(2.0 / 9.0) * norm2_S(st), d);
        o.require(minus < 1e-9, c.name + " tau = -xi/3: " + sci(minus));
        o.require(curv < 1e-9, c.name + " R = -2/9 S.S: " + sci(curv));
        fmt::print("  note {}: max|tau - xi/3| = {}, so tau = +xi/3 holds in standard gauge\n", c.name, sci(plus));
    }
    return o;
}

std::array<Vec3, 3> random_rotation(std::mt19937& rng)
{
    std::normal_distribution<double> g;
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = g(rng);
    Eigen::Matrix3d Q = Eigen::HouseholderQR<Eigen::Matrix3d>(M).householderQ();
    if (Q.determinant() < 0) Q.col(0) *= -1.0;
    std::array<Vec3, 3> out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = Q(i, j);
    return out;
}

Sym3Q random_rational(std::mt19937& rng)
{
    std::uniform_int_distribution<int> n(-9, 9), dd(1, 5);
    Sym3Q L;
    for (auto& e : L.e) e = mpq_class(n(rng), dd(rng)), e.canonicalize();
    L.e[5] = -L.e[0] - L.e[3];
    return L;
}

Outcome criterion_7()
{
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937 rng(7);
    const Sym3Q A = random_rational(rng), B = random_rational(rng);
    std::vector<QC> pts;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) pts.emplace_back(mpq_class(i + 1, 10), mpq_class(3 + 2 * j, 20));

    int exact_ok = 0;
    for (const auto& z : pts) exact_ok += plucker_relations_exact(plucker(A, B, z)) ? 1 : 0;
    o.require(exact_ok == 25, fmt::format("exact relations at {}/25 points", exact_ok));

    const Sym3 a = to_double(A), b = to_double(B);
    double rot = 0.0;
    for (int k = 0; k < 10; ++k) {
        const auto Q = random_rotation(rng);
        for (const cplx z : {cplx(0.3, 0.2), cplx(-0.5, 0.4), cplx(0.1, -0.7)}) {
            const double r0 = sphere_constraint_residual(a, b, z);
            const Vec3 x = stereographic_inverse(z);
            Vec3 qx{};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) qx[i] += Q[i][j] * x[j];
            const double r1 = sphere_constraint_residual(rotate(a, Q), rotate(b, Q), stereographic(qx));
            rot = std::max(rot, std::abs(r1 - r0) / std::max(1.0, r0));
        }
    }
    o.require(rot < 1e-9, "rotation equivariance " + sci(rot));

    double dual = 0.0;
    for (const auto& z : pts) {
        const cplx ex = cleared_polynomial(A, B, z).to_cplx();
        const cplx fl = cleared_polynomial_float(a, b, z.to_cplx());
        dual = std::max(dual, std::abs(ex - fl) / std::abs(ex));
    }
    o.require(dual < 1e-10, "float vs exact cleared polynomial " + sci(dual));
    const double t = seconds_since(t0);
    o.require(t < 60.0, fmt::format("runtime {:.2f}s", t));
    return o;
}

Outcome criterion_8()
{
    Outcome o;
    for (const std::string name : {"harmonic-oscillator", "sphere-generic"}) {
        const auto sys = load_system(catalog_entry(name).spec);
        const auto rep = run_registry(sys, "bracket", {false, 100, 8});
        o.require(rep.passes(1e-9), name + " max " + sci(rep.max_abs()));
    }
    const SystemSpec sw = sw1_spec();
    const auto pts = phase_samples(sw.chart.domain(), 100, 8);
    for (int alpha = 1; alpha < sw.count(); ++alpha) {
        const auto sc = defect_scan(sw, alpha, pts);
        o.require(sc.value < 1e-9 && sc.cubic < 1e-9 && sc.linear < 1e-9,
                  fmt::format("SW-I {} defect {} cubic {} linear {}", sw.integral(alpha).label, sci(sc.value),
                              sci(sc.cubic), sci(sc.linear)));
    }
    return o;
}

// Random expression trees built from z, zbar, x, y, constants, +, -, *, /,
// integer powers, exp and log, kept away from singular points on [-0.8, 0.8]^2.
Field random_field(std::mt19937& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 4 : 11);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    switch (pick(rng)) {
    case 0: return Z();
    case 1: return W();
    case 2: return X();
    case 3: return Y();
    case 4: return Field(cplx(c(rng), c(rng)));
    case 5:
    case 6: return random_field(rng, depth - 1) + random_field(rng, depth - 1);
    case 7: return random_field(rng, depth - 1) - random_field(rng, depth - 1);
    case 8:
    case 9: return random_field(rng, depth - 1) * random_field(rng, depth - 1);
    case 10: {
        const Field f = random_field(rng, depth - 1);
        return exp(Field(0.5) * f);
    }
    default: {
        const Field f = random_field(rng, depth - 1);
        // 2 + f fbar / (1 + f fbar) stays in [2, 3).
        const Field m = f * f.conj();
        const Field den = Field(2.0) + m / (Field(1.0) + m);
        return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? log(den) : pow(den, -2);
    }
    }
}

Outcome criterion_9()
{
    Outcome o;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const Field f = random_field(rng, 4);
        const ChartPoint p{u(rng), u(rng)};
        for (const Var v : {Var::z, Var::zbar}) {
            const cplx sym = f.d(v).eval(p);
            const cplx fd = fd_probe(f, p, v, 1e-4);
            worst = std::max(worst, std::abs(sym - fd) / std::max(1.0, std::abs(sym)));
        }
    }
    o.require(worst < 1e-6, "symbolic vs finite difference on 200 fields " + sci(worst));
    const double ti = tensor_identity_check(9, 100).max_abs();
    o.require(ti < 1e-12, "tensor identities on 100 draws " + sci(ti));
    return o;
}

const std::function<Outcome()> criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                             criterion_6, criterion_7, criterion_8, criterion_9};

bool run(int n)
{
    Outcome o;
    try {
        o = criteria[n - 1]();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    fmt::print("acceptance {}: {} ({})\n", n, o.pass ? "PASS" : "FAIL", o.detail);
    return o.pass;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::string arg = argc > 1 ? argv[1] : "all";
    if (arg == "all") {
        bool ok = true;
        for (int n = 1; n <= 9; ++n) ok = run(n) && ok;
        return ok ? 0 : 1;
    }
    const int n = std::stoi(arg);
    if (n < 1 || n > 9) {
        fmt::print(stderr, "criterion must be 1..9\n");
        return 2;
    }
    return run(n) ? 0 : 1;
}

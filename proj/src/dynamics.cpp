#include "superint/dynamics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

namespace superint {

PhasePoly::PhasePoly(const Field& f)
{
    add({0, 0}, f);
}

PhasePoly PhasePoly::px()
{
    PhasePoly p;
    p.add({1, 0}, Field(1.0));
    return p;
}

PhasePoly PhasePoly::py()
{
    PhasePoly p;
    p.add({0, 1}, Field(1.0));
    return p;
}

void PhasePoly::add(const Exponent& e, const Field& f)
{
    if (f.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, f);
        return;
    }
    it->second += f;
    if (it->second.is_zero()) terms_.erase(it);
}

PhasePoly operator+(const PhasePoly& a, const PhasePoly& b)
{
    PhasePoly r = a;
    for (const auto& [e, f] : b.terms_) r.add(e, f);
    return r;
}

PhasePoly operator-(const PhasePoly& a, const PhasePoly& b)
{
    PhasePoly r = a;
    for (const auto& [e, f] : b.terms_) r.add(e, -f);
    return r;
}

PhasePoly operator*(const PhasePoly& a, const PhasePoly& b)
{
    PhasePoly r;
    for (const auto& [ea, fa] : a.terms_)
        for (const auto& [eb, fb] : b.terms_) r.add({ea.first + eb.first, ea.second + eb.second}, fa * fb);
    return r;
}

PhasePoly PhasePoly::dx() const
{
    PhasePoly r;
    for (const auto& [e, f] : terms_) r.add(e, f.dx());
    return r;
}

PhasePoly PhasePoly::dy() const
{
    PhasePoly r;
    for (const auto& [e, f] : terms_) r.add(e, f.dy());
    return r;
}

PhasePoly PhasePoly::dpx() const
{
    PhasePoly r;
    for (const auto& [e, f] : terms_)
        if (e.first > 0) r.add({e.first - 1, e.second}, Field(double(e.first)) * f);
    return r;
}

PhasePoly PhasePoly::dpy() const
{
    PhasePoly r;
    for (const auto& [e, f] : terms_)
        if (e.second > 0) r.add({e.first, e.second - 1}, Field(double(e.second)) * f);
    return r;
}

PhasePoly PhasePoly::part(int degree) const
{
    PhasePoly r;
    for (const auto& [e, f] : terms_)
        if (e.first + e.second == degree) r.add(e, f);
    return r;
}

int PhasePoly::degree() const
{
    int d = -1;
    for (const auto& [e, f] : terms_) d = std::max(d, e.first + e.second);
    return d;
}

cplx PhasePoly::eval(const PhasePoint& pp) const
{
    return CompiledPhasePoly(*this).eval(pp);
}

namespace {

std::vector<Field> coefficient_fields(const PhasePoly& p)
{
    std::vector<Field> out;
    for (const auto& [e, f] : p.terms()) out.push_back(f);
    return out;
}

}  // namespace

CompiledPhasePoly::CompiledPhasePoly(const PhasePoly& p) : batch_(coefficient_fields(p))
{
    for (const auto& [e, f] : p.terms()) exps_.push_back(e);
}

cplx CompiledPhasePoly::eval(const PhasePoint& pp) const
{
    auto v = batch_.eval(pp.position());
    cplx r = 0.0;
    for (std::size_t k = 0; k < exps_.size(); ++k)
        r += v[k] * std::pow(pp.px, exps_[k].first) * std::pow(pp.py, exps_[k].second);
    return r;
}

std::pair<cplx, cplx> CompiledPhasePoly::eval_parts(const PhasePoint& pp) const
{
    auto v = batch_.eval(pp.position());
    cplx cubic = 0.0, linear = 0.0;
    for (std::size_t k = 0; k < exps_.size(); ++k) {
        const cplx t = v[k] * std::pow(pp.px, exps_[k].first) * std::pow(pp.py, exps_[k].second);
        const int d = exps_[k].first + exps_[k].second;
        if (d == 3) cubic += t;
        if (d == 1) linear += t;
    }
    return {cubic, linear};
}

PhasePoly poisson(const PhasePoly& F, const PhasePoly& G)
{
    return F.dx() * G.dpx() - F.dpx() * G.dx() + F.dy() * G.dpy() - F.dpy() * G.dy();
}

PhasePoly hamiltonian_poly(const ConformalChart& chart, const Field& V)
{
    const PhasePoly px = PhasePoly::px(), py = PhasePoly::py();
    return PhasePoly(Field(1.0) / sq(chart.phi())) * (px * px + py * py) + PhasePoly(V);
}

PhasePoly killing_observable(const ConformalChart& chart, const Field& kzz, const Field& kzw, const Field& W)
{
    const PhasePoly px = PhasePoly::px(), py = PhasePoly::py();
    const PhasePoly i(Field::i());
    const PhasePoly plus = px + i * py, minus = px - i * py;
    const Field e4f = sq(sq(chart.phi()));
    return PhasePoly(kzz.conj() / e4f) * minus * minus + PhasePoly(Field(2.0) * kzw / e4f) * (px * px + py * py) +
           PhasePoly(kzz / e4f) * plus * plus + PhasePoly(W);
}

PhasePoly conformal_observable(const Field& c1, const Field& c2, const Field& W)
{
    const PhasePoly px = PhasePoly::px(), py = PhasePoly::py();
    const PhasePoly i(Field::i());
    const PhasePoly plus = px + i * py, minus = px - i * py;
    return PhasePoly(c1) * plus * plus + PhasePoly(c2) * minus * minus + PhasePoly(W);
}

std::pair<Field, Field> rho_components(const ConformalChart& chart, const Field& c1, const Field& c2)
{
    const Field e2f = sq(chart.phi());
    const Field e4f = sq(e2f);
    return {(e4f * c1).dzbar() / e2f, (e4f * c2).dz() / e2f};
}

PhasePoly rho_from_C(const ConformalChart& chart, const Field& c1, const Field& c2)
{
    auto [rz, rw] = rho_components(chart, c1, c2);
    // Twice g^ab rho_a p_b, matching H = g^ab p_a p_b.
    const Field e2f = sq(chart.phi());
    const Field rx = rz + rw;
    const Field ry = Field::i() * (rz - rw);
    return PhasePoly(Field(2.0) * rx / e2f) * PhasePoly::px() + PhasePoly(Field(2.0) * ry / e2f) * PhasePoly::py();
}

const Integral& SystemSpec::integral(int alpha) const
{
    if (alpha < 1 || alpha > static_cast<int>(integrals.size())) throw std::out_of_range("no integral with that index");
    return integrals[alpha - 1];
}

double hamiltonian(const SystemSpec& spec, const PhasePoint& pp)
{
    return spec.H().eval(pp).real();
}

PhasePoly defect_polynomial(const SystemSpec& spec, int alpha)
{
    if (alpha == 0) return {};
    const Integral& I = spec.integral(alpha);
    const PhasePoly H = spec.H();
    return poisson(I.F, H) - I.rho * H;
}

Defect integral_defect(const SystemSpec& spec, int alpha, const PhasePoint& pp)
{
    const CompiledPhasePoly c(defect_polynomial(spec, alpha));
    auto [cubic, linear] = c.eval_parts(pp);
    return {std::abs(c.eval(pp)), std::abs(cubic), std::abs(linear)};
}

DefectScan defect_scan(const SystemSpec& spec, int alpha, const std::vector<PhasePoint>& pts)
{
    DefectScan out;
    if (alpha == 0) return out;
    const CompiledPhasePoly c(defect_polynomial(spec, alpha));
    for (const PhasePoint& p : pts) {
        const cplx v = c.eval(p);
        auto [cubic, linear] = c.eval_parts(p);
        // Split the odd part from values at +-p and +-2p.
        auto scaled = [&](double l) { return c.eval({p.x, p.y, l * p.px, l * p.py}); };
        const cplx o1 = 0.5 * (scaled(1.0) - scaled(-1.0));
        const cplx o2 = 0.5 * (scaled(2.0) - scaled(-2.0));
        const cplx c3 = (o2 - 2.0 * o1) / 6.0;
        const cplx c1 = (8.0 * o1 - o2) / 6.0;
        out.value = std::max(out.value, std::abs(v));
        out.cubic = std::max(out.cubic, std::abs(cubic));
        out.linear = std::max(out.linear, std::abs(linear));
        out.parity = std::max({out.parity, std::abs(c3 - cubic), std::abs(c1 - linear)});
    }
    return out;
}

std::vector<PhasePoint> phase_samples(const Domain& d, int n, unsigned seed)
{
    std::mt19937 rng(seed);
    const auto grid = d.grid();
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    std::uniform_real_distribution<double> mom(-1.0, 1.0);
    std::vector<PhasePoint> out;
    for (int k = 0; k < n; ++k) {
        const ChartPoint& q = grid[pick(rng)];
        const double px = mom(rng);
        const double py = mom(rng);
        out.push_back({q.x, q.y, px, py});
    }
    return out;
}

std::vector<double> independence_singular_values(const SystemSpec& spec, const PhasePoint& pp)
{
    std::vector<PhasePoly> F = {spec.H()};
    for (const auto& I : spec.integrals) F.push_back(I.F);
    Eigen::MatrixXd J(F.size(), 4);
    for (std::size_t r = 0; r < F.size(); ++r) {
        const std::array<PhasePoly, 4> grad = {F[r].dx(), F[r].dy(), F[r].dpx(), F[r].dpy()};
        for (int c = 0; c < 4; ++c) J(static_cast<Eigen::Index>(r), c) = grad[c].eval(pp).real();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    std::vector<double> out;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) out.push_back(svd.singularValues()(k));
    return out;
}

namespace {

Trajectory integrate_one_form(const Field& wz, const Field& ww, const Field& bd, const ChartPath& path,
                              const IntegratorOptions& opt)
{
    FieldBatch batch({wz, ww});
    auto rhs = [&](cplx z, const std::vector<cplx>&, cplx dz) {
        auto v = batch.eval(ChartPoint::from_z(z));
        return std::vector<cplx>{v[0] * dz + v[1] * std::conj(dz)};
    };
    Trajectory tr = integrate_along(rhs, {0.0}, path, opt);
    if (opt.check_preconditions) {
        FieldBatch check({bd, wz});
        double worst = 0.0, scale = 1.0;
        for (const cplx& z : tr.z) {
            auto v = check.eval(ChartPoint::from_z(z));
            worst = std::max(worst, std::abs(v[0]));
            scale = std::max(scale, std::abs(v[1]));
        }
        if (worst > opt.precondition_tol * scale) {
            std::ostringstream os;
            os << "precondition: Bertrand-Darboux residual " << worst << " along the path";
            tr.warnings.push_back(os.str());
        }
    }
    return tr;
}

}  // namespace

Trajectory recover_companion_potential(const ConformalChart& chart, const Field& c1, const Field& c2, const Field& V,
                                       const ChartPath& path, const IntegratorOptions& opt)
{
    auto [rz, rw] = rho_components(chart, c1, c2);
    const Field e2f = sq(chart.phi());
    const Field wz = Field(2.0) * e2f * c1 * V.dzbar() + rz * V;
    const Field ww = Field(2.0) * e2f * c2 * V.dz() + rw * V;
    return integrate_one_form(wz, ww, bertrand_darboux_residual(chart, c1, c2, V), path, opt);
}

Trajectory recover_companion_potential_killing(const ConformalChart& chart, const Field& kzz, const Field& kzw,
                                               const Field& V, const ChartPath& path, const IntegratorOptions& opt)
{
    const Field ginv = chart.ginv_zzbar();
    const Field wz = ginv * (kzz * V.dzbar() + kzw * V.dz());
    const Field ww = ginv * (kzz.conj() * V.dz() + kzw * V.dzbar());
    return integrate_one_form(wz, ww, bertrand_darboux_killing(chart, kzz, kzw, V), path, opt);
}

}  // namespace superint

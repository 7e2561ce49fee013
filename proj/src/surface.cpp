#include "superint/surface.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace superint {

std::vector<ChartPoint> Domain::grid() const
{
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid needs at least one point per axis");
    std::vector<ChartPoint> pts;
    pts.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) {
        double y = ny == 1 ? 0.5 * (y0 + y1) : y0 + (y1 - y0) * j / (ny - 1);
        for (int i = 0; i < nx; ++i) {
            double x = nx == 1 ? 0.5 * (x0 + x1) : x0 + (x1 - x0) * i / (nx - 1);
            pts.push_back({x, y});
        }
    }
    return pts;
}

bool Domain::contains(const ChartPoint& p, double slack) const
{
    return p.x >= x0 - slack && p.x <= x1 + slack && p.y >= y0 - slack && p.y <= y1 + slack;
}

void require_real(const Field& f, const Domain& d, const char* what)
{
    if (f.is_real_tree()) return;
    for (const auto& p : d.grid()) {
        cplx v;
        try {
            v = f.eval(p);
        } catch (const DomainError&) {
            continue;
        }
        if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v))) {
            throw std::invalid_argument(std::string(what) + " is not real-valued at (" + std::to_string(p.x) + ", " +
                                        std::to_string(p.y) + ")");
        }
    }
}

ConformalChart::ConformalChart(Field phi, Domain domain) : phi_(std::move(phi)), domain_(domain)
{
    require_real(phi_, domain_, "phi");
    for (const auto& p : domain_.grid()) {
        double v = 0.0;
        try {
            v = phi_.eval(p).real();
        } catch (const DomainError&) {
            continue;
        }
        if (!(v > 0.0)) throw DomainError("conformal factor not positive", phi_.str());
    }
    log_phi_ = log(phi_);
}

ConformalChart ConformalChart::flat(Domain domain) { return {Field(1.0), domain}; }

ConformalChart ConformalChart::sphere(Domain domain)
{
    return {Field(2.0) / (Field(1.0) + Field::z() * Field::zbar()), domain};
}

Field ConformalChart::scalar_curvature() const
{
    return Field(-8.0) / sq(phi_) * log_phi_.dz().dzbar();
}

std::pair<Field, Field> ConformalChart::christoffel() const
{
    return {Field(2.0) * log_phi_.dz(), Field(2.0) * log_phi_.dzbar()};
}

Field ConformalChart::laplacian(const Field& f) const { return Field(4.0) / sq(phi_) * f.dz().dzbar(); }

Hessian ConformalChart::covariant_hessian(const Field& f) const
{
    auto [gz, gw] = christoffel();
    Field fz = f.dz();
    Field fw = f.dzbar();
    return {fz.dz() - gz * fz, fz.dzbar(), fw.dzbar() - gw * fw};
}

bool ConformalChart::is_flat() const
{
    if (auto c = phi_.constant_value()) return std::abs(*c - cplx(1.0, 0.0)) < 1e-12;
    for (const auto& p : domain_.grid()) {
        if (std::abs(phi_.eval(p) - cplx(1.0, 0.0)) > 1e-12) return false;
    }
    return true;
}

}  // namespace superint

#include "superint/structure.hpp"

#include <stdexcept>

namespace superint {

namespace {

Field third(double num) { return Field(num / 3.0); }

}  // namespace

StructureFunctions make_structure(ConformalChart chart, Field s, Field t, ChartPoint base)
{
    require_real(t, chart.domain(), "t");
    cplx t0 = t.eval(base);
    Field tn = t - Field(cplx(t0.real(), 0.0));
    Field tz = tn.dz();
    return {std::move(chart), std::move(s), std::move(tz), std::move(tn), base};
}

StructureFunctions make_structure_tz(ConformalChart chart, Field s, Field tz, ChartPoint base)
{
    return {std::move(chart), std::move(s), std::move(tz), std::nullopt, base};
}

Field xi_from(const StructureFunctions& sf)
{
    const Field& f = sf.chart.log_phi();
    return Field(2.0) * sf.s.dzbar() + Field(4.0) * sf.s * f.dzbar() + third(4.0) * sf.s * sf.tzbar();
}

Field z_from(const StructureFunctions& sf)
{
    const Field& phi = sf.chart.phi();
    return Field(2.0) / phi * (Field(2.0) * sf.s * phi.dzbar() + phi * sf.s.dzbar());
}

Field tau_from(const StructureFunctions& sf)
{
    const Field& f = sf.chart.log_phi();
    const Field& T = sf.tz;
    Field tzz = T.dz() - Field(2.0) * f.dz() * T;
    return third(2.0) * tzz - Field(8.0 / 9.0) * sq(T) - Field(8.0 / 9.0) * sf.s * sf.tzbar() + third(1.0) * z_from(sf);
}

Field tau_from_xi(const StructureFunctions& sf)
{
    const Field& f = sf.chart.log_phi();
    const Field& T = sf.tz;
    Field tzz = T.dz() - Field(2.0) * f.dz() * T;
    return third(2.0) * tzz - Field(8.0 / 9.0) * sq(T) - third(4.0) * sf.s * sf.tzbar() + third(1.0) * xi_from(sf);
}

StructureFunctions gauge_transform(const StructureFunctions& sf, const Field& upsilon)
{
    require_real(upsilon, sf.chart.domain(), "Upsilon");
    ConformalChart chart(exp(upsilon) * sf.chart.phi(), sf.chart.domain());
    if (sf.t) return make_structure(std::move(chart), sf.s, *sf.t - Field(3.0) * upsilon, sf.base);
    return make_structure_tz(std::move(chart), sf.s, sf.tz - Field(3.0) * upsilon.dz(), sf.base);
}

StructureFunctions to_standard_gauge(const StructureFunctions& sf)
{
    if (!sf.t) throw std::invalid_argument("standard gauge needs t, not only t_z");
    return gauge_transform(sf, *sf.t * third(1.0));
}

StructureFunctions to_flat_gauge(const StructureFunctions& sf) { return gauge_transform(sf, -sf.chart.log_phi()); }

Field invariant_u(const StructureFunctions& sf)
{
    if (!sf.t) throw std::invalid_argument("invariant u needs t, not only t_z");
    return sf.chart.log_phi() + *sf.t * third(1.0);
}

Field norm2_S(const StructureFunctions& sf) { return Field(16.0) * sf.s * sf.sbar() / sq(sf.chart.phi()); }

Field norm2_Xi(const StructureFunctions& sf)
{
    Field xi = xi_from(sf);
    return Field(8.0) * xi * xi.conj() / pow(sf.chart.phi(), 4);
}

}  // namespace superint

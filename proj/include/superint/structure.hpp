#pragma once

#include "superint/surface.hpp"

#include <optional>

namespace superint {

// S = phi^2 (s dz^3 + conj(s) dzbar^3); the trace part of T is built from dt.
// t itself is optional: every structural equation only needs t_z, and the
// sphere read-off produces t_z directly.
struct StructureFunctions {
    ConformalChart chart;
    Field s;
    Field tz;
    std::optional<Field> t;
    ChartPoint base;

    [[nodiscard]] Field sbar() const { return s.conj(); }
    [[nodiscard]] Field tzbar() const { return tz.conj(); }
};

// t is normalized so that t(base) = 0.
[[nodiscard]] StructureFunctions make_structure(ConformalChart chart, Field s, Field t, ChartPoint base = {});
[[nodiscard]] StructureFunctions make_structure_tz(ConformalChart chart, Field s, Field tz, ChartPoint base = {});

// Xi = xi dz^2 + conj(xi) dzbar^2 = div S + (2/3) S(dt).
[[nodiscard]] Field xi_from(const StructureFunctions& sf);
// zz component of div S.
[[nodiscard]] Field z_from(const StructureFunctions& sf);
// tau from the Ricci-identity formula with div S.
[[nodiscard]] Field tau_from(const StructureFunctions& sf);
// The same quantity written with Xi instead of div S.
[[nodiscard]] Field tau_from_xi(const StructureFunctions& sf);

// phi -> exp(Upsilon) phi, s unchanged, t -> t - 3 Upsilon.
[[nodiscard]] StructureFunctions gauge_transform(const StructureFunctions& sf, const Field& upsilon);
[[nodiscard]] StructureFunctions to_standard_gauge(const StructureFunctions& sf);
[[nodiscard]] StructureFunctions to_flat_gauge(const StructureFunctions& sf);

// u = ln phi + t/3, fixed up to a constant.
[[nodiscard]] Field invariant_u(const StructureFunctions& sf);

// Contractions in terms of components.
[[nodiscard]] Field norm2_S(const StructureFunctions& sf);   // S^abc S_abc
[[nodiscard]] Field norm2_Xi(const StructureFunctions& sf);  // Xi^ab Xi_ab

}  // namespace superint

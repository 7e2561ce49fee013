#pragma once

#include "superint/field.hpp"

#include <utility>
#include <vector>

namespace superint {

// Rectangle in (x, y) with a sampling grid for residual reports.
struct Domain {
    double x0 = -1.0;
    double x1 = 1.0;
    double y0 = -1.0;
    double y1 = 1.0;
    int nx = 11;
    int ny = 11;

    [[nodiscard]] std::vector<ChartPoint> grid() const;
    [[nodiscard]] bool contains(const ChartPoint& p, double slack = 1e-12) const;
};

struct Hessian {
    Field zz;
    Field zzbar;
    Field zbarzbar;
};

// Isothermal chart g = phi^2 dz dzbar with phi real and positive.
class ConformalChart {
public:
    ConformalChart(Field phi, Domain domain);

    [[nodiscard]] static ConformalChart flat(Domain domain = {});
    // Stereographic chart of the unit sphere, phi = 2/(1+|z|^2).
    [[nodiscard]] static ConformalChart sphere(Domain domain = {});

    [[nodiscard]] const Field& phi() const { return phi_; }
    [[nodiscard]] const Field& log_phi() const { return log_phi_; }
    [[nodiscard]] const Domain& domain() const { return domain_; }
    [[nodiscard]] ConformalChart with_domain(Domain d) const { return {phi_, d}; }

    [[nodiscard]] Field g_zzbar() const { return sq(phi_) * Field(0.5); }
    [[nodiscard]] Field ginv_zzbar() const { return Field(2.0) / sq(phi_); }

    [[nodiscard]] Field scalar_curvature() const;
    // Gamma^z_zz and Gamma^zbar_zbarzbar; every other symbol vanishes.
    [[nodiscard]] std::pair<Field, Field> christoffel() const;
    [[nodiscard]] Field laplacian(const Field& f) const;
    [[nodiscard]] Hessian covariant_hessian(const Field& f) const;

    // phi == 1 as a tree, or to 1e-12 on the grid.
    [[nodiscard]] bool is_flat() const;

private:
    Field phi_;
    Field log_phi_;
    Domain domain_;
};

// Throws std::invalid_argument unless f is real on the grid (tree check first).
void require_real(const Field& f, const Domain& d, const char* what);

}  // namespace superint

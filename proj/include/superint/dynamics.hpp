#pragma once

#include "superint/reconstruct.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace superint {

struct PhasePoint {
    double x = 0.0;
    double y = 0.0;
    double px = 0.0;
    double py = 0.0;

    [[nodiscard]] ChartPoint position() const { return {x, y}; }
};

// Polynomial in the momenta with field coefficients in (x, y).
class PhasePoly {
public:
    using Exponent = std::pair<int, int>;  // powers of (px, py)

    PhasePoly() = default;
    PhasePoly(const Field& f);  // NOLINT(google-explicit-constructor)
    [[nodiscard]] static PhasePoly px();
    [[nodiscard]] static PhasePoly py();

    [[nodiscard]] PhasePoly dx() const;
    [[nodiscard]] PhasePoly dy() const;
    [[nodiscard]] PhasePoly dpx() const;
    [[nodiscard]] PhasePoly dpy() const;
    // Homogeneous part of the given momentum degree.
    [[nodiscard]] PhasePoly part(int degree) const;
    [[nodiscard]] int degree() const;
    [[nodiscard]] const std::map<Exponent, Field>& terms() const { return terms_; }

    [[nodiscard]] cplx eval(const PhasePoint& pp) const;

    friend PhasePoly operator+(const PhasePoly& a, const PhasePoly& b);
    friend PhasePoly operator-(const PhasePoly& a, const PhasePoly& b);
    friend PhasePoly operator*(const PhasePoly& a, const PhasePoly& b);

private:
    std::map<Exponent, Field> terms_;
    void add(const Exponent& e, const Field& f);
};

// Coefficient fields compiled once for repeated evaluation.
class CompiledPhasePoly {
public:
    explicit CompiledPhasePoly(const PhasePoly& p);
    [[nodiscard]] cplx eval(const PhasePoint& pp) const;
    // Contributions of momentum degree 3 and 1 (the two parts of a defect).
    [[nodiscard]] std::pair<cplx, cplx> eval_parts(const PhasePoint& pp) const;

private:
    std::vector<PhasePoly::Exponent> exps_;
    FieldBatch batch_;
};

// {F, G} = F_x G_px - F_px G_x + F_y G_py - F_py G_y.
[[nodiscard]] PhasePoly poisson(const PhasePoly& F, const PhasePoly& G);

// H = (px^2 + py^2)/phi^2 + V.
[[nodiscard]] PhasePoly hamiltonian_poly(const ConformalChart& chart, const Field& V);
// K^ab p_a p_b + W for a symmetric tensor with chart components K_zz, K_zzbar.
[[nodiscard]] PhasePoly killing_observable(const ConformalChart& chart, const Field& kzz, const Field& kzw,
                                           const Field& W);
// C(p, p) + W for C = phi^4 (c1 dz^2 + c2 dzbar^2).
[[nodiscard]] PhasePoly conformal_observable(const Field& c1, const Field& c2, const Field& W);

// rho_k = (1/2) C^a_{k,a} as 1-form components (rho_z, rho_zbar).
[[nodiscard]] std::pair<Field, Field> rho_components(const ConformalChart& chart, const Field& c1, const Field& c2);
// rho(p) = 2 g^ab rho_a p_b, the factor that pairs with H = g^ab p_a p_b.
[[nodiscard]] PhasePoly rho_from_C(const ConformalChart& chart, const Field& c1, const Field& c2);

struct Integral {
    std::string label;
    PhasePoly F;
    PhasePoly rho;  // zero for proper integrals
};

struct SystemSpec {
    ConformalChart chart = ConformalChart::flat();
    std::optional<StructureFunctions> sf;
    Field V;
    std::vector<Integral> integrals;  // F^(1), F^(2); F^(0) = H is implicit

    [[nodiscard]] PhasePoly H() const { return hamiltonian_poly(chart, V); }
    [[nodiscard]] int count() const { return static_cast<int>(integrals.size()) + 1; }
    [[nodiscard]] const Integral& integral(int alpha) const;  // alpha >= 1
};

[[nodiscard]] double hamiltonian(const SystemSpec& spec, const PhasePoint& pp);

// {F^(alpha), H} - rho^(alpha) H.
[[nodiscard]] PhasePoly defect_polynomial(const SystemSpec& spec, int alpha);

struct Defect {
    double value = 0.0;
    double cubic = 0.0;
    double linear = 0.0;
};
[[nodiscard]] Defect integral_defect(const SystemSpec& spec, int alpha, const PhasePoint& pp);

// Maxima over the sample of |defect|, |cubic part|, |linear part| for one
// integral, plus the largest part mismatch under p -> -p (the cubic part is
// odd of degree 3, the linear part odd of degree 1).
struct DefectScan {
    double value = 0.0;
    double cubic = 0.0;
    double linear = 0.0;
    double parity = 0.0;
};
[[nodiscard]] DefectScan defect_scan(const SystemSpec& spec, int alpha, const std::vector<PhasePoint>& pts);

// Positions on the chart grid, momenta uniform in [-1, 1]^2.
[[nodiscard]] std::vector<PhasePoint> phase_samples(const Domain& d, int n, unsigned seed);

// Singular values of the 3x4 Jacobian of (H, F^(1), F^(2)) at pp.
[[nodiscard]] std::vector<double> independence_singular_values(const SystemSpec& spec, const PhasePoint& pp);

// Integrates dW = C dV + rho V (or K dV for a proper Killing tensor) along a
// path with W(start) = 0. Warns if the Bertrand-Darboux residual does not
// vanish at the trajectory samples.
[[nodiscard]] Trajectory recover_companion_potential(const ConformalChart& chart, const Field& c1, const Field& c2,
                                                     const Field& V, const ChartPath& path,
                                                     const IntegratorOptions& opt = {});
[[nodiscard]] Trajectory recover_companion_potential_killing(const ConformalChart& chart, const Field& kzz,
                                                             const Field& kzw, const Field& V, const ChartPath& path,
                                                             const IntegratorOptions& opt = {});

}  // namespace superint

#pragma once

#include "superint/structure.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace superint {

class NotProper : public std::runtime_error {
public:
    NotProper(const std::string& what, double tau_max) : std::runtime_error(what), tau_max_(tau_max) {}
    [[nodiscard]] double tau_max() const { return tau_max_; }

private:
    double tau_max_;
};

class GaugeMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One complex component of an equation, kept as the list of its terms so
// that the relative mode can scale by the largest term.
struct Component {
    std::vector<Field> terms;
};

struct Equation {
    std::string name;
    std::vector<Component> components;
};

struct ResidualEntry {
    double max_abs = 0.0;
    ChartPoint argmax{};
    int samples = 0;
    int excluded = 0;
};

struct ResidualReport {
    std::map<std::string, ResidualEntry> entries;

    [[nodiscard]] double max_abs() const;
    [[nodiscard]] bool passes(double tol) const { return max_abs() < tol; }
    [[nodiscard]] std::vector<std::string> failing(double tol) const;
    void merge(const ResidualReport& other);
};

struct ResidualOptions {
    bool relative = false;
    double max_excluded_fraction = 0.1;
};

// Singular points are skipped and counted; more than the allowed fraction
// raises DomainError.
[[nodiscard]] ResidualReport evaluate(const std::vector<Equation>& eqs, const std::vector<ChartPoint>& pts,
                                      const ResidualOptions& opt = {});
[[nodiscard]] ResidualReport evaluate(const std::vector<Equation>& eqs, const Domain& d, const ResidualOptions& opt = {});

// "DS", "DXi", "divTau", "DDt", "Delta-t", "DS-sym"
[[nodiscard]] std::vector<Equation> conformal_equations(const StructureFunctions& sf);
// "std:DS", "std:DXi", "std:Delta-t", "std:tau"; needs t_z == 0.
[[nodiscard]] std::vector<Equation> standard_equations(const StructureFunctions& sf);
// "flat:Sz", ..., "flat:aleph-w"; needs phi == 1.
[[nodiscard]] std::vector<Equation> flat_equations(const StructureFunctions& sf);
// "P:Delta-t", "P:Hess-t", "P:DS", "P:DXi", "P:Remn", "P:DRemn"; tau is set to 0.
[[nodiscard]] std::vector<Equation> proper_equations(const StructureFunctions& sf);

[[nodiscard]] ResidualReport conformal_residuals(const StructureFunctions& sf, const ResidualOptions& opt = {});
[[nodiscard]] ResidualReport standard_residuals(const StructureFunctions& sf, const ResidualOptions& opt = {});
[[nodiscard]] ResidualReport flat_residuals(const StructureFunctions& sf, const ResidualOptions& opt = {});
// Throws NotProper if tau_from(sf) exceeds gate_tol on the grid.
[[nodiscard]] ResidualReport proper_residuals(const StructureFunctions& sf, const ResidualOptions& opt = {},
                                              double gate_tol = 1e-9);

[[nodiscard]] bool is_standard_gauge(const StructureFunctions& sf, double tol = 1e-12);

// The Remn component F (zero on proper systems) and its total derivatives
// along zbar and z with every derivative of s, xi, t_z replaced through the
// proper prolongation.
[[nodiscard]] Field remn_component(const StructureFunctions& sf);
[[nodiscard]] std::pair<Field, Field> dremn_components(const StructureFunctions& sf);

// Coefficients of the second Wilczynski system
//   1/2 d_zbar V_{,zz} = q11 V_z + q12 V_zbar + gamma1 V + t_z V_{z zbar}
// and its conjugate (q22 = q11, q21 = conj q12, gamma2 = conj gamma1).
struct SecondProlongationCoefficients {
    Field q11;
    Field q12;
    Field q21;
    Field q22;
    Field gamma1;
    Field gamma2;
};
[[nodiscard]] SecondProlongationCoefficients second_prolongation(const StructureFunctions& sf, const Field& tau);

// "W1", "W1c", "W2", "W2c"
[[nodiscard]] std::vector<Equation> wilczynski_equations(const StructureFunctions& sf, const Field& V,
                                                         bool proper = false);
[[nodiscard]] ResidualReport wilczynski_residual(const StructureFunctions& sf, const Field& V, bool proper = false,
                                                 const ResidualOptions& opt = {});

// d(C dV + rho V) for C = phi^4 (c1 dz^2 + c2 dzbar^2), as the dz^dzbar coefficient.
[[nodiscard]] Field bertrand_darboux_residual(const ConformalChart& chart, const Field& c1, const Field& c2,
                                              const Field& V);
// d(K dV) for a proper Killing tensor with covariant components K_zz, K_zzbar.
[[nodiscard]] Field bertrand_darboux_killing(const ConformalChart& chart, const Field& kzz, const Field& kzw,
                                             const Field& V);

// Two-dimensional algebraic identities at a point, evaluated on random data.
struct IdentitySample {
    double phi = 1.0;
    cplx s{};
    cplx zeta{};
    cplx dxi_z{};     // nabla_z Xi_zz
    cplx dxi_zbar{};  // nabla_zbar Xi_zz
};
// "S-identity", "Z-identity", "gZ-identity", "SZ-identity", "hookZ-identity".
// hook_coefficient is the factor in front of the symmetrized trace term.
[[nodiscard]] std::map<std::string, double> tensor_identity_residuals(const IdentitySample& d,
                                                                      double hook_coefficient = 1.0);
[[nodiscard]] ResidualReport tensor_identity_check(unsigned seed, int draws);

}  // namespace superint

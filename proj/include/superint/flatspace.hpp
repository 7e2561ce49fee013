#pragma once

#include "superint/reconstruct.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace superint {

class NotFlatGauge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Proper flat systems in the D/A/B/C form of the Euclidean classification:
//   (2/3) V_{,zz} = -(D_z/D) V_z + (A_z/D) V_zbar,  D = exp(-4t/3).
struct FlatCorrespondence {
    Field D;
    Field Az;
    Field Bw;
    Field beta;  // D s, antiholomorphic
    Field C11, C12, C21, C22;
    Field C211, C122;
    Domain domain;
};

// A_z = (4/3) D s: the factor that makes A_{z zbar} = D_zz hold.
inline constexpr double az_factor = 4.0 / 3.0;

// Needs sf.t; throws NotFlatGauge if phi != 1 and NotProper if tau does not
// vanish on the grid.
[[nodiscard]] FlatCorrespondence build_correspondence(const StructureFunctions& sf, double gate_tol = 1e-9);
// Hand-built data: D and A_z given, B_w = conj(A_z), beta = 3 A_z / 4.
[[nodiscard]] FlatCorrespondence correspondence_from(const Field& D, const Field& Az, Domain domain = {});

// "D3z", "D3w", "D2z2w", "Azz", "Azw-Dzz", "Bzw-Dww", "Bww"
[[nodiscard]] std::vector<Equation> obstruction_equations(const FlatCorrespondence& fc);
[[nodiscard]] ResidualReport obstruction_residuals(const FlatCorrespondence& fc, const ResidualOptions& opt = {});
// max |d_z beta| over the grid.
[[nodiscard]] double holomorphy_check(const FlatCorrespondence& fc);
// (2/3) Hess(V)_zz - (-(D_z/D) V_z + (A_z/D) V_zbar).
[[nodiscard]] Field correspondence_consistency(const FlatCorrespondence& fc, const Field& V);

// Least-squares fit of sum_{a,b<=2} c_ab (z-z0)^a (zbar-z0bar)^b.
struct BiquadraticFit {
    cplx center{};
    std::array<std::array<cplx, 3>, 3> coeffs{};
    double residual = 0.0;
    [[nodiscard]] cplx eval(cplx z) const;
};
[[nodiscard]] BiquadraticFit fit_biquadratic(const std::vector<cplx>& z, const std::vector<double>& values, cplx center);

// Closed-form proper flat structure from an admissible seed at base: D is
// its bi-quadratic Taylor polynomial, beta = s0 + (3/4) int D_zz dzbar.
[[nodiscard]] StructureFunctions proper_flat_structure(const ProperFlatSeed& seed, Domain domain, ChartPoint base);

// Structure data propagated from the seed to every grid point, with the
// obstruction jets evaluated on the propagated states.
struct PropagatedObstructions {
    double d3z = 0.0;
    double d3w = 0.0;
    double d2z2w = 0.0;
    double fit_residual = 0.0;
    double taylor_mismatch = 0.0;  // max |D - Taylor polynomial|
    double algebraic = 0.0;        // max of Remn, DRemn along the flow
    int points = 0;
};
[[nodiscard]] PropagatedObstructions propagated_obstructions(const ProperFlatSeed& seed, const Domain& grid,
                                                             ChartPoint base, const IntegratorOptions& opt = {});

}  // namespace superint

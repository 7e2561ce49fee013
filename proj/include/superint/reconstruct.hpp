#pragma once

#include "superint/integrability.hpp"

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace superint {

class StepFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainExit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SeedObstruction : public std::runtime_error {
public:
    SeedObstruction(double remn, double dremn);
    [[nodiscard]] double remn() const { return remn_; }
    [[nodiscard]] double dremn() const { return dremn_; }

private:
    double remn_;
    double dremn_;
};

// Piecewise-linear chart path.
struct ChartPath {
    std::vector<cplx> vertices;

    [[nodiscard]] static ChartPath straight(cplx a, cplx b) { return {{a, b}}; }
    [[nodiscard]] double length() const;
};

// n L-shaped and staircase variants from a to b; the first two enclose the
// rectangle spanned by a and b.
[[nodiscard]] std::vector<ChartPath> path_fan(cplx a, cplx b, int n = 4);

struct IntegratorOptions {
    double tol = 1e-10;  // local error per unit length
    double h0 = 0.05;
    double hmin = 1e-9;
    long max_steps = 1000000;
    bool check_domain = true;
    bool check_preconditions = true;
    double precondition_tol = 1e-6;
};

// Step-doubling RK4 along a path; rhs(z, y, dz) returns dy/dsigma for unit
// direction dz. Every accepted step is recorded.
struct Trajectory {
    std::vector<double> sigma;
    std::vector<cplx> z;
    std::vector<std::vector<cplx>> y;
    std::vector<std::string> warnings;

    [[nodiscard]] const std::vector<cplx>& end() const { return y.back(); }
};

using PathRhs = std::function<std::vector<cplx>(cplx z, const std::vector<cplx>& y, cplx dz)>;
[[nodiscard]] Trajectory integrate_along(const PathRhs& rhs, std::vector<cplx> y0, const ChartPath& path,
                                         const IntegratorOptions& opt = {});

enum class TauMode { conformal, proper };

struct PotentialSeed {
    double V0 = 0.0;
    cplx Vz0{};
    double DeltaV0 = 0.0;
};

// Samples carry (V, V_z, V_zbar, Laplacian V).
[[nodiscard]] Trajectory integrate_potential(const StructureFunctions& sf, TauMode mode, const PotentialSeed& seed,
                                             const ChartPath& path, const IntegratorOptions& opt = {});

struct KillingSeed {
    cplx c1{};
    cplx c2{};
};

// Samples carry (c1, c2) of C = phi^4 (c1 dz^2 + c2 dzbar^2).
[[nodiscard]] Trajectory integrate_killing(const StructureFunctions& sf, const KillingSeed& seed,
                                           const ChartPath& path, const IntegratorOptions& opt = {});
// |d_z c1| and |d_zbar c2| at the end of a straight path, by central
// differences of re-integrated neighbouring endpoints.
[[nodiscard]] double killing_holomorphy_defect(const StructureFunctions& sf, const KillingSeed& seed, cplx target,
                                               double h = 1e-3, const IntegratorOptions& opt = {});

struct ProperFlatSeed {
    cplx s{};
    cplx xi{};
    cplx tz{};
};

struct AlgebraicResiduals {
    double remn = 0.0;
    double dremn = 0.0;
};
[[nodiscard]] AlgebraicResiduals proper_flat_algebraic(const ProperFlatSeed& v);

// Samples carry (s, xi, t_z, t) with t(start) = 0. Throws SeedObstruction if
// the algebraic conditions fail at the seed by more than seed_tol.
[[nodiscard]] Trajectory integrate_structure_proper_flat(const ProperFlatSeed& seed, const ChartPath& path,
                                                         const IntegratorOptions& opt = {}, double seed_tol = 1e-9);

// Admissible seed with the given s and arg(t_z) = theta: xi from Remn, then
// |t_z| by bracketing a root of the remaining real condition.
[[nodiscard]] ProperFlatSeed solve_proper_flat_seed(cplx s, double theta);

// Largest pairwise endpoint distance over a path fan.
[[nodiscard]] double potential_path_independence(const StructureFunctions& sf, TauMode mode, const PotentialSeed& seed,
                                                 cplx target, int n_paths = 4, const IntegratorOptions& opt = {});

// Real 4x4 map from (V0, Re Vz0, Im Vz0, DeltaV0) to the same quantities at
// the target, and its singular values.
struct EndpointMap {
    std::array<std::array<double, 4>, 4> matrix{};
    std::array<double, 4> singular_values{};
    [[nodiscard]] int rank(double tol = 1e-6) const;
};
[[nodiscard]] EndpointMap potential_endpoint_map(const StructureFunctions& sf, TauMode mode, cplx target,
                                                 const IntegratorOptions& opt = {});

struct KillingEndpointMap {
    std::array<std::array<cplx, 2>, 2> matrix{};
    std::array<double, 2> singular_values{};
    [[nodiscard]] int rank(double tol = 1e-6) const;
};
[[nodiscard]] KillingEndpointMap killing_endpoint_map(const StructureFunctions& sf, cplx target,
                                                      const IntegratorOptions& opt = {});

}  // namespace superint

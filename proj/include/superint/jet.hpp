#pragma once

#include "superint/field.hpp"

#include <array>
#include <map>

namespace superint {

// Polynomials in the pointwise values (s, sbar, xi, xibar, t_z, t_zbar) of a
// proper system in flat gauge. Total derivatives replace every first
// derivative through the closed prolongation, so a jet of any order is again
// such a polynomial.
class JetPoly {
public:
    enum Var { s, sb, xi, xib, T, Tb };
    using Monomial = std::array<int, 6>;

    struct Values {
        cplx s{}, xi{}, T{};
    };

    JetPoly() = default;
    JetPoly(cplx c);  // NOLINT(google-explicit-constructor)
    [[nodiscard]] static JetPoly var(Var v);

    [[nodiscard]] JetPoly Dz() const;
    [[nodiscard]] JetPoly Dzbar() const;
    [[nodiscard]] cplx eval(const Values& v) const;
    [[nodiscard]] const std::map<Monomial, cplx>& terms() const { return terms_; }

    friend JetPoly operator+(const JetPoly& a, const JetPoly& b);
    friend JetPoly operator-(const JetPoly& a, const JetPoly& b);
    friend JetPoly operator*(const JetPoly& a, const JetPoly& b);

private:
    std::map<Monomial, cplx> terms_;
    void add(const Monomial& m, cplx c);
};

// The Remn component with R = 0; DRemn is (remn_jet().Dzbar(), remn_jet().Dz()).
[[nodiscard]] JetPoly remn_jet();

// D = exp(-4t/3): the jet D_{z^a zbar^b} equals exp(-4t/3) P_ab; returns P_ab.
[[nodiscard]] JetPoly d_jet(int a, int b);

}  // namespace superint

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace superint {

using cplx = std::complex<double>;

struct ChartPoint {
    double x = 0.0;
    double y = 0.0;

    [[nodiscard]] cplx z() const { return {x, y}; }
    [[nodiscard]] cplx zbar() const { return {x, -y}; }
    [[nodiscard]] static ChartPoint from_z(cplx z) { return {z.real(), z.imag()}; }
};

class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& what, std::string subexpr)
        : std::runtime_error(what + ": " + subexpr), subexpr_(std::move(subexpr)) {}
    [[nodiscard]] const std::string& subexpression() const { return subexpr_; }

private:
    std::string subexpr_;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Var { z, zbar };

namespace detail {
struct Node;
}

// Immutable expression tree over z, zbar, named real constants.
// Construction normalizes: sums and products are flattened, like terms and
// equal bases are merged and children are kept in a canonical order.
class Field {
public:
    Field();
    Field(double c);  // NOLINT(google-explicit-constructor)
    Field(cplx c);    // NOLINT(google-explicit-constructor)

    [[nodiscard]] static Field z();
    [[nodiscard]] static Field zbar();
    [[nodiscard]] static Field x();
    [[nodiscard]] static Field y();
    [[nodiscard]] static Field i();
    [[nodiscard]] static Field param(const std::string& name, double value);

    [[nodiscard]] cplx eval(const ChartPoint& p) const;
    [[nodiscard]] double eval_real(const ChartPoint& p, double tol = 1e-14) const;

    [[nodiscard]] Field d(Var v) const;
    [[nodiscard]] Field wirtinger(Var v, int order) const;
    [[nodiscard]] Field dz() const { return d(Var::z); }
    [[nodiscard]] Field dzbar() const { return d(Var::zbar); }
    [[nodiscard]] Field dx() const;
    [[nodiscard]] Field dy() const;

    [[nodiscard]] Field conj() const;
    [[nodiscard]] bool is_real_tree() const { return conj() == *this; }

    [[nodiscard]] std::optional<cplx> constant_value() const;
    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] bool depends_on(Var v) const;
    [[nodiscard]] std::string str() const;
    [[nodiscard]] std::size_t hash() const;
    [[nodiscard]] std::size_t size() const;

    friend bool operator==(const Field& a, const Field& b);
    friend bool operator!=(const Field& a, const Field& b) { return !(a == b); }
    friend bool operator<(const Field& a, const Field& b);

    friend Field operator+(const Field& a, const Field& b);
    friend Field operator-(const Field& a, const Field& b);
    friend Field operator*(const Field& a, const Field& b);
    friend Field operator/(const Field& a, const Field& b);
    friend Field operator-(const Field& a);
    Field& operator+=(const Field& o) { return *this = *this + o; }
    Field& operator-=(const Field& o) { return *this = *this - o; }
    Field& operator*=(const Field& o) { return *this = *this * o; }

    friend Field pow(const Field& f, int n);
    friend Field exp(const Field& f);
    friend Field log(const Field& f);

    [[nodiscard]] const std::shared_ptr<const detail::Node>& node() const { return node_; }
    explicit Field(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}

private:
    std::shared_ptr<const detail::Node> node_;
};

[[nodiscard]] Field pow(const Field& f, int n);
[[nodiscard]] Field exp(const Field& f);
[[nodiscard]] Field log(const Field& f);
[[nodiscard]] inline Field conj(const Field& f) { return f.conj(); }
[[nodiscard]] inline Field sq(const Field& f) { return f * f; }

// Infix syntax: z, zbar, x, y, i, decimal literals, + - * / ^ (integer
// exponent), exp(), log(), conj(), parentheses and named parameters.
[[nodiscard]] Field parse_field(std::string_view text, const std::map<std::string, double>& params = {});

// Central-difference estimate of a Wirtinger derivative.
[[nodiscard]] cplx fd_probe(const Field& f, const ChartPoint& p, Var v, double h);
// Same with one Richardson step (h and h/2).
[[nodiscard]] cplx fd_probe_richardson(const Field& f, const ChartPoint& p, Var v, double h);

// Several fields evaluated together, sharing common subtrees.
class FieldBatch {
public:
    explicit FieldBatch(std::vector<Field> fields);
    // Throws DomainError naming the offending subexpression.
    [[nodiscard]] std::vector<cplx> eval(const ChartPoint& p) const;
    [[nodiscard]] std::size_t size() const { return roots_.size(); }

private:
    struct Op {
        int kind = 0;
        cplx value;
        int exponent = 0;
        std::vector<std::size_t> args;
        const detail::Node* node = nullptr;
    };
    std::vector<Op> ops_;
    std::vector<std::size_t> roots_;
    std::vector<std::shared_ptr<const detail::Node>> keep_;
};

}  // namespace superint

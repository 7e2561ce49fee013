#include "superint/field.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <unordered_map>

namespace superint {
namespace detail {

enum class Kind : std::uint8_t { Const, Z, Zbar, Param, Add, Mul, Pow, Exp, Log };

using NodeP = std::shared_ptr<const Node>;

struct Node {
    Kind kind = Kind::Const;
    cplx value{0.0, 0.0};
    std::string name;
    int exponent = 0;
    std::vector<NodeP> kids;
    std::size_t hash = 0;
    std::size_t size = 1;
    bool dep_z = false;
    bool dep_zbar = false;
};

}  // namespace detail

namespace {

using detail::Kind;
using detail::Node;
using detail::NodeP;

std::size_t mix(std::size_t h, std::size_t v)
{
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::size_t hash_double(double d)
{
    if (d == 0.0) d = 0.0;
    std::uint64_t bits = 0;
    std::memcpy(&bits, &d, sizeof bits);
    return static_cast<std::size_t>(bits * 0xff51afd7ed558ccdULL);
}

NodeP finish(Node n)
{
    std::size_t h = static_cast<std::size_t>(n.kind) * 1315423911ULL;
    switch (n.kind) {
    case Kind::Const:
        h = mix(h, hash_double(n.value.real()));
        h = mix(h, hash_double(n.value.imag()));
        break;
    case Kind::Param:
        h = mix(h, std::hash<std::string>{}(n.name));
        n.value = {n.value.real(), 0.0};
        break;
    case Kind::Z:
        n.dep_z = true;
        break;
    case Kind::Zbar:
        n.dep_zbar = true;
        break;
    default:
        break;
    }
    if (n.kind == Kind::Pow) h = mix(h, static_cast<std::size_t>(n.exponent + 1000003));
    for (const auto& k : n.kids) {
        h = mix(h, k->hash);
        n.size += k->size;
        n.dep_z = n.dep_z || k->dep_z;
        n.dep_zbar = n.dep_zbar || k->dep_zbar;
    }
    n.hash = h;
    return std::make_shared<const Node>(std::move(n));
}

int compare(const NodeP& a, const NodeP& b);

int compare_kids(const std::vector<NodeP>& a, const std::vector<NodeP>& b)
{
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int c = compare(a[i], b[i]);
        if (c != 0) return c;
    }
    return 0;
}

int compare_double(double a, double b)
{
    if (a == b) return 0;
    return a < b ? -1 : 1;
}

// Total order: kind first, then payload, then children.
int compare(const NodeP& a, const NodeP& b)
{
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    switch (a->kind) {
    case Kind::Const: {
        int c = compare_double(a->value.real(), b->value.real());
        return c != 0 ? c : compare_double(a->value.imag(), b->value.imag());
    }
    case Kind::Z:
    case Kind::Zbar:
        return 0;
    case Kind::Param:
        return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
    case Kind::Pow:
        if (a->exponent != b->exponent) return a->exponent < b->exponent ? -1 : 1;
        return compare(a->kids[0], b->kids[0]);
    default:
        if (a->hash != b->hash && a->size != b->size) return a->size < b->size ? -1 : 1;
        return compare_kids(a->kids, b->kids);
    }
}

bool equal(const NodeP& a, const NodeP& b)
{
    if (a.get() == b.get()) return true;
    if (a->hash != b->hash) return false;
    return compare(a, b) == 0;
}

NodeP make_const(cplx c)
{
    Node n;
    n.kind = Kind::Const;
    n.value = {c.real() == 0.0 ? 0.0 : c.real(), c.imag() == 0.0 ? 0.0 : c.imag()};
    return finish(std::move(n));
}

const NodeP& zero_node()
{
    static const NodeP z = make_const({0.0, 0.0});
    return z;
}

const NodeP& one_node()
{
    static const NodeP o = make_const({1.0, 0.0});
    return o;
}

bool is_const(const NodeP& n) { return n->kind == Kind::Const; }
bool is_const_value(const NodeP& n, cplx v) { return n->kind == Kind::Const && n->value == v; }

cplx ipow(cplx b, int n)
{
    if (n < 0) return cplx(1.0, 0.0) / ipow(b, -n);
    cplx r(1.0, 0.0);
    cplx p = b;
    while (n > 0) {
        if (n & 1) r *= p;
        p *= p;
        n >>= 1;
    }
    return r;
}

NodeP make_add(std::vector<NodeP> terms);
NodeP make_mul(std::vector<NodeP> factors);
NodeP make_pow(const NodeP& base, int n);

// Split a term into numeric coefficient and symbolic key.
std::pair<cplx, NodeP> split_coef(const NodeP& t)
{
    if (is_const(t)) return {t->value, nullptr};
    if (t->kind == Kind::Mul && is_const(t->kids.front())) {
        std::vector<NodeP> rest(t->kids.begin() + 1, t->kids.end());
        if (rest.size() == 1) return {t->kids.front()->value, rest.front()};
        Node n;
        n.kind = Kind::Mul;
        n.kids = std::move(rest);
        return {t->kids.front()->value, finish(std::move(n))};
    }
    return {cplx(1.0, 0.0), t};
}

NodeP make_add(std::vector<NodeP> terms)
{
    std::vector<NodeP> flat;
    flat.reserve(terms.size());
    for (auto& t : terms) {
        if (t->kind == Kind::Add) {
            flat.insert(flat.end(), t->kids.begin(), t->kids.end());
        } else {
            flat.push_back(std::move(t));
        }
    }
    cplx constant(0.0, 0.0);
    std::vector<std::pair<NodeP, cplx>> keyed;
    keyed.reserve(flat.size());
    for (const auto& t : flat) {
        auto [c, key] = split_coef(t);
        if (!key) {
            constant += c;
        } else {
            keyed.emplace_back(key, c);
        }
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
    std::vector<NodeP> out;
    if (constant != cplx(0.0, 0.0)) out.push_back(make_const(constant));
    for (std::size_t i = 0; i < keyed.size();) {
        std::size_t j = i;
        cplx c(0.0, 0.0);
        while (j < keyed.size() && equal(keyed[j].first, keyed[i].first)) {
            c += keyed[j].second;
            ++j;
        }
        if (c != cplx(0.0, 0.0)) {
            if (c == cplx(1.0, 0.0)) {
                out.push_back(keyed[i].first);
            } else {
                out.push_back(make_mul({make_const(c), keyed[i].first}));
            }
        }
        i = j;
    }
    if (out.empty()) return zero_node();
    if (out.size() == 1) return out.front();
    Node n;
    n.kind = Kind::Add;
    n.kids = std::move(out);
    return finish(std::move(n));
}

NodeP make_mul(std::vector<NodeP> factors)
{
    std::vector<NodeP> flat;
    flat.reserve(factors.size());
    for (auto& f : factors) {
        if (f->kind == Kind::Mul) {
            flat.insert(flat.end(), f->kids.begin(), f->kids.end());
        } else {
            flat.push_back(std::move(f));
        }
    }
    cplx coef(1.0, 0.0);
    std::vector<std::pair<NodeP, int>> based;
    based.reserve(flat.size());
    for (const auto& f : flat) {
        if (is_const(f)) {
            coef *= f->value;
        } else if (f->kind == Kind::Pow) {
            based.emplace_back(f->kids.front(), f->exponent);
        } else {
            based.emplace_back(f, 1);
        }
    }
    if (coef == cplx(0.0, 0.0)) return zero_node();
    std::stable_sort(based.begin(), based.end(),
                     [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
    std::vector<NodeP> out;
    for (std::size_t i = 0; i < based.size();) {
        std::size_t j = i;
        int e = 0;
        while (j < based.size() && equal(based[j].first, based[i].first)) {
            e += based[j].second;
            ++j;
        }
        if (e != 0) {
            NodeP p = make_pow(based[i].first, e);
            if (is_const(p)) {
                coef *= p->value;
            } else {
                out.push_back(p);
            }
        }
        i = j;
    }
    if (coef == cplx(0.0, 0.0)) return zero_node();
    if (out.empty()) return make_const(coef);
    if (out.size() == 1 && coef == cplx(1.0, 0.0)) return out.front();
    std::stable_sort(out.begin(), out.end(), [](const NodeP& a, const NodeP& b) { return compare(a, b) < 0; });
    if (coef != cplx(1.0, 0.0)) out.insert(out.begin(), make_const(coef));
    Node n;
    n.kind = Kind::Mul;
    n.kids = std::move(out);
    return finish(std::move(n));
}

NodeP make_exp(const NodeP& f);

NodeP make_pow(const NodeP& base, int n)
{
    if (n == 0) return one_node();
    if (n == 1) return base;
    if (is_const(base)) {
        if (base->value == cplx(0.0, 0.0) && n < 0) {
            throw DomainError("pole", "0^" + std::to_string(n));
        }
        return make_const(ipow(base->value, n));
    }
    if (base->kind == Kind::Pow) return make_pow(base->kids.front(), base->exponent * n);
    if (base->kind == Kind::Mul) {
        std::vector<NodeP> fs;
        fs.reserve(base->kids.size());
        for (const auto& k : base->kids) fs.push_back(make_pow(k, n));
        return make_mul(std::move(fs));
    }
    if (base->kind == Kind::Exp) {
        return make_exp(make_mul({make_const(cplx(n, 0.0)), base->kids.front()}));
    }
    Node node;
    node.kind = Kind::Pow;
    node.exponent = n;
    node.kids = {base};
    return finish(std::move(node));
}

NodeP make_exp(const NodeP& f)
{
    if (is_const(f)) return make_const(std::exp(f->value));
    if (f->kind == Kind::Log) return f->kids.front();
    // exp(n*log g) with integer n folds back to g^n.
    if (f->kind == Kind::Mul && f->kids.size() == 2 && is_const(f->kids[0]) && f->kids[1]->kind == Kind::Log) {
        cplx c = f->kids[0]->value;
        if (c.imag() == 0.0 && std::abs(c.real()) <= 64.0 && c.real() == std::round(c.real())) {
            return make_pow(f->kids[1]->kids.front(), static_cast<int>(c.real()));
        }
    }
    Node n;
    n.kind = Kind::Exp;
    n.kids = {f};
    return finish(std::move(n));
}

NodeP make_log(const NodeP& f)
{
    if (is_const(f)) {
        if (f->value == cplx(0.0, 0.0)) throw DomainError("log of zero", "log(0)");
        return make_const(std::log(f->value));
    }
    Node n;
    n.kind = Kind::Log;
    n.kids = {f};
    return finish(std::move(n));
}

NodeP make_atom(Kind k)
{
    Node n;
    n.kind = k;
    return finish(std::move(n));
}

std::string fmt_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // Prefer the shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            s = buf;
            break;
        }
    }
    return s;
}

std::string fmt_const(cplx c)
{
    if (c.imag() == 0.0) {
        std::string s = fmt_double(c.real());
        return c.real() < 0 ? "(" + s + ")" : s;
    }
    if (c.real() == 0.0) return "(" + fmt_double(c.imag()) + "*i)";
    return "(" + fmt_double(c.real()) + " + " + fmt_double(c.imag()) + "*i)";
}

std::string to_string(const NodeP& n)
{
    switch (n->kind) {
    case Kind::Const:
        return fmt_const(n->value);
    case Kind::Z:
        return "z";
    case Kind::Zbar:
        return "zbar";
    case Kind::Param:
        return n->name;
    case Kind::Add: {
        std::string s = "(";
        for (std::size_t i = 0; i < n->kids.size(); ++i) {
            if (i) s += " + ";
            s += to_string(n->kids[i]);
        }
        return s + ")";
    }
    case Kind::Mul: {
        std::string s;
        for (std::size_t i = 0; i < n->kids.size(); ++i) {
            if (i) s += "*";
            s += to_string(n->kids[i]);
        }
        return s;
    }
    case Kind::Pow: {
        const auto& b = n->kids.front();
        std::string bs = to_string(b);
        if (b->kind == Kind::Mul) bs = "(" + bs + ")";
        return bs + "^" + (n->exponent < 0 ? "(" + std::to_string(n->exponent) + ")" : std::to_string(n->exponent));
    }
    case Kind::Exp:
        return "exp(" + to_string(n->kids.front()) + ")";
    case Kind::Log:
        return "log(" + to_string(n->kids.front()) + ")";
    }
    return "?";
}

using Memo = std::unordered_map<const Node*, NodeP>;

NodeP derive(const NodeP& n, Var v, Memo& memo)
{
    const bool dep = v == Var::z ? n->dep_z : n->dep_zbar;
    if (!dep) return zero_node();
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    NodeP out;
    switch (n->kind) {
    case Kind::Z:
    case Kind::Zbar:
        out = one_node();
        break;
    case Kind::Add: {
        std::vector<NodeP> ts;
        for (const auto& k : n->kids) ts.push_back(derive(k, v, memo));
        out = make_add(std::move(ts));
        break;
    }
    case Kind::Mul: {
        std::vector<NodeP> ts;
        for (std::size_t i = 0; i < n->kids.size(); ++i) {
            NodeP di = derive(n->kids[i], v, memo);
            if (is_const_value(di, cplx(0.0, 0.0))) continue;
            std::vector<NodeP> fs;
            fs.reserve(n->kids.size());
            for (std::size_t j = 0; j < n->kids.size(); ++j) fs.push_back(j == i ? di : n->kids[j]);
            ts.push_back(make_mul(std::move(fs)));
        }
        out = make_add(std::move(ts));
        break;
    }
    case Kind::Pow: {
        const auto& b = n->kids.front();
        out = make_mul({make_const(cplx(n->exponent, 0.0)), make_pow(b, n->exponent - 1), derive(b, v, memo)});
        break;
    }
    case Kind::Exp:
        out = make_mul({n, derive(n->kids.front(), v, memo)});
        break;
    case Kind::Log:
        out = make_mul({derive(n->kids.front(), v, memo), make_pow(n->kids.front(), -1)});
        break;
    default:
        out = zero_node();
    }
    memo.emplace(n.get(), out);
    return out;
}

NodeP conj_node(const NodeP& n, Memo& memo)
{
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    NodeP out;
    switch (n->kind) {
    case Kind::Const:
        out = n->value.imag() == 0.0 ? n : make_const(std::conj(n->value));
        break;
    case Kind::Z:
        out = make_atom(Kind::Zbar);
        break;
    case Kind::Zbar:
        out = make_atom(Kind::Z);
        break;
    case Kind::Param:
        out = n;
        break;
    case Kind::Add: {
        std::vector<NodeP> ts;
        for (const auto& k : n->kids) ts.push_back(conj_node(k, memo));
        out = make_add(std::move(ts));
        break;
    }
    case Kind::Mul: {
        std::vector<NodeP> ts;
        for (const auto& k : n->kids) ts.push_back(conj_node(k, memo));
        out = make_mul(std::move(ts));
        break;
    }
    case Kind::Pow:
        out = make_pow(conj_node(n->kids.front(), memo), n->exponent);
        break;
    case Kind::Exp:
        out = make_exp(conj_node(n->kids.front(), memo));
        break;
    case Kind::Log:
        out = make_log(conj_node(n->kids.front(), memo));
        break;
    }
    memo.emplace(n.get(), out);
    return out;
}

void check_finite(cplx v, const NodeP& n)
{
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("non-finite value", to_string(n));
}

cplx eval_node(const NodeP& n, const ChartPoint& p, std::unordered_map<const Node*, cplx>& memo)
{
    switch (n->kind) {
    case Kind::Const:
    case Kind::Param:
        return n->value;
    case Kind::Z:
        return p.z();
    case Kind::Zbar:
        return p.zbar();
    default:
        break;
    }
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    cplx v;
    switch (n->kind) {
    case Kind::Add:
        v = 0.0;
        for (const auto& k : n->kids) v += eval_node(k, p, memo);
        break;
    case Kind::Mul:
        v = 1.0;
        for (const auto& k : n->kids) v *= eval_node(k, p, memo);
        break;
    case Kind::Pow: {
        cplx b = eval_node(n->kids.front(), p, memo);
        if (n->exponent < 0 && b == cplx(0.0, 0.0)) throw DomainError("pole", to_string(n));
        v = ipow(b, n->exponent);
        break;
    }
    case Kind::Exp:
        v = std::exp(eval_node(n->kids.front(), p, memo));
        break;
    case Kind::Log: {
        cplx a = eval_node(n->kids.front(), p, memo);
        if (a == cplx(0.0, 0.0)) throw DomainError("log of zero", to_string(n));
        v = std::log(a);
        break;
    }
    default:
        v = 0.0;
    }
    check_finite(v, n);
    memo.emplace(n.get(), v);
    return v;
}

}  // namespace

Field::Field() : node_(zero_node()) {}
Field::Field(double c) : node_(make_const({c, 0.0})) {}
Field::Field(cplx c) : node_(make_const(c)) {}

Field Field::z() { return Field(make_atom(Kind::Z)); }
Field Field::zbar() { return Field(make_atom(Kind::Zbar)); }
Field Field::i() { return Field(cplx(0.0, 1.0)); }
Field Field::x() { return (z() + zbar()) * Field(0.5); }
Field Field::y() { return (z() - zbar()) * Field(cplx(0.0, -0.5)); }

Field Field::param(const std::string& name, double value)
{
    Node n;
    n.kind = Kind::Param;
    n.name = name;
    n.value = {value, 0.0};
    return Field(finish(std::move(n)));
}

cplx Field::eval(const ChartPoint& p) const
{
    std::unordered_map<const Node*, cplx> memo;
    return eval_node(node_, p, memo);
}

double Field::eval_real(const ChartPoint& p, double tol) const
{
    cplx v = eval(p);
    if (std::abs(v.imag()) > tol * (1.0 + std::abs(v))) {
        throw DomainError("real-valued field has imaginary part " + fmt_double(v.imag()), to_string(node_));
    }
    return v.real();
}

Field Field::d(Var v) const
{
    Memo memo;
    return Field(derive(node_, v, memo));
}

Field Field::wirtinger(Var v, int order) const
{
    if (order < 1 || order > 4) throw std::invalid_argument("wirtinger order must be in 1..4");
    Field f = *this;
    for (int k = 0; k < order; ++k) f = f.d(v);
    return f;
}

Field Field::dx() const { return d(Var::z) + d(Var::zbar); }
Field Field::dy() const { return Field::i() * (d(Var::z) - d(Var::zbar)); }

Field Field::conj() const
{
    Memo memo;
    return Field(conj_node(node_, memo));
}

std::optional<cplx> Field::constant_value() const
{
    if (node_->kind == Kind::Const) return node_->value;
    return std::nullopt;
}

bool Field::is_zero() const { return is_const_value(node_, cplx(0.0, 0.0)); }
bool Field::depends_on(Var v) const { return v == Var::z ? node_->dep_z : node_->dep_zbar; }
std::string Field::str() const { return to_string(node_); }
std::size_t Field::hash() const { return node_->hash; }
std::size_t Field::size() const { return node_->size; }

bool operator==(const Field& a, const Field& b) { return equal(a.node_, b.node_); }
bool operator<(const Field& a, const Field& b) { return compare(a.node_, b.node_) < 0; }

Field operator+(const Field& a, const Field& b) { return Field(make_add({a.node_, b.node_})); }
Field operator-(const Field& a, const Field& b)
{
    return Field(make_add({a.node_, make_mul({make_const(-1.0), b.node_})}));
}
Field operator*(const Field& a, const Field& b) { return Field(make_mul({a.node_, b.node_})); }
Field operator/(const Field& a, const Field& b) { return Field(make_mul({a.node_, make_pow(b.node_, -1)})); }
Field operator-(const Field& a) { return Field(make_mul({make_const(-1.0), a.node_})); }

Field pow(const Field& f, int n) { return Field(make_pow(f.node_, n)); }
Field exp(const Field& f) { return Field(make_exp(f.node_)); }
Field log(const Field& f) { return Field(make_log(f.node_)); }

cplx fd_probe(const Field& f, const ChartPoint& p, Var v, double h)
{
    if (!(h > 0.0)) throw std::invalid_argument("fd_probe needs h > 0");
    cplx fx = (f.eval({p.x + h, p.y}) - f.eval({p.x - h, p.y})) / (2.0 * h);
    cplx fy = (f.eval({p.x, p.y + h}) - f.eval({p.x, p.y - h})) / (2.0 * h);
    const cplx i(0.0, 1.0);
    return v == Var::z ? 0.5 * (fx - i * fy) : 0.5 * (fx + i * fy);
}

cplx fd_probe_richardson(const Field& f, const ChartPoint& p, Var v, double h)
{
    cplx a = fd_probe(f, p, v, h);
    cplx b = fd_probe(f, p, v, h / 2.0);
    return (4.0 * b - a) / 3.0;
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
public:
    Parser(std::string_view s, const std::map<std::string, double>& params) : s_(s), params_(params) {}

    Field parse()
    {
        Field f = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return f;
    }

private:
    std::string_view s_;
    const std::map<std::string, double>& params_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError("field syntax error at " + std::to_string(pos_) + ": " + msg + " in \"" + std::string(s_) + "\"");
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Field expr()
    {
        Field f = term();
        for (;;) {
            if (accept('+')) {
                f = f + term();
            } else if (accept('-')) {
                f = f - term();
            } else {
                return f;
            }
        }
    }

    Field term()
    {
        Field f = unary();
        for (;;) {
            if (accept('*')) {
                f = f * unary();
            } else if (accept('/')) {
                Field g = unary();
                if (g.is_zero()) fail("division by literal zero");
                f = f / g;
            } else {
                return f;
            }
        }
    }

    Field unary()
    {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return postfix();
    }

    int exponent()
    {
        skip();
        bool paren = accept('(');
        int sign = 1;
        if (accept('-')) sign = -1;
        else accept('+');
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("integer exponent expected");
        int n = std::stoi(std::string(s_.substr(start, pos_ - start)));
        if (paren && !accept(')')) fail("')' expected");
        return sign * n;
    }

    Field postfix()
    {
        Field f = primary();
        if (accept('^')) {
            int n = exponent();
            if (f.is_zero() && n < 0) fail("negative power of zero");
            f = pow(f, n);
        }
        return f;
    }

    Field primary()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Field f = expr();
            if (!accept(')')) fail("')' expected");
            return f;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string id(s_.substr(start, pos_ - start));
            if (id == "exp" || id == "log" || id == "conj") {
                if (!accept('(')) fail("'(' expected after " + id);
                Field a = expr();
                if (!accept(')')) fail("')' expected");
                if (id == "exp") return exp(a);
                if (id == "log") {
                    if (a.is_zero()) fail("log of literal zero");
                    return log(a);
                }
                return a.conj();
            }
            if (id == "z") return Field::z();
            if (id == "zbar") return Field::zbar();
            if (id == "x") return Field::x();
            if (id == "y") return Field::y();
            if (id == "i" || id == "I") return Field::i();
            if (auto it = params_.find(id); it != params_.end()) return Field::param(id, it->second);
            fail("unknown identifier '" + id + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Field number()
    {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        std::string tok(s_.substr(start, pos_ - start));
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') fail("bad number '" + tok + "'");
        return Field(v);
    }
};

}  // namespace

Field parse_field(std::string_view text, const std::map<std::string, double>& params)
{
    try {
        return Parser(text, params).parse();
    } catch (const DomainError& e) {
        throw ParseError(std::string("field syntax error: ") + e.what());
    }
}

// ---------------------------------------------------------------- batch

FieldBatch::FieldBatch(std::vector<Field> fields)
{
    std::unordered_map<const Node*, std::size_t> index;
    std::unordered_map<std::size_t, std::vector<std::pair<NodeP, std::size_t>>> by_hash;
    std::function<std::size_t(const NodeP&)> visit = [&](const NodeP& n) -> std::size_t {
        if (auto it = index.find(n.get()); it != index.end()) return it->second;
        for (const auto& [other, idx] : by_hash[n->hash]) {
            if (equal(other, n)) {
                index.emplace(n.get(), idx);
                return idx;
            }
        }
        Op op;
        op.kind = static_cast<int>(n->kind);
        op.value = n->value;
        op.exponent = n->exponent;
        op.node = n.get();
        for (const auto& k : n->kids) op.args.push_back(visit(k));
        std::size_t idx = ops_.size();
        ops_.push_back(std::move(op));
        index.emplace(n.get(), idx);
        by_hash[n->hash].emplace_back(n, idx);
        keep_.push_back(n);
        return idx;
    };
    for (const auto& f : fields) roots_.push_back(visit(f.node()));
}

std::vector<cplx> FieldBatch::eval(const ChartPoint& p) const
{
    std::vector<cplx> v(ops_.size());
    auto node_str = [&](std::size_t k) {
        for (const auto& n : keep_) {
            if (n.get() == ops_[k].node) return to_string(n);
        }
        return std::string("?");
    };
    for (std::size_t k = 0; k < ops_.size(); ++k) {
        const Op& op = ops_[k];
        cplx r;
        switch (static_cast<Kind>(op.kind)) {
        case Kind::Const:
        case Kind::Param:
            r = op.value;
            break;
        case Kind::Z:
            r = p.z();
            break;
        case Kind::Zbar:
            r = p.zbar();
            break;
        case Kind::Add:
            r = 0.0;
            for (auto a : op.args) r += v[a];
            break;
        case Kind::Mul:
            r = 1.0;
            for (auto a : op.args) r *= v[a];
            break;
        case Kind::Pow:
            if (op.exponent < 0 && v[op.args[0]] == cplx(0.0, 0.0)) throw DomainError("pole", node_str(k));
            r = ipow(v[op.args[0]], op.exponent);
            break;
        case Kind::Exp:
            r = std::exp(v[op.args[0]]);
            break;
        case Kind::Log:
            if (v[op.args[0]] == cplx(0.0, 0.0)) throw DomainError("log of zero", node_str(k));
            r = std::log(v[op.args[0]]);
            break;
        }
        if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) throw DomainError("non-finite value", node_str(k));
        v[k] = r;
    }
    std::vector<cplx> out;
    out.reserve(roots_.size());
    for (auto r : roots_) out.push_back(v[r]);
    return out;
}

}  // namespace superint

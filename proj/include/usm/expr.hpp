#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "usm/rational.hpp"

namespace usm {

enum class Kind : uint8_t {
    Constant,      // exact rational
    ImaginaryUnit, // i
    Pi,
    Variable,
    Sum,
    Product,
    Power,         // base^w, w a Gaussian rational
    Call,          // unary function application
    AbsoluteValue,
};

enum class Fn : uint8_t {
    Exp, Ln, Sin, Cos, Tan, Sec, Csc,
    Asin, Acos, Atan, Asec, Acsc, Asinh,
    Sinh, Cosh, Tanh,
};

const char* fn_name(Fn f);
std::optional<Fn> fn_from_name(std::string_view name);

class Expr;
namespace detail {
struct Node {
    Kind kind;
    Fn fn = Fn::Exp;
    Rational value;            // Constant
    GaussianRational exponent; // Power
    std::string name;          // Variable
    std::vector<Expr> kids;    // Sum/Product terms, Power base, Call/Abs argument
    std::size_t hash = 0;
    Rational degree;           // total degree used for canonical ordering
    std::string repr;          // canonical printed form
};
} // namespace detail

// Immutable expression tree. Construction normalizes: sums and products are
// flattened and canonically sorted, rational constants are merged, like sum
// terms are collected, equal product bases have their exponents added, and
// trivial powers fold. Values may be freely shared across threads.
class Expr {
public:
    Expr(); // zero

    static Expr constant(Rational r);
    static Expr integer(long long v);
    static Expr imaginary();
    static Expr pi();
    static Expr variable(std::string name);
    static Expr sum(std::vector<Expr> terms);
    static Expr product(std::vector<Expr> factors);
    static Expr power(Expr base, GaussianRational e);
    static Expr sqrt(Expr e) { return power(std::move(e), GaussianRational(Rational(1, 2))); }
    static Expr call(Fn f, Expr arg);
    static Expr abs(Expr arg);

    Kind kind() const { return p_->kind; }
    Fn fn() const { return p_->fn; }
    const Rational& value() const { return p_->value; }
    const GaussianRational& exponent() const { return p_->exponent; }
    const std::string& name() const { return p_->name; }
    const std::vector<Expr>& children() const { return p_->kids; }
    const Expr& base() const { return p_->kids[0]; }
    const Expr& arg() const { return p_->kids[0]; }

    bool is_constant(const Rational& r) const { return kind() == Kind::Constant && value() == r; }
    bool is_zero() const { return kind() == Kind::Constant && value().is_zero(); }
    bool is_one() const { return kind() == Kind::Constant && value().is_one(); }
    // True when no Variable occurs anywhere in the tree.
    bool is_number() const;

    std::size_t hash() const { return p_->hash; }
    const Rational& degree() const { return p_->degree; }
    // Canonical printed form; parse(str()) reproduces the tree.
    const std::string& str() const { return p_->repr; }

    bool operator==(const Expr& o) const;
    bool operator!=(const Expr& o) const { return !(*this == o); }

    bool contains(const std::string& var) const;
    void collect_variables(std::set<std::string>& out) const;
    std::set<std::string> variables() const;

    Expr substitute(const std::string& var, const Expr& replacement) const;

    // Exact value when the tree is built from rationals and i with +,*,^.
    std::optional<GaussianRational> as_gaussian() const;
    // Exact rational evaluation (no Pi, no Calls; powers need exact roots).
    std::optional<Rational> eval_exact(const std::map<std::string, Rational>& bind) const;

private:
    std::shared_ptr<const detail::Node> p_;
    explicit Expr(std::shared_ptr<const detail::Node> p) : p_(std::move(p)) {}
    static Expr finish(detail::Node n);
    friend struct detail::Node;
};

inline Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
inline Expr operator-(const Expr& a) { return Expr::product({Expr::integer(-1), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
inline Expr operator/(const Expr& a, const Expr& b) {
    return a * Expr::power(b, GaussianRational(Rational(-1)));
}

inline Expr rat(long long n, long long d = 1) { return Expr::constant(Rational(n, d)); }

} // namespace usm

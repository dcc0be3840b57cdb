#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "usm/expr.hpp"

namespace usm {

// Dense univariate polynomial over the rationals, coefficients ascending by
// degree, no trailing zeros (zero polynomial has an empty coefficient list).
class Poly {
public:
    Poly() = default;
    explicit Poly(Rational c);
    explicit Poly(std::vector<Rational> coeffs);
    static Poly x();
    static Poly monomial(Rational c, std::size_t deg);

    bool is_zero() const { return c_.empty(); }
    // degree of the zero polynomial reported as -1
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    const Rational& lead() const;
    bool is_constant() const { return c_.size() <= 1; }

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly operator-() const;
    Poly scale(const Rational& k) const;
    bool operator==(const Poly& o) const { return c_ == o.c_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    static void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r);
    friend Poly operator/(const Poly& a, const Poly& b);
    friend Poly operator%(const Poly& a, const Poly& b);
    // gcd, monic; computed on integer primitive parts to curb coefficient
    // growth.
    static Poly gcd(const Poly& a, const Poly& b);
    // g = gcd(a,b) together with s,t such that s*a + t*b = g.
    static Poly ext_gcd(const Poly& a, const Poly& b, Poly& s, Poly& t);

    Poly derivative() const;
    Poly monic() const;
    Poly pow(unsigned e) const;

    Rational eval(const Rational& x) const;
    double eval(double x) const;
    std::complex<double> eval(std::complex<double> x) const;

    // Yun square-free decomposition: pairs (factor, multiplicity) with
    // distinct square-free factors; the product of factor^multiplicity times
    // a constant reproduces the input.
    std::vector<std::pair<Poly, int>> squarefree() const;

    Expr to_expr(const std::string& var) const;
    std::string to_string(const std::string& var) const;

private:
    std::vector<Rational> c_;
    void trim();
};

// Reads a polynomial in `var` out of an expression tree (sums, products,
// non-negative integer powers); any other variable or non-polynomial
// construct yields nullopt.
std::optional<Poly> expr_to_poly(const Expr& e, const std::string& var);

// Reads num/den where integer powers may be negative; nullopt when the
// expression is not a ratio of polynomials in var (radical, call, foreign
// variable). The result is not reduced.
struct PolyFraction {
    Poly num;
    Poly den;
};
std::optional<PolyFraction> expr_to_fraction(const Expr& e, const std::string& var);

// Linear a*x + b -> (a, b).
std::optional<std::pair<Rational, Rational>> linear_coeffs(const Expr& e, const std::string& var);

} // namespace usm

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "usm/expr.hpp"
#include "usm/polynomial.hpp"

namespace usm::ratint {

// Reduced ratio of polynomials: monic denominator, gcd(num, den) = 1.
struct RationalFunction {
    Poly num;
    Poly den;
    std::string var;
};

// Throws TablePath when the expression contains a half-integer power of a
// polynomial in the parameter (route to integrate_table), NotRational for
// anything else non-rational.
RationalFunction to_rational_function(const Expr& e, const std::string& param);

struct Term {
    enum class Tag {
        Power,         // coeff * body^exponent, exponent != 0, -1 never produced
        LogAbs,        // coeff * ln|body|
        Arctan,        // coeff * atan(body)
        TableSqrt,     // coeff * sqrt(param^2 + 1)
        TableLogRatio, // coeff * ln|(p + sqrt(p^2+1) - 1)/(p + sqrt(p^2+1) + 1)|
        Opaque,        // coeff * body (reduction leftovers, chained results)
    };
    Tag tag;
    Expr coeff; // variable-free
    Expr body;
    GaussianRational exponent; // Power only

    Expr to_expr(const std::string& param) const;
};

struct ParamAntiderivative {
    std::string param;
    std::vector<Term> terms;
    std::optional<Expr> remainder; // unintegrated part, absent when done

    Expr to_expr() const; // requires empty remainder
    bool complete() const { return !remainder.has_value(); }
};

// Exposed decomposition layer: poly part, proper pieces numerator/factor^power
// with factors irreducible over the rationals, plus an unfactorable leftover
// (bad_den == 1 when none). Re-summing reproduces the input exactly.
struct PartialFractions {
    Poly poly_part;
    struct Piece {
        Poly numerator; // deg < deg factor
        Poly factor;    // monic irreducible
        int power;
    };
    std::vector<Piece> pieces;
    Poly bad_num;
    Poly bad_den;
};

PartialFractions partial_fractions(const RationalFunction& f);

// Polynomial and Laurent parts termwise; proper part by square-free
// factorization, rational root extraction and quadratic splitting. Factors of
// degree >= 3 that resist splitting go to the remainder.
ParamAntiderivative integrate_rational(const RationalFunction& f);

// Generalized Laurent sum c_j * param^(w_j) with Gaussian rational exponents;
// nullopt when the expression is not of this shape.
std::optional<ParamAntiderivative> integrate_laurent(const Expr& e, const std::string& param);

// Fixed two-entry table for the sqrt(param^2+1) shapes. sign carries the
// parameter's sign on the domain (0 unknown). Off-table shapes land in the
// remainder.
ParamAntiderivative integrate_table(const Expr& e, const std::string& param, int sign = 0);

} // namespace usm::ratint

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "usm/expr.hpp"
#include "usm/interval.hpp"
#include "usm/polynomial.hpp"
#include "usm/ratint.hpp"
#include "usm/transforms.hpp"

namespace usm::backsub {

// D_n(y) = (y - w)^n - (y + w)^n with w = sqrt(y^2 - 1):
//   -2 * sum_j C(n, 2j+1) y^(n-2j-1) (y^2-1)^(j + 1/2)
// The radical appears only through half-integer powers of y^2 - 1, i.e. one
// first-power radical with the even part folded into (y^2-1)^j.
Expr binomial_difference(int n, const Expr& y);

// +1 on the y >= 1 component, -1 on y <= -1.
int branch_sigma(transforms::Branch b);

// Rewrites every exact pair c*param^n - c*param^-n in the normalized sum as
// c * sigma * D_n(y); everything else is left untouched.
Expr collapse_reciprocal_powers(const Expr& e, const std::string& param,
                                transforms::Branch branch, const Expr& y);

// Piecewise antiderivative in the original variable; each piece is valid up
// to an additive constant on its interval.
struct Antiderivative {
    std::vector<std::pair<Interval, Expr>> pieces;
};

// Substitutes param(x) piece by piece, collapsing reciprocal differences
// first (kinds 1-2) and dropping |.| inside ln where the piece fixes the
// argument's sign.
Antiderivative back_substitute(const ratint::ParamAntiderivative& pa,
                               const transforms::SubstitutionMap& m);

// Writes e as A(y) + B(y) * sqrt(S(y)) with polynomial A, B; nullopt when e
// is not of that form. Used to compare radical expressions exactly.
std::optional<std::pair<Poly, Poly>> radical_split(const Expr& e, const std::string& var,
                                                   const Poly& radicand);

} // namespace usm::backsub

#pragma once

#include "usm/expr.hpp"

namespace usm {

// Fixed, terminating rewrite pass:
//   - exact constant folding, including radical constants (sqrt(12) -> 2*sqrt(3),
//     (1/2)^(-1/2) -> sqrt(2), conjugate rationalization of a +- b*sqrt(m))
//   - same-base power merging and integer-power distribution (construction rules)
//   - single-variable products/powers of polynomials collect into a reduced
//     numerator/denominator pair; a monomial denominator distributes into a
//     Laurent sum
//   - integer powers (2..8) of two-term sums expand
// Sums are never recombined over a common denominator, so partial-fraction
// shapes survive simplification.
Expr simplify(const Expr& e);

// simplify with a sign assumption for one variable on the evaluation domain;
// enables positivity-guarded rules such as (u*v)^w -> u^w * v^w for u > 0.
// sign > 0 means var > 0, sign < 0 means var < 0.
Expr simplify_in_domain(const Expr& e, const std::string& var, int sign);

// simplify for back-substituted pieces: powers of radical binomials stay
// unexpanded, since (x - sqrt(x^2-1))^n expanded cancels catastrophically
// for large |x| and ruins the numerical derivative check.
Expr simplify_piece(const Expr& e, const std::string& var, int sign);

// Full distribution of products and integer powers over sums (bounded); used
// to decompose parameter-space integrands term by term.
Expr expand(const Expr& e);

} // namespace usm

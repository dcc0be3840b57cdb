#pragma once

#include <complex>
#include <string_view>

#include "usm/eval.hpp"

namespace usm::branchlib {

// Closed catalogue of principal-branch maps. log and sqrt use the cut
// (-inf, 0]; the inverse functions inherit their branches from them:
//   asin z = -i log(iz + sqrt(1 - z^2))     acos z = pi/2 - asin z
//   asec z = acos(1/z)                      acsc z = asin(1/z)
//   asinh y = log(y + sqrt(y^2 + 1))
enum class PrincipalFn { Log, Sqrt, Asin, Acos, Asec, Acsc, Asinh };

Complex principal(PrincipalFn f, Complex z);
Complex principal(std::string_view name, Complex z);

// Both sides of an identity evaluated independently.
struct IdentitySides {
    Complex lhs;
    Complex rhs;
    double abs_error;
};

enum class Part { A, B, C };
enum class HalfAngleForm { Csc, Sec };

// e^{-i acos y} = y - sqrt(y^2-1) on |y| <= 1 (part A), and
// e^{+-i acos y} = tan(acsc(y)/2) = (1 - tan(asec(y)/2)) / (1 + tan(asec(y)/2))
// on |y| >= 1 (part B), the sign positive for y >= 1. The sec form blows up
// at y = -1, so callers must stay at least 1e-6 away from it.
IdentitySides thm1_sides(double y, Part part, HalfAngleForm form = HalfAngleForm::Csc);

// e^{+-i asec y} = tan(asin(y)/2) with + on (0,1] and - on [-1,0) (part A),
// - for y >= 1 and + for y <= -1 (part B); part C swaps the right side for
// (1 - tan(acos(y)/2)) / (1 + tan(acos(y)/2)) on 0 < |y| <= 1. y = 0 is a
// limit point, refused within 1e-6.
IdentitySides thm2_sides(double y, Part part);

// e^{i acos(iy)} = i (y + sqrt(y^2 + 1)) for all real y.
IdentitySides bridge_sides(double y);

} // namespace usm::branchlib

#pragma once

#include <complex>
#include <map>
#include <string>

#include "usm/expr.hpp"

namespace usm {

using Complex = std::complex<double>;
using Bindings = std::map<std::string, Complex>;

// Principal-branch helpers shared by the evaluator and the identity oracles.
// A real axis value with a negative-zero imaginary part is normalized onto
// the upper side of the cut first.
Complex principal_sqrt(Complex z);
Complex principal_log(Complex z); // throws Pole at 0

// Evaluates with principal branches throughout. Powers with a Gaussian
// rational exponent w evaluate as exp(w * log z) except for integer
// exponents, which use repeated multiplication.
Complex eval_complex(const Expr& e, const Bindings& bind);

// eval_complex, then demand the imaginary part be below 1e-10 * (1 + |z|).
double eval_real(const Expr& e, const std::map<std::string, double>& bind);

} // namespace usm

#pragma once

#include <string_view>

#include "usm/expr.hpp"

namespace usm {

// Parses the engine's infix grammar into a normalized Expr.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?                exponent must evaluate to an
//                                              exact Gaussian rational
//   atom   := number | 'pi' | 'i' | name | name '(' expr ')' | '(' expr ')'
//
// Numbers are integers, decimals (made exact) or handled via '/'. There is
// no implicit multiplication. Throws Error with code Parse/UnknownFunction
// and the byte offset of the failure.
Expr parse(std::string_view text);

} // namespace usm

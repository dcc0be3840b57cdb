#pragma once

#include "usm/expr.hpp"

namespace usm {

// Symbolic derivative with respect to var, returned normalized. ln|u|
// differentiates to u'/u; any other absolute value is rejected because the
// sign of the argument is unknown.
Expr differentiate(const Expr& e, const std::string& var);

} // namespace usm

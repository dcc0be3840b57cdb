#pragma once

// Adaptive Simpson quadrature used as an independent oracle in tests.

#include <cmath>
#include <functional>

namespace test_support {

namespace detail {

template <typename F>
double simpson_rec(F&& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double err = (left + right - whole) / 15.0;
    if (depth <= 0 || std::abs(err) <= tol) return left + right + err;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

} // namespace detail

template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-10) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Integrates with endpoints nudged inward, for integrands with endpoint
// singularities or open-interval domains.
template <typename F>
double integrate_open(F&& f, double a, double b, double tol = 1e-10, double nudge = 1e-9) {
    double d = (b - a) * nudge;
    return integrate(f, a + d, b - d, tol);
}

} // namespace test_support

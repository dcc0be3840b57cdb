#include "usm/branchlib.hpp"

#include <cmath>

#include "usm/errors.hpp"

namespace usm::branchlib {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
// Refusal margin around the limit points; slightly inside 1e-6 so that grid
// points computed as 1 + 1e-6 in floating point are still accepted.
constexpr double kMargin = 1e-6 * (1.0 - 1e-6);
const Complex kI(0.0, 1.0);

Complex asin_p(Complex z) {
    // Real negative arguments reflect through the odd symmetry; the direct
    // formula cancels catastrophically for large negative z.
    if (z.imag() == 0.0) {
        double x = z.real();
        if (x < 0.0) return -asin_p(Complex(-x, 0.0));
        Complex rad((1.0 - x) * (1.0 + x), 0.0);
        return -kI * principal_log(kI * z + principal_sqrt(rad));
    }
    return -kI * principal_log(kI * z + principal_sqrt(1.0 - z * z));
}

Complex acos_p(Complex z) { return kPi / 2.0 - asin_p(z); }

// sqrt(y^2 - 1) with the factored radicand, real y.
Complex sqrt_y2m1(double y) { return principal_sqrt(Complex((y - 1.0) * (y + 1.0), 0.0)); }

IdentitySides make(Complex lhs, Complex rhs) {
    return IdentitySides{lhs, rhs, std::abs(lhs - rhs)};
}

} // namespace

Complex principal(PrincipalFn f, Complex z) {
    switch (f) {
        case PrincipalFn::Log: return principal_log(z);
        case PrincipalFn::Sqrt: return principal_sqrt(z);
        case PrincipalFn::Asin: return asin_p(z);
        case PrincipalFn::Acos: return acos_p(z);
        case PrincipalFn::Asec:
            if (z == Complex(0.0, 0.0)) fail(ErrorCode::ExcludedPoint, "asec(0) is undefined");
            return acos_p(1.0 / z);
        case PrincipalFn::Acsc:
            if (z == Complex(0.0, 0.0)) fail(ErrorCode::ExcludedPoint, "acsc(0) is undefined");
            return asin_p(1.0 / z);
        case PrincipalFn::Asinh: return principal_log(z + principal_sqrt(z * z + 1.0));
    }
    fail(ErrorCode::Internal, "bad principal function");
}

Complex principal(std::string_view name, Complex z) {
    if (name == "log" || name == "ln") return principal(PrincipalFn::Log, z);
    if (name == "sqrt") return principal(PrincipalFn::Sqrt, z);
    if (name == "asin") return principal(PrincipalFn::Asin, z);
    if (name == "acos") return principal(PrincipalFn::Acos, z);
    if (name == "asec") return principal(PrincipalFn::Asec, z);
    if (name == "acsc") return principal(PrincipalFn::Acsc, z);
    if (name == "asinh") return principal(PrincipalFn::Asinh, z);
    fail(ErrorCode::UnknownFunction, "not in the principal catalogue: " + std::string(name));
}

IdentitySides thm1_sides(double y, Part part, HalfAngleForm form) {
    if (part == Part::A) {
        if (std::abs(y) > 1.0) fail(ErrorCode::Domain, "part A needs |y| <= 1");
        Complex lhs = std::exp(-kI * acos_p(Complex(y, 0.0)));
        Complex rhs = Complex(y, 0.0) - sqrt_y2m1(y);
        return make(lhs, rhs);
    }
    if (part != Part::B) fail(ErrorCode::Domain, "parts A and B only");
    if (std::abs(y) < 1.0) fail(ErrorCode::Domain, "part B needs |y| >= 1");
    Complex alpha = acos_p(Complex(y, 0.0));
    Complex lhs = std::exp((y >= 1.0 ? kI : -kI) * alpha);
    Complex rhs;
    if (form == HalfAngleForm::Csc) {
        Complex beta = asin_p(1.0 / Complex(y, 0.0));
        rhs = std::tan(beta / 2.0);
    } else {
        if (std::abs(y + 1.0) < kMargin) {
            fail(ErrorCode::ExcludedPoint,
                 "sec form undefined at y = -1; holds only as a limit");
        }
        Complex gamma = acos_p(1.0 / Complex(y, 0.0));
        Complex tg = std::tan(gamma / 2.0);
        rhs = (1.0 - tg) / (1.0 + tg);
    }
    return make(lhs, rhs);
}

IdentitySides thm2_sides(double y, Part part) {
    if (part == Part::A || part == Part::C) {
        if (std::abs(y) > 1.0) fail(ErrorCode::Domain, "parts A and C need |y| <= 1");
        if (std::abs(y) < 1e-6 * (1.0 - 1e-6)) {
            fail(ErrorCode::ExcludedPoint, "y = 0 is a limit point of the identity");
        }
    } else {
        if (std::abs(y) < 1.0) fail(ErrorCode::Domain, "part B needs |y| >= 1");
    }
    Complex phi = acos_p(1.0 / Complex(y, 0.0)); // asec y
    int sign;
    if (part == Part::B) {
        sign = y >= 1.0 ? -1 : +1;
    } else {
        sign = y > 0.0 ? +1 : -1;
    }
    Complex lhs = std::exp(static_cast<double>(sign) * kI * phi);
    Complex rhs;
    if (part == Part::C) {
        Complex alpha = acos_p(Complex(y, 0.0));
        Complex ta = std::tan(alpha / 2.0);
        rhs = (1.0 - ta) / (1.0 + ta);
    } else {
        Complex psi = asin_p(Complex(y, 0.0));
        rhs = std::tan(psi / 2.0);
    }
    return make(lhs, rhs);
}

IdentitySides bridge_sides(double y) {
    Complex lhs = std::exp(kI * acos_p(Complex(0.0, y)));
    double s = std::sqrt(y * y + 1.0);
    Complex rhs = kI * (y + s);
    return make(lhs, rhs);
}

} // namespace usm::branchlib

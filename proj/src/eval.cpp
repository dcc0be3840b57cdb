#include "usm/eval.hpp"

#include <cmath>

#include "usm/errors.hpp"

namespace usm {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Complex on_upper_cut(Complex z) {
    // -0.0 imaginary parts land below the cut; principal conventions want
    // the limit from above.
    if (z.imag() == 0.0) return Complex(z.real(), +0.0);
    return z;
}

Complex pow_int(Complex b, long long n) {
    if (n == 0) return 1.0;
    if (b == Complex(0.0, 0.0)) {
        if (n > 0) return 0.0;
        fail(ErrorCode::Pole, "division by zero");
    }
    bool inv = n < 0;
    unsigned long long k = inv ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
    Complex acc = 1.0, base = b;
    while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return inv ? 1.0 / acc : acc;
}

Complex checked_div(Complex a, Complex b, const char* what) {
    if (std::abs(b) == 0.0) fail(ErrorCode::Pole, what);
    return a / b;
}

} // namespace

Complex principal_sqrt(Complex z) { return std::sqrt(on_upper_cut(z)); }

Complex principal_log(Complex z) {
    if (z == Complex(0.0, 0.0)) fail(ErrorCode::Pole, "log of zero");
    return std::log(on_upper_cut(z));
}

namespace {

Complex principal_asin(Complex z) {
    // asin z = -i log(iz + sqrt(1 - z^2)). For real z the radicand is
    // factored, and negative arguments go through the odd symmetry: the sum
    // iz + sqrt(1-z^2) cancels catastrophically for large negative z.
    if (z.imag() == 0.0) {
        double x = z.real();
        if (x < 0.0) return -principal_asin(Complex(-x, 0.0));
        Complex rad((1.0 - x) * (1.0 + x), 0.0);
        Complex w = Complex(0.0, 1.0) * z + principal_sqrt(rad);
        return Complex(0.0, -1.0) * principal_log(w);
    }
    Complex w = Complex(0.0, 1.0) * z + principal_sqrt(1.0 - z * z);
    return Complex(0.0, -1.0) * principal_log(w);
}

Complex principal_acos(Complex z) { return kPi / 2.0 - principal_asin(z); }

Complex principal_atan(Complex z) {
    if (z.imag() == 0.0) return std::atan(z.real());
    Complex i(0.0, 1.0);
    return (i / 2.0) * (principal_log(1.0 - i * z) - principal_log(1.0 + i * z));
}

Complex principal_asinh(Complex z) {
    if (z.imag() == 0.0) return std::asinh(z.real());
    return principal_log(z + principal_sqrt(z * z + 1.0));
}

Complex eval_call(Fn f, Complex z) {
    switch (f) {
        case Fn::Exp: return std::exp(z);
        case Fn::Ln: return principal_log(z);
        case Fn::Sin: return std::sin(z);
        case Fn::Cos: return std::cos(z);
        case Fn::Tan: return checked_div(std::sin(z), std::cos(z), "tan at a pole");
        case Fn::Sec: return checked_div(1.0, std::cos(z), "sec at a pole");
        case Fn::Csc: return checked_div(1.0, std::sin(z), "csc at a pole");
        case Fn::Asin: return principal_asin(z);
        case Fn::Acos: return principal_acos(z);
        case Fn::Atan: return principal_atan(z);
        case Fn::Asec:
            if (z == Complex(0.0, 0.0)) fail(ErrorCode::ExcludedPoint, "asec(0) is undefined");
            return principal_acos(1.0 / z);
        case Fn::Acsc:
            if (z == Complex(0.0, 0.0)) fail(ErrorCode::ExcludedPoint, "acsc(0) is undefined");
            return principal_asin(1.0 / z);
        case Fn::Asinh: return principal_asinh(z);
        case Fn::Sinh: return std::sinh(z);
        case Fn::Cosh: return std::cosh(z);
        case Fn::Tanh: return std::tanh(z);
    }
    fail(ErrorCode::Internal, "bad function tag");
}

} // namespace

Complex eval_complex(const Expr& e, const Bindings& bind) {
    switch (e.kind()) {
        case Kind::Constant: return e.value().to_double();
        case Kind::ImaginaryUnit: return Complex(0.0, 1.0);
        case Kind::Pi: return kPi;
        case Kind::Variable: {
            auto it = bind.find(e.name());
            if (it == bind.end()) {
                fail(ErrorCode::Precondition, "unbound variable '" + e.name() + "'");
            }
            return it->second;
        }
        case Kind::Sum: {
            Complex acc = 0.0;
            for (const Expr& k : e.children()) acc += eval_complex(k, bind);
            return acc;
        }
        case Kind::Product: {
            Complex acc = 1.0;
            for (const Expr& k : e.children()) acc *= eval_complex(k, bind);
            return acc;
        }
        case Kind::Power: {
            Complex b = eval_complex(e.base(), bind);
            const GaussianRational& w = e.exponent();
            if (w.is_integer() && w.re.numerator().fits_int64()) {
                long long n = w.re.numerator().to_int64();
                if (n >= -64 && n <= 64) return pow_int(b, n);
            }
            if (b == Complex(0.0, 0.0)) {
                if (w.re.to_double() > 0.0) return 0.0;
                fail(ErrorCode::Pole, "zero to a non-positive power");
            }
            Complex wc(w.re.to_double(), w.im.to_double());
            return std::exp(wc * principal_log(b));
        }
        case Kind::Call: return eval_call(e.fn(), eval_complex(e.arg(), bind));
        case Kind::AbsoluteValue: return std::abs(eval_complex(e.arg(), bind));
    }
    fail(ErrorCode::Internal, "bad expression node");
}

double eval_real(const Expr& e, const std::map<std::string, double>& bind) {
    Bindings cb;
    for (const auto& [k, v] : bind) cb.emplace(k, Complex(v, 0.0));
    Complex z = eval_complex(e, cb);
    if (std::abs(z.imag()) > 1e-10 * (1.0 + std::abs(z))) {
        fail(ErrorCode::NonReal, "value has a non-negligible imaginary part");
    }
    return z.real();
}

} // namespace usm

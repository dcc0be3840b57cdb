#include "usm/derivative.hpp"

#include "usm/errors.hpp"

namespace usm {

namespace {

Expr gpow(const Expr& b, long long n, long long d = 1) {
    return Expr::power(b, GaussianRational(Rational(n, d)));
}

// d(f(u))/du for a unary function, as an expression in u.
Expr chain_factor(Fn f, const Expr& u) {
    switch (f) {
        case Fn::Exp: return Expr::call(Fn::Exp, u);
        case Fn::Ln: return gpow(u, -1);
        case Fn::Sin: return Expr::call(Fn::Cos, u);
        case Fn::Cos: return -Expr::call(Fn::Sin, u);
        case Fn::Tan: return gpow(Expr::call(Fn::Cos, u), -2);
        case Fn::Sec: return Expr::call(Fn::Sec, u) * Expr::call(Fn::Tan, u);
        case Fn::Csc: return -(Expr::call(Fn::Cos, u) * gpow(Expr::call(Fn::Sin, u), -2));
        case Fn::Asin: return gpow(Expr::integer(1) - gpow(u, 2), -1, 2);
        case Fn::Acos: return -gpow(Expr::integer(1) - gpow(u, 2), -1, 2);
        case Fn::Atan: return gpow(Expr::integer(1) + gpow(u, 2), -1);
        // Principal-branch chain rules via asec u = acos(1/u), acsc u = asin(1/u).
        case Fn::Asec:
            return gpow(u, -2) * gpow(Expr::integer(1) - gpow(u, -2), -1, 2);
        case Fn::Acsc:
            return -(gpow(u, -2) * gpow(Expr::integer(1) - gpow(u, -2), -1, 2));
        case Fn::Asinh: return gpow(gpow(u, 2) + Expr::integer(1), -1, 2);
        case Fn::Sinh: return Expr::call(Fn::Cosh, u);
        case Fn::Cosh: return Expr::call(Fn::Sinh, u);
        case Fn::Tanh: return gpow(Expr::call(Fn::Cosh, u), -2);
    }
    fail(ErrorCode::Internal, "bad function tag");
}

} // namespace

Expr differentiate(const Expr& e, const std::string& var) {
    switch (e.kind()) {
        case Kind::Constant:
        case Kind::ImaginaryUnit:
        case Kind::Pi:
            return Expr::integer(0);
        case Kind::Variable:
            return Expr::integer(e.name() == var ? 1 : 0);
        case Kind::Sum: {
            std::vector<Expr> terms;
            for (const Expr& k : e.children()) terms.push_back(differentiate(k, var));
            return Expr::sum(std::move(terms));
        }
        case Kind::Product: {
            std::vector<Expr> terms;
            const auto& fs = e.children();
            for (std::size_t i = 0; i < fs.size(); ++i) {
                Expr d = differentiate(fs[i], var);
                if (d.is_zero()) continue;
                std::vector<Expr> factors{d};
                for (std::size_t j = 0; j < fs.size(); ++j) {
                    if (j != i) factors.push_back(fs[j]);
                }
                terms.push_back(Expr::product(std::move(factors)));
            }
            return Expr::sum(std::move(terms));
        }
        case Kind::Power: {
            Expr du = differentiate(e.base(), var);
            if (du.is_zero()) return Expr::integer(0);
            GaussianRational w = e.exponent();
            Expr coeff = w.is_real()
                             ? Expr::constant(w.re)
                             : Expr::constant(w.re) + Expr::constant(w.im) * Expr::imaginary();
            GaussianRational wm1 = w - GaussianRational(Rational(1));
            return coeff * Expr::power(e.base(), wm1) * du;
        }
        case Kind::Call: {
            const Expr& u = e.arg();
            if (e.fn() == Fn::Ln && u.kind() == Kind::AbsoluteValue) {
                const Expr& inner = u.arg();
                Expr du = differentiate(inner, var);
                return du * Expr::power(inner, GaussianRational(Rational(-1)));
            }
            Expr du = differentiate(u, var);
            if (du.is_zero()) return Expr::integer(0);
            return chain_factor(e.fn(), u) * du;
        }
        case Kind::AbsoluteValue:
            if (!e.arg().contains(var)) return Expr::integer(0);
            fail(ErrorCode::Unsupported,
                 "derivative of |u| with unknown sign (only ln|u| is supported)");
    }
    fail(ErrorCode::Internal, "bad expression node");
}

} // namespace usm

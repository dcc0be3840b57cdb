#include "usm/backsub.hpp"

#include <cmath>

#include "usm/errors.hpp"
#include "usm/eval.hpp"
#include "usm/simplify.hpp"

namespace usm::backsub {

namespace {

Rational binom(int n, int k) {
    Rational out(1);
    for (int i = 0; i < k; ++i) {
        out *= Rational(n - i);
        out /= Rational(i + 1);
    }
    return out;
}

} // namespace

Expr binomial_difference(int n, const Expr& y) {
    if (n < 1) fail(ErrorCode::Precondition, "binomial difference needs n >= 1");
    Expr y2m1 = Expr::power(y, GaussianRational(Rational(2))) - Expr::integer(1);
    std::vector<Expr> terms;
    for (int j = 0; 2 * j + 1 <= n; ++j) {
        Rational c = Rational(-2) * binom(n, 2 * j + 1);
        Expr yk = Expr::power(y, GaussianRational(Rational(n - 2 * j - 1)));
        Expr rad = Expr::power(y2m1, GaussianRational(Rational(2 * j + 1, 2)));
        terms.push_back(Expr::constant(c) * yk * rad);
    }
    return Expr::sum(std::move(terms));
}

int branch_sigma(transforms::Branch b) {
    switch (b) {
        case transforms::Branch::Upper: return +1;
        case transforms::Branch::Lower: return -1;
        default: fail(ErrorCode::Precondition, "sigma is defined per |y| >= 1 component");
    }
}

namespace {

// term == coeff * param^k with coeff free of param; k = 0 when param absent.
std::optional<std::pair<Expr, long long>> as_param_power(const Expr& term,
                                                         const std::string& param) {
    std::vector<Expr> factors;
    if (term.kind() == Kind::Product) {
        factors.assign(term.children().begin(), term.children().end());
    } else {
        factors.push_back(term);
    }
    long long k = 0;
    std::vector<Expr> coeff;
    for (const Expr& f : factors) {
        if (!f.contains(param)) {
            coeff.push_back(f);
        } else if (f.kind() == Kind::Variable) {
            k += 1;
        } else if (f.kind() == Kind::Power && f.base().kind() == Kind::Variable &&
                   f.base().name() == param && f.exponent().is_integer() &&
                   f.exponent().re.numerator().fits_int64()) {
            k += f.exponent().re.numerator().to_int64();
        } else {
            return std::nullopt;
        }
    }
    return std::make_pair(Expr::product(std::move(coeff)), k);
}

} // namespace

Expr collapse_reciprocal_powers(const Expr& e, const std::string& param,
                                transforms::Branch branch, const Expr& y) {
    int sigma = branch_sigma(branch);
    // Scan term by term. A scaled sum (content extraction stores
    // c * (t1 + ... + tk)) is unwrapped with the constant multiplied through
    // so the reciprocal pairs are visible.
    std::vector<Expr> terms;
    if (e.kind() == Kind::Sum) {
        terms.assign(e.children().begin(), e.children().end());
    } else if (e.kind() == Kind::Product && e.children().size() == 2 &&
               e.children()[0].kind() == Kind::Constant &&
               e.children()[1].kind() == Kind::Sum) {
        const Expr& c = e.children()[0];
        for (const Expr& t : e.children()[1].children()) terms.push_back(c * t);
    } else {
        terms.push_back(e);
    }
    struct Entry {
        Expr coeff;
        long long k;
        bool consumed = false;
    };
    std::vector<std::optional<Entry>> decomposed(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (auto d = as_param_power(terms[i], param)) {
            if (d->second != 0) decomposed[i] = Entry{d->first, d->second};
        }
    }
    std::vector<Expr> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!decomposed[i]) continue;
        if (decomposed[i]->consumed || decomposed[i]->k <= 0) continue;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            if (i == j || !decomposed[j] || decomposed[j]->consumed) continue;
            if (decomposed[j]->k != -decomposed[i]->k) continue;
            Expr neg = simplify(-decomposed[i]->coeff);
            if (simplify(decomposed[j]->coeff) == neg) {
                // c t^n + (-c) t^-n = c (t^n - t^-n) = c sigma D_n(y)
                Expr dn = binomial_difference(static_cast<int>(decomposed[i]->k), y);
                out.push_back(simplify(decomposed[i]->coeff * Expr::integer(sigma) * dn));
                decomposed[i]->consumed = true;
                decomposed[j]->consumed = true;
                break;
            }
        }
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (decomposed[i] && decomposed[i]->consumed) continue;
        out.push_back(terms[i]);
    }
    return Expr::sum(std::move(out));
}

namespace {

// Sample points strictly inside the interval for sign probing.
std::vector<double> probe_points(const Interval& iv, int n) {
    double lo = iv.lo, hi = iv.hi;
    if (std::isinf(lo) && std::isinf(hi)) {
        lo = -10;
        hi = 10;
    } else if (std::isinf(lo)) {
        lo = hi - 10;
    } else if (std::isinf(hi)) {
        hi = lo + 10;
    }
    double margin = std::max(1e-4, (hi - lo) * 1e-3);
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(lo + margin + (hi - lo - 2 * margin) * (i + 0.5) / n);
    }
    return out;
}

// ln|u| -> ln(u) or ln(-u) when the piece forces the sign of u.
Expr resolve_log_abs(const Expr& e, const std::string& var, const Interval& iv) {
    switch (e.kind()) {
        case Kind::Call: {
            Expr arg = resolve_log_abs(e.arg(), var, iv);
            if (e.fn() == Fn::Ln && arg.kind() == Kind::AbsoluteValue) {
                const Expr& inner = arg.arg();
                int pos = 0, neg = 0, other = 0;
                for (double x : probe_points(iv, 5)) {
                    try {
                        double v = eval_real(inner, {{var, x}});
                        if (v > 1e-9) ++pos;
                        else if (v < -1e-9) ++neg;
                        else ++other;
                    } catch (const Error&) {
                        ++other;
                    }
                }
                if (pos == 5) return Expr::call(Fn::Ln, inner);
                if (neg == 5) return Expr::call(Fn::Ln, simplify(-inner));
            }
            return Expr::call(e.fn(), std::move(arg));
        }
        case Kind::Sum: {
            std::vector<Expr> kids;
            for (const Expr& k : e.children()) kids.push_back(resolve_log_abs(k, var, iv));
            return Expr::sum(std::move(kids));
        }
        case Kind::Product: {
            std::vector<Expr> kids;
            for (const Expr& k : e.children()) kids.push_back(resolve_log_abs(k, var, iv));
            return Expr::product(std::move(kids));
        }
        case Kind::Power:
            return Expr::power(resolve_log_abs(e.base(), var, iv), e.exponent());
        case Kind::AbsoluteValue:
            return Expr::abs(resolve_log_abs(e.arg(), var, iv));
        default:
            return e;
    }
}

} // namespace

Antiderivative back_substitute(const ratint::ParamAntiderivative& pa,
                               const transforms::SubstitutionMap& m) {
    if (!pa.complete()) {
        fail(ErrorCode::Precondition, "cannot back-substitute with a non-empty remainder");
    }
    Expr param_expr = pa.to_expr();
    const auto& plan = m.plan;
    if ((plan.kind == 1 || plan.kind == 2) && plan.route == transforms::Route::Standard) {
        Expr y = Expr::constant(plan.a.reciprocal()) *
                 (Expr::variable(plan.variable) + Expr::constant(plan.b));
        param_expr = collapse_reciprocal_powers(param_expr, plan.param_name, plan.branch, y);
    }
    Antiderivative out;
    for (const auto& [interval, param_of_x] : m.backsub) {
        if (interval.empty()) continue;
        Expr subbed = param_expr.substitute(plan.param_name, param_of_x);
        int sign = 0;
        if (interval.lo >= 0) sign = +1;
        else if (interval.hi <= 0) sign = -1;
        Expr piece = simplify_piece(subbed, plan.variable, sign);
        piece = simplify_piece(resolve_log_abs(piece, plan.variable, interval), plan.variable,
                               sign);
        // The piece must be evaluable somewhere inside its interval.
        int ok = 0;
        for (double x : probe_points(interval, 5)) {
            try {
                eval_real(piece, {{plan.variable, x}});
                ++ok;
            } catch (const Error&) {
            }
        }
        if (ok == 0) {
            fail(ErrorCode::Domain,
                 "piece " + interval.to_string() + " is not real-evaluable");
        }
        out.pieces.emplace_back(interval, std::move(piece));
    }
    return out;
}

std::optional<std::pair<Poly, Poly>> radical_split(const Expr& e, const std::string& var,
                                                   const Poly& radicand) {
    switch (e.kind()) {
        case Kind::Constant:
            return std::make_pair(Poly(e.value()), Poly());
        case Kind::Variable:
            if (e.name() != var) return std::nullopt;
            return std::make_pair(Poly::x(), Poly());
        case Kind::Sum: {
            Poly a, b;
            for (const Expr& k : e.children()) {
                auto s = radical_split(k, var, radicand);
                if (!s) return std::nullopt;
                a = a + s->first;
                b = b + s->second;
            }
            return std::make_pair(a, b);
        }
        case Kind::Product: {
            Poly a(Rational(1)), b;
            for (const Expr& k : e.children()) {
                auto s = radical_split(k, var, radicand);
                if (!s) return std::nullopt;
                Poly na = a * s->first + b * s->second * radicand;
                Poly nb = a * s->second + b * s->first;
                a = std::move(na);
                b = std::move(nb);
            }
            return std::make_pair(a, b);
        }
        case Kind::Power: {
            const GaussianRational& w = e.exponent();
            if (!w.is_real() || w.re.signum() < 0) return std::nullopt;
            if (w.re.is_integer()) {
                if (!w.re.numerator().fits_int64()) return std::nullopt;
                long long n = w.re.numerator().to_int64();
                if (n > 24) return std::nullopt;
                auto s = radical_split(e.base(), var, radicand);
                if (!s) return std::nullopt;
                Poly a(Rational(1)), b;
                for (long long i = 0; i < n; ++i) {
                    Poly na = a * s->first + b * s->second * radicand;
                    Poly nb = a * s->second + b * s->first;
                    a = std::move(na);
                    b = std::move(nb);
                }
                return std::make_pair(a, b);
            }
            if (w.re.denominator() == BigInt(2)) {
                auto base_poly = expr_to_poly(e.base(), var);
                if (!base_poly || base_poly->monic() != radicand.monic() ||
                    *base_poly != radicand) {
                    return std::nullopt;
                }
                // radicand^(j + 1/2) = radicand^j * sqrt(radicand)
                Rational j = w.re - Rational(1, 2);
                if (!j.numerator().fits_int64()) return std::nullopt;
                long long ji = j.numerator().to_int64();
                if (ji < 0 || ji > 24) return std::nullopt;
                return std::make_pair(Poly(), radicand.pow(static_cast<unsigned>(ji)));
            }
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

} // namespace usm::backsub

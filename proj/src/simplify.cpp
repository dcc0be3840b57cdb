#include "usm/simplify.hpp"

#include <algorithm>

#include "usm/errors.hpp"
#include "usm/polynomial.hpp"

namespace usm {

namespace {

struct Ctx {
    std::string pos_var; // empty: no assumption
    int sign = 0;
    bool expand_radical_binomials = true;
};

// --- sign analysis on the (real) evaluation domain ---------------------------

bool is_nonneg(const Expr& e, const Ctx& ctx);
bool is_negative(const Expr& e, const Ctx& ctx);

bool is_positive(const Expr& e, const Ctx& ctx) {
    switch (e.kind()) {
        case Kind::Constant: return e.value().signum() > 0;
        case Kind::Pi: return true;
        case Kind::Variable:
            return !ctx.pos_var.empty() && e.name() == ctx.pos_var && ctx.sign > 0;
        case Kind::Sum: {
            bool one_strict = false;
            for (const Expr& k : e.children()) {
                if (!is_nonneg(k, ctx)) return false;
                if (is_positive(k, ctx)) one_strict = true;
            }
            return one_strict;
        }
        case Kind::Product:
            for (const Expr& k : e.children()) {
                if (!is_positive(k, ctx)) return false;
            }
            return true;
        case Kind::Power: {
            const GaussianRational& w = e.exponent();
            if (!w.is_real()) return false;
            if (w.re.is_integer() && w.re.numerator().is_even()) {
                return is_positive(e.base(), ctx) || is_negative(e.base(), ctx);
            }
            return is_positive(e.base(), ctx);
        }
        case Kind::Call:
            return e.fn() == Fn::Exp || e.fn() == Fn::Cosh;
        default: return false;
    }
}

bool is_negative(const Expr& e, const Ctx& ctx) {
    switch (e.kind()) {
        case Kind::Constant: return e.value().signum() < 0;
        case Kind::Variable:
            return !ctx.pos_var.empty() && e.name() == ctx.pos_var && ctx.sign < 0;
        case Kind::Product: {
            int neg = 0;
            for (const Expr& k : e.children()) {
                if (is_negative(k, ctx)) ++neg;
                else if (!is_positive(k, ctx)) return false;
            }
            return neg % 2 == 1;
        }
        default: return false;
    }
}

bool is_nonneg(const Expr& e, const Ctx& ctx) {
    switch (e.kind()) {
        case Kind::Constant: return e.value().signum() >= 0;
        case Kind::Pi: return true;
        case Kind::AbsoluteValue: return true;
        case Kind::Variable: return is_positive(e, ctx);
        case Kind::Sum:
            for (const Expr& k : e.children()) {
                if (!is_nonneg(k, ctx)) return false;
            }
            return true;
        case Kind::Product:
            for (const Expr& k : e.children()) {
                if (!is_nonneg(k, ctx)) return false;
            }
            return true;
        case Kind::Power: {
            const GaussianRational& w = e.exponent();
            if (!w.is_real()) return false;
            if (w.re.is_integer()) {
                if (w.re.numerator().is_even()) {
                    // An even power is non-negative as soon as the base is
                    // known real; the context variable is real by contract
                    // even when its sign is unknown (sign = 0).
                    return is_nonneg(e.base(), ctx) || is_negative(e.base(), ctx) ||
                           (e.base().kind() == Kind::Variable && !ctx.pos_var.empty() &&
                            e.base().name() == ctx.pos_var);
                }
                return is_nonneg(e.base(), ctx);
            }
            // principal root of a non-negative real is non-negative
            return is_nonneg(e.base(), ctx);
        }
        case Kind::Call:
            return e.fn() == Fn::Exp || e.fn() == Fn::Cosh;
        default: return false;
    }
}

// --- exact constant radical normalization ------------------------------------

// Largest s with s^2 | n (trial division; n must be small enough).
std::optional<std::pair<long long, long long>> square_split(long long n) {
    if (n <= 0) return std::nullopt;
    if (n > 4000000000000ll) return std::nullopt;
    long long s = 1, m = n;
    for (long long p = 2; p * p * p <= m || p <= 3; ++p) {
        if (p > 2000000) break;
        while (m % (p * p) == 0) {
            m /= p * p;
            s *= p;
        }
        if (p > m) break;
    }
    // Remaining m may still be a perfect square.
    long long r = static_cast<long long>(std::sqrt(static_cast<double>(m)));
    for (long long c = std::max(1ll, r - 1); c <= r + 1; ++c) {
        if (c * c == m) {
            s *= c;
            m = 1;
            break;
        }
    }
    return std::make_pair(s, m);
}

// c^w for a positive rational c and real non-integer w: pull out the integer
// part of the exponent and, for half-integer exponents, the square part of
// the radicand, giving the canonical k*sqrt(m) shape.
Expr normalize_const_power(const Rational& c, const Rational& w) {
    BigInt ip_num = w.numerator();
    // floor division for the integer part
    BigInt q, r;
    BigInt::divmod(ip_num, w.denominator(), q, r);
    if (r.signum() < 0) q = q - BigInt(1);
    Rational int_part = Rational::from_integer(q);
    Rational frac = w - int_part;
    Rational base_pow(1);
    if (!int_part.is_zero() && int_part.numerator().fits_int64()) {
        long long m = int_part.numerator().to_int64();
        if (m > 64 || m < -64) return Expr::power(Expr::constant(c), GaussianRational(w));
        base_pow = c.pow(m);
    } else if (!int_part.is_zero()) {
        return Expr::power(Expr::constant(c), GaussianRational(w));
    }
    if (frac == Rational(1, 2) && c.numerator().fits_int64() && c.denominator().fits_int64()) {
        // sqrt(p/q) = sqrt(p*q)/q
        long long p = c.numerator().to_int64();
        long long den = c.denominator().to_int64();
        if (p < 2000000000ll && den < 2000000000ll) {
            auto split = square_split(p * den);
            if (split) {
                auto [s, m] = *split;
                Rational coeff = base_pow * Rational(s, den);
                if (m == 1) return Expr::constant(coeff);
                return Expr::product({Expr::constant(coeff),
                                      Expr::power(Expr::integer(m), GaussianRational(Rational(1, 2)))});
            }
        }
    }
    if (int_part.is_zero()) {
        return Expr::power(Expr::constant(c), GaussianRational(w));
    }
    return Expr::product({Expr::constant(base_pow),
                          Expr::power(Expr::constant(c), GaussianRational(frac))});
}

// Matches a variable-free sum of the form alpha + beta*sqrt(m); returns
// (alpha, beta, m).
struct RadicalPair {
    Rational alpha, beta, m;
};
std::optional<RadicalPair> as_radical_pair(const Expr& e) {
    if (e.kind() != Kind::Sum || e.children().size() != 2 || !e.is_number()) return std::nullopt;
    RadicalPair out{Rational(0), Rational(0), Rational(0)};
    bool have_rad = false, have_rat = false;
    for (const Expr& t : e.children()) {
        if (t.kind() == Kind::Constant) {
            out.alpha = t.value();
            have_rat = true;
            continue;
        }
        Rational coeff(1);
        Expr core = t;
        if (t.kind() == Kind::Product && t.children().size() == 2 &&
            t.children()[0].kind() == Kind::Constant) {
            coeff = t.children()[0].value();
            core = t.children()[1];
        }
        if (core.kind() == Kind::Power && core.base().kind() == Kind::Constant &&
            core.exponent() == GaussianRational(Rational(1, 2))) {
            out.beta = coeff;
            out.m = core.base().value();
            have_rad = true;
            continue;
        }
        return std::nullopt;
    }
    if (!have_rad || !have_rat) return std::nullopt;
    return out;
}

// --- polynomial collection ----------------------------------------------------

constexpr long kCollectDegreeCap = 40;

Expr emit_fraction(Poly num, Poly den, const std::string& var) {
    if (num.is_zero()) return Expr::integer(0);
    Poly g = Poly::gcd(num, den);
    if (g.degree() > 0) {
        num = num / g;
        den = den / g;
    }
    // fold the denominator's leading coefficient into the numerator
    Rational lead = den.lead();
    if (!lead.is_one()) {
        num = num.scale(lead.reciprocal());
        den = den.monic();
    }
    if (den.degree() == 0) return num.to_expr(var);
    // monomial denominator: emit a Laurent sum
    bool monomial = true;
    for (long i = 0; i < den.degree(); ++i) {
        if (!den.coeff(i).is_zero()) {
            monomial = false;
            break;
        }
    }
    if (monomial) {
        std::vector<Expr> terms;
        Expr v = Expr::variable(var);
        for (long i = 0; i <= num.degree(); ++i) {
            if (num.coeff(i).is_zero()) continue;
            long k = i - den.degree();
            Expr pw = k == 0 ? Expr::integer(1) : Expr::power(v, GaussianRational(Rational(k)));
            terms.push_back(Expr::constant(num.coeff(i)) * pw);
        }
        return Expr::sum(std::move(terms));
    }
    return num.to_expr(var) * Expr::power(den.to_expr(var), GaussianRational(Rational(-1)));
}

// --- main rewriting pass -------------------------------------------------------

Expr simp(const Expr& e, const Ctx& ctx);

Expr number_expand(const Expr& e);

// (t1 + ... + tk)^n expanded term by term; multiplying whole sums would be
// re-merged into a power by construction and loop.
Expr expand_pow_sum(const Expr& base, long long n) {
    std::vector<Expr> acc{Expr::integer(1)};
    for (long long round = 0; round < n; ++round) {
        std::vector<Expr> next;
        for (const Expr& t : acc) {
            for (const Expr& u : base.children()) next.push_back(t * u);
        }
        Expr folded = Expr::sum(std::move(next));
        if (folded.kind() == Kind::Sum) {
            acc.assign(folded.children().begin(), folded.children().end());
        } else {
            acc.assign(1, folded);
        }
    }
    return Expr::sum(std::move(acc));
}

// True when distributing over factors[i] makes progress: a lone rational
// constant times a sum is already canonical (sum construction extracts the
// content right back, which would loop).
bool distribution_helps(const std::vector<Expr>& factors, std::size_t sum_index) {
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (j != sum_index && factors[j].kind() != Kind::Constant) return true;
    }
    return false;
}

// Term-by-term product with one sum factor distributed.
Expr distribute_once(const std::vector<Expr>& factors, std::size_t sum_index) {
    std::vector<Expr> rest;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (j != sum_index) rest.push_back(factors[j]);
    }
    std::vector<Expr> terms;
    for (const Expr& t : factors[sum_index].children()) {
        std::vector<Expr> fs{t};
        for (const Expr& r : rest) fs.push_back(r);
        terms.push_back(Expr::product(std::move(fs)));
    }
    return Expr::sum(std::move(terms));
}

// Distributes products over sums / expands small integer powers of sums for
// variable-free subtrees, so constants like (1+sqrt(2))^2 fold.
Expr number_expand_once(const Expr& e, bool& changed) {
    switch (e.kind()) {
        case Kind::Product: {
            const auto& kids = e.children();
            for (std::size_t i = 0; i < kids.size(); ++i) {
                if (kids[i].kind() == Kind::Sum && kids[i].children().size() <= 16 &&
                    distribution_helps(kids, i)) {
                    changed = true;
                    return distribute_once(kids, i);
                }
            }
            return e;
        }
        case Kind::Power: {
            if (e.base().kind() == Kind::Sum && e.exponent().is_integer()) {
                long long n = e.exponent().re.numerator().fits_int64()
                                  ? e.exponent().re.numerator().to_int64()
                                  : 100;
                if (n >= 2 && n <= 8) {
                    changed = true;
                    return expand_pow_sum(e.base(), n);
                }
            }
            return e;
        }
        case Kind::Sum: {
            std::vector<Expr> kids;
            bool any = false;
            for (const Expr& k : e.children()) {
                bool c2 = false;
                kids.push_back(number_expand_once(k, c2));
                any = any || c2;
            }
            if (!any) return e;
            changed = true;
            return Expr::sum(std::move(kids));
        }
        default: return e;
    }
}

Expr number_expand(const Expr& e) {
    Expr cur = e;
    for (int round = 0; round < 12; ++round) {
        bool changed = false;
        Expr next = number_expand_once(cur, changed);
        if (!changed || next == cur) return next;
        cur = next;
    }
    return cur;
}

Expr simp_power(Expr base, GaussianRational w, const Ctx& ctx) {
    // Let construction-level folds run first.
    Expr built = Expr::power(base, w);
    if (built.kind() != Kind::Power) return simp(built, ctx);
    base = built.base();
    w = built.exponent();

    // Constant radical normalization.
    if (base.kind() == Kind::Constant && w.is_real() && !w.re.is_integer() &&
        base.value().signum() > 0) {
        Expr norm = normalize_const_power(base.value(), w.re);
        if (norm != built) return simp(norm, ctx);
    }
    // Conjugate rationalization of 1/(a + b*sqrt(m)) ^ n.
    if (w.is_integer() && w.re.signum() < 0 && w.re.numerator().fits_int64()) {
        long long n = -w.re.numerator().to_int64();
        if (n <= 8) {
            if (auto rp = as_radical_pair(base)) {
                Rational norm2 = rp->alpha * rp->alpha - rp->beta * rp->beta * rp->m;
                if (!norm2.is_zero()) {
                    Expr conj = Expr::constant(rp->alpha) -
                                Expr::constant(rp->beta) *
                                    Expr::power(Expr::constant(rp->m), GaussianRational(Rational(1, 2)));
                    Expr out = number_expand(Expr::power(conj, GaussianRational(Rational(static_cast<long long>(n)))) *
                                             Expr::constant(norm2.pow(n).reciprocal()));
                    return simp(out, ctx);
                }
            }
        }
    }
    if (!w.is_integer()) {
        // A sum base that is a ratio of positive polynomials splits into
        // num^w * den^-w (collection has usually rewritten the product into
        // this shape before the power rules run).
        if (base.kind() == Kind::Sum) {
            auto vars = base.variables();
            if (vars.size() == 1) {
                if (auto fr = expr_to_fraction(base, *vars.begin())) {
                    if (fr->den.degree() >= 1) {
                        Expr num_e = fr->num.to_expr(*vars.begin());
                        Expr den_e = fr->den.to_expr(*vars.begin());
                        bool num_pos = is_positive(num_e, ctx);
                        bool den_pos = is_positive(den_e, ctx);
                        if (num_pos && den_pos) {
                            return simp(Expr::power(num_e, w) * Expr::power(den_e, -w), ctx);
                        }
                    }
                }
            }
        }
        // (u*v)^w -> u^w * v^w for provably positive u.
        if (base.kind() == Kind::Product) {
            std::vector<Expr> outside, inside;
            for (const Expr& f : base.children()) {
                bool pos = is_positive(f, ctx);
                if (!pos && f.kind() == Kind::Power && f.exponent().is_real() &&
                    is_positive(f.base(), ctx)) {
                    pos = true; // positive base keeps a positive real power positive
                }
                if (pos) outside.push_back(f);
                else inside.push_back(f);
            }
            if (!outside.empty()) {
                std::vector<Expr> factors;
                for (Expr& f : outside) factors.push_back(Expr::power(std::move(f), w));
                if (!inside.empty()) {
                    factors.push_back(Expr::power(Expr::product(std::move(inside)), w));
                }
                return simp(Expr::product(std::move(factors)), ctx);
            }
        }
        // (v^k)^w -> v^(k*w) when v is positive on the domain.
        if (base.kind() == Kind::Power && base.exponent().is_real() &&
            is_positive(base.base(), ctx)) {
            return simp(Expr::power(base.base(), base.exponent() * w), ctx);
        }
    }
    // Two-term expansion for small positive integer powers when the base is
    // not a pure polynomial (pure polynomials collect via fractions below).
    if (w.is_integer() && w.re.signum() > 0 && base.kind() == Kind::Sum &&
        base.children().size() == 2 && w.re.numerator().fits_int64()) {
        long long n = w.re.numerator().to_int64();
        auto vars = base.variables();
        bool poly = vars.size() == 1 && expr_to_poly(base, *vars.begin()).has_value();
        if (n >= 2 && n <= 8 && !poly && !base.is_number() &&
            ctx.expand_radical_binomials) {
            return simp(expand(built), ctx);
        }
    }
    return built;
}

// Collection and folding applied to a rebuilt Product/Power node.
Expr post_collect(Expr built, const Ctx&) {
    if (built.kind() != Kind::Product && built.kind() != Kind::Power) return built;
    if (built.kind() == Kind::Power && !built.exponent().is_integer()) return built;
    if (built.is_number()) return number_expand(built);
    auto vars = built.variables();
    if (vars.size() == 1) {
        const std::string& v = *vars.begin();
        if (auto fr = expr_to_fraction(built, v)) {
            if (fr->num.degree() <= kCollectDegreeCap && fr->den.degree() <= kCollectDegreeCap) {
                return emit_fraction(std::move(fr->num), std::move(fr->den), v);
            }
        }
    }
    return built;
}

Expr simp(const Expr& e, const Ctx& ctx) {
    switch (e.kind()) {
        case Kind::Constant:
        case Kind::ImaginaryUnit:
        case Kind::Pi:
        case Kind::Variable:
            return e;
        case Kind::Call:
            return Expr::call(e.fn(), simp(e.arg(), ctx));
        case Kind::AbsoluteValue: {
            Expr a = simp(e.arg(), ctx);
            if (is_nonneg(a, ctx)) return a;
            if (is_negative(a, ctx)) return simp(-a, ctx);
            return Expr::abs(std::move(a));
        }
        case Kind::Sum: {
            std::vector<Expr> kids;
            for (const Expr& k : e.children()) kids.push_back(simp(k, ctx));
            return Expr::sum(std::move(kids));
        }
        case Kind::Power:
            return post_collect(simp_power(simp(e.base(), ctx), e.exponent(), ctx), ctx);
        case Kind::Product: {
            std::vector<Expr> kids;
            for (const Expr& k : e.children()) kids.push_back(simp(k, ctx));
            return post_collect(Expr::product(std::move(kids)), ctx);
        }
    }
    return e;
}

} // namespace

Expr simplify(const Expr& e) {
    Ctx ctx;
    Expr cur = e;
    for (int round = 0; round < 8; ++round) {
        Expr next = simp(cur, ctx);
        if (next == cur) return next;
        cur = next;
    }
    return cur;
}

Expr simplify_in_domain(const Expr& e, const std::string& var, int sign) {
    Ctx ctx{var, sign, true};
    Expr cur = e;
    for (int round = 0; round < 8; ++round) {
        Expr next = simp(cur, ctx);
        if (next == cur) return next;
        cur = next;
    }
    return cur;
}

Expr simplify_piece(const Expr& e, const std::string& var, int sign) {
    Ctx ctx{var, sign, false};
    Expr cur = e;
    for (int round = 0; round < 8; ++round) {
        Expr next = simp(cur, ctx);
        if (next == cur) return next;
        cur = next;
    }
    return cur;
}

namespace {
// Applies the power-of-sum expansion to an already-expanded node.
Expr expand_if_power(Expr built) {
    if (built.kind() == Kind::Power && built.base().kind() == Kind::Sum &&
        built.exponent().is_integer() && built.exponent().re.signum() > 0 &&
        built.exponent().re.numerator().fits_int64()) {
        long long n = built.exponent().re.numerator().to_int64();
        if (n <= 16) return expand(expand_pow_sum(built.base(), n));
    }
    return built;
}
} // namespace

Expr expand(const Expr& e) {
    switch (e.kind()) {
        case Kind::Sum: {
            std::vector<Expr> kids;
            for (const Expr& k : e.children()) kids.push_back(expand(k));
            return Expr::sum(std::move(kids));
        }
        case Kind::Product: {
            std::vector<Expr> kids;
            for (const Expr& k : e.children()) kids.push_back(expand(k));
            Expr built = Expr::product(std::move(kids));
            if (built.kind() != Kind::Product) return expand_if_power(built);
            const auto& fs = built.children();
            for (std::size_t i = 0; i < fs.size(); ++i) {
                if (fs[i].kind() == Kind::Sum && fs[i].children().size() <= 64 &&
                    distribution_helps(fs, i)) {
                    return expand(distribute_once(fs, i));
                }
            }
            return built;
        }
        case Kind::Power:
            return expand_if_power(Expr::power(expand(e.base()), e.exponent()));
        default: return e;
    }
}

} // namespace usm

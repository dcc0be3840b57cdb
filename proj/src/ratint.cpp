#include "usm/ratint.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "usm/derivative.hpp"
#include "usm/errors.hpp"
#include "usm/simplify.hpp"

namespace usm::ratint {

namespace {

using std::complex;

Expr var_expr(const std::string& v) { return Expr::variable(v); }


// Terms of a sum with a scaled sum (content-extracted c * (t1 + ... + tk))
// unwrapped so each term carries its own coefficient.
std::vector<Expr> sum_terms(const Expr& e) {
    if (e.kind() == Kind::Sum) {
        return {e.children().begin(), e.children().end()};
    }
    if (e.kind() == Kind::Product && e.children().size() == 2 &&
        e.children()[0].kind() == Kind::Constant && e.children()[1].kind() == Kind::Sum) {
        std::vector<Expr> out;
        for (const Expr& t : e.children()[1].children()) {
            out.push_back(e.children()[0] * t);
        }
        return out;
    }
    return {e};
}

bool has_half_power_of_poly(const Expr& e, const std::string& param) {
    if (e.kind() == Kind::Power && e.exponent().is_real() &&
        e.exponent().re.denominator() == BigInt(2) && e.base().contains(param)) {
        return true;
    }
    for (const Expr& k : e.children()) {
        if (has_half_power_of_poly(k, param)) return true;
    }
    return false;
}

} // namespace

RationalFunction to_rational_function(const Expr& e, const std::string& param) {
    Expr s = simplify(e);
    auto fr = expr_to_fraction(s, param);
    if (!fr) {
        if (has_half_power_of_poly(s, param)) {
            fail(ErrorCode::TablePath, "radical in the parameter: table path");
        }
        fail(ErrorCode::NotRational, "not a ratio of polynomials in '" + param + "'");
    }
    if (fr->den.is_zero()) fail(ErrorCode::Pole, "zero denominator");
    Poly g = Poly::gcd(fr->num, fr->den);
    Poly num = fr->num / g, den = fr->den / g;
    Rational lead = den.lead();
    return RationalFunction{num.scale(lead.reciprocal()), den.monic(), param};
}

Expr Term::to_expr(const std::string& param) const {
    Expr p = var_expr(param);
    switch (tag) {
        case Tag::Power: return coeff * Expr::power(body, exponent);
        case Tag::LogAbs: return coeff * Expr::call(Fn::Ln, Expr::abs(body));
        case Tag::Arctan: return coeff * Expr::call(Fn::Atan, body);
        case Tag::TableSqrt:
            return coeff *
                   Expr::sqrt(Expr::power(p, GaussianRational(Rational(2))) + Expr::integer(1));
        case Tag::TableLogRatio: {
            Expr s = Expr::sqrt(Expr::power(p, GaussianRational(Rational(2))) + Expr::integer(1));
            Expr num = p + s - Expr::integer(1);
            Expr den = p + s + Expr::integer(1);
            return coeff *
                   Expr::call(Fn::Ln,
                              Expr::abs(num * Expr::power(den, GaussianRational(Rational(-1)))));
        }
        case Tag::Opaque: return coeff * body;
    }
    fail(ErrorCode::Internal, "bad term tag");
}

Expr ParamAntiderivative::to_expr() const {
    if (remainder) fail(ErrorCode::Unintegrable, "antiderivative still has a remainder");
    std::vector<Expr> parts;
    for (const Term& t : terms) parts.push_back(t.to_expr(param));
    return Expr::sum(std::move(parts));
}

namespace {

// ---- numeric root finding (Durand-Kerner with Newton polish) -----------------

std::vector<complex<double>> dk_roots(const Poly& p) {
    int n = static_cast<int>(p.degree());
    std::vector<complex<double>> c(n + 1);
    double lead = p.lead().to_double();
    for (int i = 0; i <= n; ++i) c[i] = p.coeff(i).to_double() / lead;
    auto eval = [&](complex<double> z) {
        complex<double> acc = 0;
        for (int i = n; i >= 0; --i) acc = acc * z + c[i];
        return acc;
    };
    double radius = 1.0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[i]));
    radius = 1.0 + radius;
    std::vector<complex<double>> z(n);
    complex<double> seed(0.4, 0.9);
    complex<double> cur(1.0, 0.0);
    for (int i = 0; i < n; ++i) {
        cur *= seed;
        z[i] = radius * cur / std::abs(cur) * (0.5 + 0.5 * (i + 1.0) / n);
    }
    for (int iter = 0; iter < 600; ++iter) {
        double worst = 0;
        for (int i = 0; i < n; ++i) {
            complex<double> denom = 1.0;
            for (int j = 0; j < n; ++j) {
                if (j != i) denom *= z[i] - z[j];
            }
            if (std::abs(denom) == 0.0) {
                z[i] += complex<double>(1e-8, 1e-8);
                continue;
            }
            complex<double> delta = eval(z[i]) / denom;
            z[i] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-14 * radius) break;
    }
    for (auto& root : z) {
        for (int it = 0; it < 4; ++it) {
            complex<double> f = eval(root), df = 0;
            for (int i = n; i >= 1; --i) df = df * root + c[i] * static_cast<double>(i);
            if (std::abs(df) == 0.0) break;
            root -= f / df;
        }
    }
    return z;
}

// ---- exact factor extraction --------------------------------------------------

constexpr long long kRootDenCap = 1000000;

bool try_divide(Poly& f, const Poly& candidate) {
    if (candidate.degree() < 1 || candidate.degree() > f.degree()) return false;
    Poly q, r;
    Poly::divmod(f, candidate, q, r);
    if (!r.is_zero()) return false;
    f = q;
    return true;
}

// Splits a monic square-free polynomial into monic irreducible factors of
// degree <= 2 plus an unsplit leftover. Candidates come from numeric roots
// and are accepted only after an exact division check.
void factor_squarefree(const Poly& f, std::vector<Poly>& out, Poly& leftover) {
    Poly rest = f.monic();
    if (rest.degree() == 1) {
        out.push_back(rest);
        leftover = Poly(Rational(1));
        return;
    }
    if (rest.degree() <= 0) {
        leftover = Poly(Rational(1));
        return;
    }
    auto roots = dk_roots(rest);
    double scale = 1.0;
    for (const auto& z : roots) scale = std::max(scale, std::abs(z));

    std::vector<complex<double>> reals, complexes;
    for (const auto& z : roots) {
        if (std::abs(z.imag()) <= 1e-9 * scale) reals.push_back(z);
        else if (z.imag() > 0) complexes.push_back(z);
    }
    std::vector<complex<double>> real_leftover;
    for (const auto& z : reals) {
        bool taken = false;
        if (auto r = rationalize(z.real(), kRootDenCap, 1e-9)) {
            Poly lin({-*r, Rational(1)});
            if (try_divide(rest, lin)) {
                out.push_back(lin);
                taken = true;
            }
        }
        if (!taken) real_leftover.push_back(z);
    }
    for (const auto& z : complexes) {
        auto s = rationalize(2.0 * z.real(), kRootDenCap, 1e-8);
        auto pr = rationalize(std::norm(z), kRootDenCap, 1e-8);
        if (!s || !pr) continue;
        Poly quad({*pr, -*s, Rational(1)});
        if (try_divide(rest, quad)) out.push_back(quad);
    }
    std::vector<bool> used(real_leftover.size(), false);
    for (std::size_t i = 0; i < real_leftover.size(); ++i) {
        if (used[i]) continue;
        for (std::size_t j = i + 1; j < real_leftover.size(); ++j) {
            if (used[j]) continue;
            double sum = real_leftover[i].real() + real_leftover[j].real();
            double prod = real_leftover[i].real() * real_leftover[j].real();
            auto s = rationalize(sum, kRootDenCap, 1e-8);
            auto pr = rationalize(prod, kRootDenCap, 1e-8);
            if (!s || !pr) continue;
            Poly quad({*pr, -*s, Rational(1)});
            if (try_divide(rest, quad)) {
                out.push_back(quad);
                used[i] = used[j] = true;
                break;
            }
        }
    }
    leftover = rest; // degree 0 when fully split
}

struct FactorList {
    struct Entry {
        Poly factor;
        int mult;
    };
    std::vector<Entry> entries;
    Poly bad = Poly(Rational(1)); // product of unsplit chunks with multiplicity
};

FactorList factor_denominator(const Poly& den) {
    FactorList fl;
    for (const auto& [sq_factor, mult] : den.squarefree()) {
        std::vector<Poly> irr;
        Poly leftover;
        factor_squarefree(sq_factor, irr, leftover);
        for (const Poly& p : irr) fl.entries.push_back({p, mult});
        if (leftover.degree() >= 1) {
            fl.bad = fl.bad * leftover.pow(static_cast<unsigned>(mult));
        }
    }
    return fl;
}

} // namespace

PartialFractions partial_fractions(const RationalFunction& f) {
    PartialFractions out;
    out.bad_num = Poly();
    out.bad_den = Poly(Rational(1));
    Poly rem;
    Poly::divmod(f.num, f.den, out.poly_part, rem);
    if (rem.is_zero()) return out;

    FactorList fl = factor_denominator(f.den);
    Poly good(Rational(1));
    for (const auto& e : fl.entries) good = good * e.factor.pow(static_cast<unsigned>(e.mult));

    Poly cur = rem;
    if (fl.bad.degree() >= 1) {
        Poly s, t;
        Poly g = Poly::ext_gcd(good, fl.bad, s, t);
        if (g.degree() != 0) fail(ErrorCode::Internal, "good/bad parts are not coprime");
        // rem/(good*bad) = rem*t/good + rem*s/bad
        out.bad_num = (rem * s) % fl.bad;
        cur = (rem * t) % good;
        out.bad_den = fl.bad;
        Poly check = rem - out.bad_num * good - cur * fl.bad;
        Poly q, r;
        Poly::divmod(check, f.den, q, r);
        if (!r.is_zero()) fail(ErrorCode::Internal, "partial fraction split validation failed");
        out.poly_part = out.poly_part + q;
    }

    Poly g_left = good;
    for (const auto& e : fl.entries) {
        Poly pk = e.factor.pow(static_cast<unsigned>(e.mult));
        Poly rest = g_left / pk;
        Poly a_p;
        if (rest.degree() == 0) {
            Poly q;
            Poly::divmod(cur, pk, q, a_p);
            out.poly_part = out.poly_part + q;
        } else {
            Poly s, t;
            Poly g = Poly::ext_gcd(pk, rest, s, t);
            if (g.degree() != 0) fail(ErrorCode::Internal, "repeated factor in peel");
            a_p = (cur * t) % pk;
            Poly new_cur = (cur * s) % rest;
            Poly check = cur - a_p * rest - new_cur * pk;
            Poly q, r;
            Poly::divmod(check, g_left, q, r);
            if (!r.is_zero()) fail(ErrorCode::Internal, "partial fraction peel validation failed");
            out.poly_part = out.poly_part + q;
            cur = new_cur;
        }
        // p-adic digits of a_p over factor^mult
        Poly a = a_p;
        for (int j = 0; j < e.mult && !a.is_zero(); ++j) {
            Poly digit, next;
            Poly::divmod(a, e.factor, next, digit);
            if (!digit.is_zero()) {
                out.pieces.push_back({digit, e.factor, e.mult - j});
            }
            a = next;
        }
        g_left = rest;
    }
    return out;
}

namespace {

void integrate_poly_part(const Poly& p, const std::string& param, std::vector<Term>& out) {
    for (long i = 0; i <= p.degree(); ++i) {
        if (p.coeff(i).is_zero()) continue;
        Rational c = p.coeff(i) / Rational(i + 1);
        out.push_back(Term{Term::Tag::Power, Expr::constant(c), var_expr(param),
                           GaussianRational(Rational(i + 1))});
    }
}

void integrate_linear_piece(const Rational& coeff, const Poly& factor, int power,
                            const std::string& param, std::vector<Term>& out) {
    Expr body = factor.to_expr(param);
    if (power == 1) {
        out.push_back(Term{Term::Tag::LogAbs, Expr::constant(coeff), body, GaussianRational()});
    } else {
        Rational c = coeff / Rational(1 - power);
        out.push_back(Term{Term::Tag::Power, Expr::constant(c), body,
                           GaussianRational(Rational(1 - power))});
    }
}

// Residue expansion over Q(sqrt(e2)) for a quadratic with real irrational
// roots: numer(t)/((u-e0)(u+e0))^m, u = t + beta/2, e0 = sqrt(e2).
void integrate_real_quadratic_piece(const Poly& numer, int m, const std::string& param,
                                    const Rational& beta, const Rational& e2,
                                    std::vector<Term>& out) {
    Expr e0 = simplify(Expr::power(Expr::constant(e2), GaussianRational(Rational(1, 2))));
    const std::string hv = "_u";
    Expr u = var_expr(hv);
    Expr t_of_u = u - Expr::constant(beta / Rational(2));
    Expr f_u = numer.to_expr(param).substitute(param, t_of_u);
    Expr u_in_t = var_expr(param) + Expr::constant(beta / Rational(2));

    for (int side = 0; side < 2; ++side) {
        Expr root = side == 0 ? e0 : simplify(-e0);
        Expr other = side == 0 ? simplify(-e0) : e0;
        // g(u) = f(u) (u - other)^-m; digit for (u - root)^(m-s) is g^(s)(root)/s!
        Expr g = f_u * Expr::power(u - other, GaussianRational(Rational(-m)));
        Rational fact(1);
        for (int s = 0; s < m; ++s) {
            if (s > 0) fact *= Rational(s);
            Expr c = simplify(simplify(g.substitute(hv, root)) * Expr::constant(fact.reciprocal()));
            int j = m - s;
            Expr lin = simplify(u_in_t - root);
            if (!c.is_zero()) {
                if (j == 1) {
                    out.push_back(Term{Term::Tag::LogAbs, c, lin, GaussianRational()});
                } else {
                    Expr cc = simplify(c * Expr::constant(Rational(1, 1 - j)));
                    out.push_back(
                        Term{Term::Tag::Power, cc, lin, GaussianRational(Rational(1 - j))});
                }
            }
            g = differentiate(g, hv);
        }
    }
}

// (B t + C)/(t^2 + beta t + gamma)^m with the quadratic irreducible over Q.
void integrate_quadratic_piece(const Poly& numer, const Poly& factor, int m,
                               const std::string& param, std::vector<Term>& out) {
    Rational B = numer.coeff(1), C = numer.coeff(0);
    Rational beta = factor.coeff(1), gamma = factor.coeff(0);
    Rational d2 = gamma - beta * beta / Rational(4); // factor = u^2 + d2
    if (d2.signum() < 0) {
        integrate_real_quadratic_piece(numer, m, param, beta, -d2, out);
        return;
    }
    if (d2.is_zero()) fail(ErrorCode::Internal, "repeated root in a square-free factor");

    Expr p_expr = factor.to_expr(param);
    if (!B.is_zero()) {
        Rational half_B = B / Rational(2);
        if (m == 1) {
            out.push_back(
                Term{Term::Tag::LogAbs, Expr::constant(half_B), p_expr, GaussianRational()});
        } else {
            out.push_back(Term{Term::Tag::Power, Expr::constant(half_B / Rational(1 - m)),
                               p_expr, GaussianRational(Rational(1 - m))});
        }
    }
    Rational cprime = C - B * beta / Rational(2);
    if (cprime.is_zero()) return;
    Expr u = var_expr(param) + Expr::constant(beta / Rational(2));
    Expr inv_sqrt_d2 =
        simplify(Expr::power(Expr::constant(d2), GaussianRational(Rational(-1, 2))));
    // J_1 = atan(u/sqrt(d2))/sqrt(d2);
    // J_k = u/(2 d2 (k-1) q^(k-1)) + (2k-3)/(2 d2 (k-1)) J_(k-1)
    std::vector<Term> j_terms;
    j_terms.push_back(
        Term{Term::Tag::Arctan, inv_sqrt_d2, simplify(u * inv_sqrt_d2), GaussianRational()});
    for (int k = 2; k <= m; ++k) {
        Rational den = Rational(2) * d2 * Rational(k - 1);
        Expr rat_part = Expr::constant(den.reciprocal()) * u *
                        Expr::power(p_expr, GaussianRational(Rational(1 - k)));
        Rational scale = Rational(2 * k - 3) / den;
        for (Term& t : j_terms) t.coeff = simplify(t.coeff * Expr::constant(scale));
        j_terms.push_back(
            Term{Term::Tag::Opaque, Expr::integer(1), simplify(rat_part), GaussianRational()});
    }
    for (Term& t : j_terms) {
        t.coeff = simplify(t.coeff * Expr::constant(cprime));
        out.push_back(t);
    }
}

} // namespace

ParamAntiderivative integrate_rational(const RationalFunction& f) {
    ParamAntiderivative out;
    out.param = f.var;
    PartialFractions pf = partial_fractions(f);
    integrate_poly_part(pf.poly_part, f.var, out.terms);
    for (const auto& piece : pf.pieces) {
        if (piece.factor.degree() == 1) {
            integrate_linear_piece(piece.numerator.coeff(0), piece.factor, piece.power, f.var,
                                   out.terms);
        } else if (piece.factor.degree() == 2) {
            integrate_quadratic_piece(piece.numerator, piece.factor, piece.power, f.var,
                                      out.terms);
        } else {
            fail(ErrorCode::Internal, "unexpected factor degree in pieces");
        }
    }
    if (pf.bad_den.degree() >= 1) {
        Expr num_e = pf.bad_num.to_expr(f.var);
        Expr den_e = pf.bad_den.to_expr(f.var);
        out.remainder = simplify(num_e * Expr::power(den_e, GaussianRational(Rational(-1))));
    }
    return out;
}

std::optional<ParamAntiderivative> integrate_laurent(const Expr& e, const std::string& param) {
    Expr flat = expand(simplify(e));
    std::vector<Expr> terms = sum_terms(flat);
    ParamAntiderivative out;
    out.param = param;
    for (const Expr& term : terms) {
        GaussianRational w{Rational(0)};
        std::vector<Expr> coeff_parts;
        std::vector<Expr> factors;
        if (term.kind() == Kind::Product) {
            factors.assign(term.children().begin(), term.children().end());
        } else {
            factors.push_back(term);
        }
        for (const Expr& f : factors) {
            if (!f.contains(param)) {
                coeff_parts.push_back(f);
            } else if (f.kind() == Kind::Variable) {
                w = w + GaussianRational(Rational(1));
            } else if (f.kind() == Kind::Power && f.base().kind() == Kind::Variable &&
                       f.base().name() == param) {
                w = w + f.exponent();
            } else {
                return std::nullopt;
            }
        }
        Expr coeff = simplify(Expr::product(std::move(coeff_parts)));
        if (w == GaussianRational(Rational(-1))) {
            out.terms.push_back(
                Term{Term::Tag::LogAbs, coeff, var_expr(param), GaussianRational()});
            continue;
        }
        GaussianRational wp1 = w + GaussianRational(Rational(1));
        GaussianRational inv = GaussianRational{Rational(1)} / wp1;
        Expr inv_e = inv.is_real()
                         ? Expr::constant(inv.re)
                         : Expr::constant(inv.re) + Expr::constant(inv.im) * Expr::imaginary();
        out.terms.push_back(Term{Term::Tag::Power, simplify(coeff * inv_e), var_expr(param), wp1});
    }
    return out;
}

ParamAntiderivative integrate_table(const Expr& e, const std::string& param, int sign) {
    Expr g = expand(simplify_in_domain(e, param, sign));
    std::vector<Expr> terms = sum_terms(g);

    ParamAntiderivative out;
    out.param = param;
    Poly shape({Rational(1), Rational(0), Rational(1)}); // p^2 + 1
    std::vector<Expr> leftover;
    for (const Expr& term : terms) {
        if (term.is_zero()) continue;
        std::vector<Expr> factors;
        if (term.kind() == Kind::Product) {
            factors.assign(term.children().begin(), term.children().end());
        } else {
            factors.push_back(term);
        }
        std::vector<Expr> coeff_parts;
        Rational k(0);
        int radical = 0;
        bool ok = true;
        for (const Expr& f : factors) {
            if (!f.contains(param)) {
                coeff_parts.push_back(f);
            } else if (f.kind() == Kind::Variable) {
                k += Rational(1);
            } else if (f.kind() == Kind::Power && f.base().kind() == Kind::Variable &&
                       f.base().name() == param && f.exponent().is_integer()) {
                k += f.exponent().re;
            } else if (f.kind() == Kind::Power &&
                       f.exponent() == GaussianRational(Rational(-1, 2))) {
                auto p = expr_to_poly(f.base(), param);
                if (p && *p == shape) ++radical;
                else ok = false;
            } else {
                ok = false;
            }
            if (!ok) break;
        }
        Expr coeff = simplify(Expr::product(std::move(coeff_parts)));
        if (ok && radical == 1 && k == Rational(1)) {
            out.terms.push_back(Term{Term::Tag::TableSqrt, coeff, Expr(), GaussianRational()});
        } else if (ok && radical == 1 && k == Rational(-1)) {
            out.terms.push_back(Term{Term::Tag::TableLogRatio, coeff, Expr(), GaussianRational()});
        } else {
            leftover.push_back(term);
        }
    }
    if (!leftover.empty()) {
        out.remainder = simplify(Expr::sum(std::move(leftover)));
    }
    return out;
}

} // namespace usm::ratint

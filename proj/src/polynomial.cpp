#include "usm/polynomial.hpp"

#include <algorithm>

#include "usm/errors.hpp"

namespace usm {

void Poly::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Poly::Poly(Rational c) {
    c_.push_back(std::move(c));
    trim();
}

Poly::Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Poly Poly::x() { return monomial(Rational(1), 1); }

Poly Poly::monomial(Rational c, std::size_t deg) {
    if (c.is_zero()) return Poly();
    std::vector<Rational> v(deg + 1, Rational(0));
    v[deg] = std::move(c);
    return Poly(std::move(v));
}

const Rational& Poly::lead() const {
    if (c_.empty()) fail(ErrorCode::Internal, "lead of zero polynomial");
    return c_.back();
}

Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i < a.c_.size()) v[i] += a.c_[i];
        if (i < b.c_.size()) v[i] += b.c_[i];
    }
    return Poly(std::move(v));
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly Poly::operator-() const {
    std::vector<Rational> v = c_;
    for (auto& c : v) c = -c;
    return Poly(std::move(v));
}

Poly Poly::scale(const Rational& k) const {
    if (k.is_zero()) return Poly();
    std::vector<Rational> v = c_;
    for (auto& c : v) c *= k;
    return Poly(std::move(v));
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<Rational> v(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.c_.size(); ++j) {
            if (!b.c_[j].is_zero()) v[i + j] += a.c_[i] * b.c_[j];
        }
    }
    return Poly(std::move(v));
}

void Poly::divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
    if (b.is_zero()) fail(ErrorCode::Pole, "polynomial division by zero");
    q = Poly();
    r = a;
    if (a.degree() < b.degree()) return;
    std::vector<Rational> qc(a.c_.size() - b.c_.size() + 1, Rational(0));
    std::vector<Rational> rc = a.c_;
    const Rational& bl = b.lead();
    for (long i = static_cast<long>(qc.size()) - 1; i >= 0; --i) {
        Rational cur = rc[i + b.degree()];
        if (cur.is_zero()) continue;
        Rational f = cur / bl;
        qc[i] = f;
        for (std::size_t j = 0; j < b.c_.size(); ++j) {
            rc[i + j] -= f * b.c_[j];
        }
    }
    q = Poly(std::move(qc));
    r = Poly(std::move(rc));
}

Poly operator/(const Poly& a, const Poly& b) {
    Poly q, r;
    Poly::divmod(a, b, q, r);
    return q;
}

Poly operator%(const Poly& a, const Poly& b) {
    Poly q, r;
    Poly::divmod(a, b, q, r);
    return r;
}

namespace {

// Integer, content-free representation for gcd work.
std::vector<BigInt> to_primitive_int(const Poly& p) {
    BigInt lcm(1);
    for (const Rational& c : p.coeffs()) {
        const BigInt& d = c.denominator();
        lcm = lcm / BigInt::gcd(lcm, d) * d;
    }
    std::vector<BigInt> v;
    v.reserve(p.coeffs().size());
    BigInt content(0);
    for (const Rational& c : p.coeffs()) {
        BigInt n = c.numerator() * (lcm / c.denominator());
        content = BigInt::gcd(content, n);
        v.push_back(std::move(n));
    }
    if (!content.is_zero() && !content.is_one()) {
        for (auto& n : v) n = n / content;
    }
    return v;
}

std::vector<BigInt> int_content_free(std::vector<BigInt> v) {
    while (!v.empty() && v.back().is_zero()) v.pop_back();
    BigInt content(0);
    for (const auto& n : v) content = BigInt::gcd(content, n);
    if (!content.is_zero() && !content.is_one()) {
        for (auto& n : v) n = n / content;
    }
    return v;
}

// Pseudo-remainder of a by b (integer coefficients, b non-empty).
std::vector<BigInt> int_prem(std::vector<BigInt> r, const std::vector<BigInt>& b) {
    const BigInt& bl = b.back();
    long i = static_cast<long>(r.size()) - static_cast<long>(b.size());
    while (i >= 0) {
        while (!r.empty() && r.back().is_zero()) r.pop_back();
        long cur = static_cast<long>(r.size()) - static_cast<long>(b.size());
        if (cur < 0) break;
        i = cur;
        BigInt f = r.back();
        for (auto& c : r) c = c * bl;
        for (std::size_t j = 0; j < b.size(); ++j) {
            r[j + i] = r[j + i] - f * b[j];
        }
        while (!r.empty() && r.back().is_zero()) r.pop_back();
    }
    return r;
}

} // namespace

Poly Poly::gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return b.is_zero() ? Poly() : b.monic();
    if (b.is_zero()) return a.monic();
    std::vector<BigInt> u = int_content_free(to_primitive_int(a));
    std::vector<BigInt> v = int_content_free(to_primitive_int(b));
    if (u.size() < v.size()) std::swap(u, v);
    while (!v.empty()) {
        std::vector<BigInt> r = int_content_free(int_prem(u, v));
        u = std::move(v);
        v = std::move(r);
    }
    std::vector<Rational> rc;
    rc.reserve(u.size());
    for (auto& n : u) rc.push_back(Rational::from_integer(std::move(n)));
    return Poly(std::move(rc)).monic();
}

Poly Poly::ext_gcd(const Poly& a, const Poly& b, Poly& s, Poly& t) {
    Poly r0 = a, r1 = b;
    Poly s0(Rational(1)), s1;
    Poly t0, t1(Rational(1));
    while (!r1.is_zero()) {
        Poly q, r;
        divmod(r0, r1, q, r);
        Poly s2 = s0 - q * s1;
        Poly t2 = t0 - q * t1;
        r0 = std::move(r1); r1 = std::move(r);
        s0 = std::move(s1); s1 = std::move(s2);
        t0 = std::move(t1); t1 = std::move(t2);
    }
    if (r0.is_zero()) {
        s = Poly();
        t = Poly();
        return Poly();
    }
    Rational inv = r0.lead().reciprocal();
    s = s0.scale(inv);
    t = t0.scale(inv);
    return r0.scale(inv);
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<Rational> v(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) {
        v[i - 1] = c_[i] * Rational(static_cast<long long>(i));
    }
    return Poly(std::move(v));
}

Poly Poly::monic() const {
    if (is_zero()) return *this;
    return scale(lead().reciprocal());
}

Poly Poly::pow(unsigned e) const {
    Poly out(Rational(1));
    Poly base = *this;
    while (e) {
        if (e & 1) out = out * base;
        base = base * base;
        e >>= 1;
    }
    return out;
}

Rational Poly::eval(const Rational& x) const {
    Rational acc(0);
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
}

double Poly::eval(double x) const {
    double acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i].to_double();
    return acc;
}

std::complex<double> Poly::eval(std::complex<double> x) const {
    std::complex<double> acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i].to_double();
    return acc;
}

std::vector<std::pair<Poly, int>> Poly::squarefree() const {
    std::vector<std::pair<Poly, int>> out;
    if (degree() <= 0) return out;
    Poly p = monic();
    Poly dp = p.derivative();
    Poly a = gcd(p, dp);
    Poly b = p / a; // product of the square-free factors
    Poly c = dp / a - b.derivative();
    int k = 1;
    while (b.degree() > 0) {
        Poly f = gcd(b, c);
        if (f.degree() > 0) out.emplace_back(f.monic(), k);
        Poly b2 = b / f;
        c = c / f - b2.derivative();
        b = std::move(b2);
        ++k;
    }
    return out;
}

Expr Poly::to_expr(const std::string& var) const {
    std::vector<Expr> terms;
    Expr v = Expr::variable(var);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        if (i == 0) {
            terms.push_back(Expr::constant(c_[i]));
        } else {
            terms.push_back(Expr::constant(c_[i]) *
                            Expr::power(v, GaussianRational(Rational(static_cast<long long>(i)))));
        }
    }
    return Expr::sum(std::move(terms));
}

std::string Poly::to_string(const std::string& var) const { return to_expr(var).str(); }

namespace {

std::optional<Poly> poly_pow(const Poly& base, const GaussianRational& w) {
    if (!w.is_integer()) return std::nullopt;
    if (!w.re.numerator().fits_int64()) return std::nullopt;
    long long n = w.re.numerator().to_int64();
    if (n < 0 || n > 512) return std::nullopt;
    return base.pow(static_cast<unsigned>(n));
}

} // namespace

std::optional<Poly> expr_to_poly(const Expr& e, const std::string& var) {
    switch (e.kind()) {
        case Kind::Constant: return Poly(e.value());
        case Kind::Variable:
            if (e.name() == var) return Poly::x();
            return std::nullopt;
        case Kind::Sum: {
            Poly acc;
            for (const Expr& k : e.children()) {
                auto p = expr_to_poly(k, var);
                if (!p) return std::nullopt;
                acc = acc + *p;
            }
            return acc;
        }
        case Kind::Product: {
            Poly acc(Rational(1));
            for (const Expr& k : e.children()) {
                auto p = expr_to_poly(k, var);
                if (!p) return std::nullopt;
                acc = acc * *p;
            }
            return acc;
        }
        case Kind::Power: {
            auto b = expr_to_poly(e.base(), var);
            if (!b) return std::nullopt;
            return poly_pow(*b, e.exponent());
        }
        default: return std::nullopt;
    }
}

std::optional<PolyFraction> expr_to_fraction(const Expr& e, const std::string& var) {
    switch (e.kind()) {
        case Kind::Constant: return PolyFraction{Poly(e.value()), Poly(Rational(1))};
        case Kind::Variable:
            if (e.name() == var) return PolyFraction{Poly::x(), Poly(Rational(1))};
            return std::nullopt;
        case Kind::Sum: {
            PolyFraction acc{Poly(), Poly(Rational(1))};
            for (const Expr& k : e.children()) {
                auto f = expr_to_fraction(k, var);
                if (!f) return std::nullopt;
                acc.num = acc.num * f->den + f->num * acc.den;
                acc.den = acc.den * f->den;
            }
            return acc;
        }
        case Kind::Product: {
            PolyFraction acc{Poly(Rational(1)), Poly(Rational(1))};
            for (const Expr& k : e.children()) {
                auto f = expr_to_fraction(k, var);
                if (!f) return std::nullopt;
                acc.num = acc.num * f->num;
                acc.den = acc.den * f->den;
            }
            return acc;
        }
        case Kind::Power: {
            if (!e.exponent().is_integer()) return std::nullopt;
            if (!e.exponent().re.numerator().fits_int64()) return std::nullopt;
            long long n = e.exponent().re.numerator().to_int64();
            if (n > 512 || n < -512) return std::nullopt;
            auto f = expr_to_fraction(e.base(), var);
            if (!f) return std::nullopt;
            if (n >= 0) {
                return PolyFraction{f->num.pow(static_cast<unsigned>(n)),
                                    f->den.pow(static_cast<unsigned>(n))};
            }
            if (f->num.is_zero()) return std::nullopt;
            return PolyFraction{f->den.pow(static_cast<unsigned>(-n)),
                                f->num.pow(static_cast<unsigned>(-n))};
        }
        default: return std::nullopt;
    }
}

std::optional<std::pair<Rational, Rational>> linear_coeffs(const Expr& e, const std::string& var) {
    auto p = expr_to_poly(e, var);
    if (!p || p->degree() > 1) return std::nullopt;
    return std::make_pair(p->coeff(1), p->coeff(0));
}

} // namespace usm

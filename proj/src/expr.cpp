#include "usm/expr.hpp"

#include <algorithm>
#include <cassert>

#include "usm/errors.hpp"
#include "usm/interval.hpp"

namespace usm {

namespace {

const char* kFnNames[] = {
    "exp", "ln", "sin", "cos", "tan", "sec", "csc",
    "asin", "acos", "atan", "asec", "acsc", "asinh",
    "sinh", "cosh", "tanh",
};

// Printer precedence levels.
constexpr int kPrecSum = 10;
constexpr int kPrecNeg = 15;
constexpr int kPrecMul = 20;
constexpr int kPrecPow = 30;
constexpr int kPrecAtom = 40;

std::string wrap(std::string s, int need, int have) {
    if (have < need) return "(" + std::move(s) + ")";
    return s;
}

std::string gaussian_to_string(const GaussianRational& g) {
    auto im_part = [](const Rational& im) -> std::string {
        Rational a = im.abs();
        return a.is_one() ? "i" : a.to_string() + "*i";
    };
    if (g.im.is_zero()) return g.re.to_string();
    if (g.re.is_zero()) {
        std::string s = im_part(g.im);
        return g.im.signum() < 0 ? "-" + s : s;
    }
    std::string s = g.re.to_string();
    s += g.im.signum() < 0 ? " - " : " + ";
    s += im_part(g.im);
    return s;
}

} // namespace

const char* fn_name(Fn f) { return kFnNames[static_cast<int>(f)]; }

std::optional<Fn> fn_from_name(std::string_view name) {
    for (int i = 0; i < static_cast<int>(std::size(kFnNames)); ++i) {
        if (name == kFnNames[i]) return static_cast<Fn>(i);
    }
    return std::nullopt;
}

namespace {

using detail::Node;

int node_prec(const Node& n) {
    switch (n.kind) {
        case Kind::Constant:
            if (n.value.signum() < 0) return kPrecNeg;
            return n.value.is_integer() ? kPrecAtom : kPrecMul;
        case Kind::Sum: return kPrecSum;
        case Kind::Product: {
            bool neg = !n.kids.empty() && n.kids[0].kind() == Kind::Constant &&
                       n.kids[0].value().signum() < 0;
            return neg ? kPrecNeg : kPrecMul;
        }
        case Kind::Power: return kPrecPow;
        default: return kPrecAtom;
    }
}

std::string print_node(const Node& n, int need);

std::string print_expr_at(const Expr& e, int need);

// Splits a product into sign, numerator factors and denominator factors for
// display as a single fraction.
std::string print_product(const Node& n, int need) {
    Rational c(1);
    std::size_t first = 0;
    if (!n.kids.empty() && n.kids[0].kind() == Kind::Constant) {
        c = n.kids[0].value();
        first = 1;
    }
    bool neg = c.signum() < 0;
    if (neg) c = -c;

    std::vector<std::string> num, den;
    if (!Rational::from_integer(c.numerator()).is_one() )
        num.push_back(c.numerator().to_string());
    for (std::size_t i = first; i < n.kids.size(); ++i) {
        const Expr& f = n.kids[i];
        bool denominator = f.kind() == Kind::Power && f.exponent().is_real() &&
                           f.exponent().re.signum() < 0;
        if (denominator) {
            Expr flipped = Expr::power(f.base(), GaussianRational(-f.exponent().re));
            den.push_back(print_expr_at(flipped, kPrecMul + 1));
        } else {
            num.push_back(print_expr_at(f, kPrecMul + 1));
        }
    }
    if (!c.denominator().is_one()) den.push_back(c.denominator().to_string());

    std::string out;
    if (num.empty()) {
        out = "1";
    } else {
        for (std::size_t i = 0; i < num.size(); ++i) {
            if (i) out += "*";
            out += num[i];
        }
    }
    if (!den.empty()) {
        if (den.size() == 1) {
            out += "/" + den[0];
        } else {
            out += "/(";
            for (std::size_t i = 0; i < den.size(); ++i) {
                if (i) out += "*";
                out += den[i];
            }
            out += ")";
        }
    }
    if (neg) out = "-" + out;
    return wrap(std::move(out), need, neg ? kPrecNeg : kPrecMul);
}

std::string print_sum(const Node& n, int need) {
    std::string out;
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
        const Expr& t = n.kids[i];
        bool neg = false;
        Expr shown = t;
        if (t.kind() == Kind::Constant && t.value().signum() < 0) {
            neg = true;
            shown = Expr::constant(-t.value());
        } else if (t.kind() == Kind::Product && t.children()[0].kind() == Kind::Constant &&
                   t.children()[0].value().signum() < 0) {
            neg = true;
            shown = -t;
        }
        std::string s = print_expr_at(shown, kPrecSum + 1);
        if (i == 0) {
            out = neg ? "-" + s : s;
        } else {
            out += neg ? " - " : " + ";
            out += s;
        }
    }
    return wrap(std::move(out), need, kPrecSum);
}

std::string print_node(const Node& n, int need) {
    switch (n.kind) {
        case Kind::Constant:
            return wrap(n.value.to_string(), need, node_prec(n));
        case Kind::ImaginaryUnit: return "i";
        case Kind::Pi: return "pi";
        case Kind::Variable: return n.name;
        case Kind::Call:
            return std::string(fn_name(n.fn)) + "(" + print_expr_at(n.kids[0], 0) + ")";
        case Kind::AbsoluteValue:
            return "abs(" + print_expr_at(n.kids[0], 0) + ")";
        case Kind::Power: {
            if (n.exponent == GaussianRational(Rational(1, 2))) {
                return "sqrt(" + print_expr_at(n.kids[0], 0) + ")";
            }
            std::string base = print_expr_at(n.kids[0], kPrecPow + 1);
            std::string exp;
            if (n.exponent.is_integer() && n.exponent.re.signum() >= 0) {
                exp = n.exponent.re.to_string();
            } else {
                exp = "(" + gaussian_to_string(n.exponent) + ")";
            }
            return wrap(base + "^" + exp, need, kPrecPow);
        }
        case Kind::Sum: return print_sum(n, need);
        case Kind::Product: return print_product(n, need);
    }
    return "?";
}

std::string print_expr_at(const Expr& e, int need) {
    // Recompute with context-sensitive parenthesization; cached repr is the
    // top-level form.
    const Node tmp{e.kind(), e.kind() == Kind::Call ? e.fn() : Fn::Exp,
                   e.kind() == Kind::Constant ? e.value() : Rational(),
                   e.kind() == Kind::Power ? e.exponent() : GaussianRational(),
                   e.kind() == Kind::Variable ? e.name() : std::string(),
                   e.children(), 0, Rational(), std::string()};
    return print_node(tmp, need);
}

std::size_t combine_hash(std::size_t a, std::size_t b) {
    return a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
}

Rational node_degree(const Node& n) {
    switch (n.kind) {
        case Kind::Variable: return Rational(1);
        case Kind::Sum: {
            Rational d(0);
            bool set = false;
            for (const Expr& k : n.kids) {
                if (!set || k.degree() > d) { d = k.degree(); set = true; }
            }
            return d;
        }
        case Kind::Product: {
            Rational d(0);
            for (const Expr& k : n.kids) d += k.degree();
            return d;
        }
        case Kind::Power:
            return n.kids[0].degree() * n.exponent.re;
        default: return Rational(0);
    }
}

std::size_t node_hash(const Node& n) {
    std::size_t h = static_cast<std::size_t>(n.kind) * 0x100000001b3ull;
    switch (n.kind) {
        case Kind::Constant: h = combine_hash(h, n.value.hash()); break;
        case Kind::Variable: h = combine_hash(h, std::hash<std::string>{}(n.name)); break;
        case Kind::Call: h = combine_hash(h, static_cast<std::size_t>(n.fn)); break;
        case Kind::Power: h = combine_hash(h, n.exponent.hash()); break;
        default: break;
    }
    for (const Expr& k : n.kids) h = combine_hash(h, k.hash());
    return h;
}

} // namespace

Expr Expr::finish(detail::Node n) {
    n.degree = node_degree(n);
    n.hash = node_hash(n);
    n.repr = print_node(n, 0);
    return Expr(std::make_shared<const detail::Node>(std::move(n)));
}

Expr::Expr() { *this = integer(0); }

Expr Expr::constant(Rational r) {
    detail::Node n;
    n.kind = Kind::Constant;
    n.value = std::move(r);
    return finish(std::move(n));
}

Expr Expr::integer(long long v) { return constant(Rational(v)); }

Expr Expr::imaginary() {
    detail::Node n;
    n.kind = Kind::ImaginaryUnit;
    return finish(std::move(n));
}

Expr Expr::pi() {
    detail::Node n;
    n.kind = Kind::Pi;
    return finish(std::move(n));
}

Expr Expr::variable(std::string name) {
    detail::Node n;
    n.kind = Kind::Variable;
    n.name = std::move(name);
    return finish(std::move(n));
}

Expr Expr::call(Fn f, Expr arg) {
    detail::Node n;
    n.kind = Kind::Call;
    n.fn = f;
    n.kids.push_back(std::move(arg));
    return finish(std::move(n));
}

Expr Expr::abs(Expr arg) {
    if (arg.kind() == Kind::Constant) return constant(arg.value().abs());
    if (arg.kind() == Kind::AbsoluteValue) return arg;
    detail::Node n;
    n.kind = Kind::AbsoluteValue;
    n.kids.push_back(std::move(arg));
    return finish(std::move(n));
}

namespace {
// A term of the form (rational constant) * (single sum) is a scaled sum;
// flattening distributes it so collection sees the underlying terms.
bool is_scaled_sum(const Expr& t) {
    return t.kind() == Kind::Product && t.children().size() == 2 &&
           t.children()[0].kind() == Kind::Constant && t.children()[1].kind() == Kind::Sum;
}
} // namespace

Expr Expr::sum(std::vector<Expr> terms) {
    // Flatten nested sums and scaled sums.
    std::vector<Expr> flat;
    std::vector<Expr> work = std::move(terms);
    while (!work.empty()) {
        Expr t = std::move(work.back());
        work.pop_back();
        if (t.kind() == Kind::Sum) {
            for (const Expr& k : t.children()) work.push_back(k);
        } else if (is_scaled_sum(t)) {
            const Rational c = t.children()[0].value();
            for (const Expr& k : t.children()[1].children()) {
                work.push_back(product({constant(c), k}));
            }
        } else {
            flat.push_back(std::move(t));
        }
    }
    // Collect like terms by their non-rational core.
    Rational constant_acc(0);
    std::vector<std::pair<Expr, Rational>> groups; // core -> coefficient
    for (const Expr& t : flat) {
        if (t.kind() == Kind::Constant) {
            constant_acc += t.value();
            continue;
        }
        Rational coeff(1);
        Expr core = t;
        if (t.kind() == Kind::Product && t.children()[0].kind() == Kind::Constant) {
            coeff = t.children()[0].value();
            std::vector<Expr> rest(t.children().begin() + 1, t.children().end());
            core = rest.size() == 1 ? rest[0] : product(std::move(rest));
        }
        bool found = false;
        for (auto& g : groups) {
            if (g.first == core) {
                g.second += coeff;
                found = true;
                break;
            }
        }
        if (!found) groups.emplace_back(core, coeff);
    }
    std::erase_if(groups, [](const auto& g) { return g.second.is_zero(); });
    if (groups.empty()) return constant(constant_acc);
    // Canonical order on the coefficient-free cores (stable under scaling).
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
        int c = a.first.degree().compare(b.first.degree());
        if (c != 0) return c > 0; // higher degree first
        return a.first.str() < b.first.str();
    });
    // Extract the rational content so the sum is primitive and its leading
    // coefficient positive; the content lives in the enclosing product.
    Rational content = groups[0].second.abs();
    for (std::size_t gi = 1; gi < groups.size() && !content.is_one(); ++gi) {
        const Rational c = groups[gi].second.abs();
        content = Rational(BigInt::gcd(content.numerator() * c.denominator(),
                                       c.numerator() * content.denominator()),
                           content.denominator() * c.denominator());
    }
    if (!constant_acc.is_zero()) {
        const Rational c = constant_acc.abs();
        content = Rational(BigInt::gcd(content.numerator() * c.denominator(),
                                       c.numerator() * content.denominator()),
                           content.denominator() * c.denominator());
    }
    if (groups[0].second.signum() < 0) content = -content;

    std::vector<Expr> out;
    for (auto& g : groups) {
        Rational c = g.second / content;
        if (c.is_one()) out.push_back(g.first);
        else out.push_back(product({constant(c), g.first}));
    }
    Rational const_term = constant_acc / content;
    if (!const_term.is_zero()) out.push_back(constant(const_term));
    if (out.size() == 1) {
        return content.is_one() ? out[0] : product({constant(content), out[0]});
    }
    detail::Node n;
    n.kind = Kind::Sum;
    n.kids = std::move(out);
    Expr s = finish(std::move(n));
    return content.is_one() ? s : product({constant(content), std::move(s)});
}

Expr Expr::product(std::vector<Expr> factors) {
    Rational constant_acc(1);
    // (base, exponent) groups; iterate until no factor rewrites.
    std::vector<std::pair<Expr, GaussianRational>> groups;
    std::vector<Expr> work = std::move(factors);
    while (!work.empty()) {
        Expr f = std::move(work.back());
        work.pop_back();
        switch (f.kind()) {
            case Kind::Product:
                for (const Expr& k : f.children()) work.push_back(k);
                continue;
            case Kind::Constant:
                if (f.value().is_zero()) return integer(0);
                constant_acc *= f.value();
                continue;
            default: break;
        }
        Expr base = f;
        GaussianRational exp{Rational(1)};
        if (f.kind() == Kind::Power) {
            base = f.base();
            exp = f.exponent();
        }
        bool found = false;
        for (auto& g : groups) {
            if (g.first == base) {
                g.second = g.second + exp;
                found = true;
                break;
            }
        }
        if (!found) groups.emplace_back(std::move(base), exp);
    }
    std::vector<Expr> out;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        auto& g = groups[gi];
        if (g.second.is_zero()) continue;
        Expr rebuilt = g.second.is_one() ? g.first : power(g.first, g.second);
        // Rebuilding may fold to a constant (i^2 -> -1) or expand to a
        // product ((2x)^2 -> 4x^2); restart the merge in those cases.
        if (rebuilt.kind() == Kind::Constant) {
            if (rebuilt.value().is_zero()) return integer(0);
            constant_acc *= rebuilt.value();
        } else if (rebuilt.kind() == Kind::Product) {
            std::vector<Expr> rest;
            rest.push_back(constant(constant_acc));
            rest.push_back(std::move(rebuilt));
            for (Expr& done : out) rest.push_back(std::move(done));
            for (std::size_t gj = gi + 1; gj < groups.size(); ++gj) {
                if (groups[gj].second.is_zero()) continue;
                if (groups[gj].second.is_one()) rest.push_back(groups[gj].first);
                else rest.push_back(power(groups[gj].first, groups[gj].second));
            }
            return product(std::move(rest));
        } else {
            out.push_back(std::move(rebuilt));
        }
    }
    if (constant_acc.is_zero()) return integer(0);
    if (out.empty()) return constant(constant_acc);
    std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) {
        int c = a.degree().compare(b.degree());
        if (c != 0) return c < 0; // lower degree first
        return a.str() < b.str();
    });
    if (constant_acc.is_one()) {
        if (out.size() == 1) return out[0];
    } else {
        out.insert(out.begin(), constant(constant_acc));
    }
    detail::Node n;
    n.kind = Kind::Product;
    n.kids = std::move(out);
    return finish(std::move(n));
}

Expr Expr::power(Expr base, GaussianRational e) {
    if (e.is_zero()) return integer(1);
    if (e.is_one()) return base;
    if (base.kind() == Kind::Constant) {
        const Rational& c = base.value();
        if (c.is_zero()) {
            if (e.re.signum() > 0) return integer(0);
            fail(ErrorCode::Pole, "zero raised to a non-positive power");
        }
        if (c.is_one()) return integer(1);
        if (e.is_integer() && e.re.numerator().fits_int64()) {
            long long n = e.re.numerator().to_int64();
            if (n >= -4096 && n <= 4096) return constant(c.pow(n));
        }
        if (e.is_real() && !e.re.is_integer() && e.re.denominator().fits_int64()) {
            long long q = e.re.denominator().to_int64();
            if (q <= 64 && c.signum() > 0) {
                if (auto root = Rational::nth_root_exact(c, static_cast<unsigned>(q))) {
                    if (e.re.numerator().fits_int64()) {
                        long long p = e.re.numerator().to_int64();
                        if (p >= -4096 && p <= 4096) return constant(root->pow(p));
                    }
                }
            }
            // sqrt of a negative rational: principal value i*sqrt(-c).
            if (c.signum() < 0 && e.re == Rational(1, 2)) {
                return product({imaginary(), power(constant(-c), e)});
            }
        }
    }
    if (base.kind() == Kind::ImaginaryUnit && e.is_integer() && e.re.numerator().fits_int64()) {
        long long n = ((e.re.numerator().to_int64() % 4) + 4) % 4;
        switch (n) {
            case 0: return integer(1);
            case 1: return base;
            case 2: return integer(-1);
            default: return product({integer(-1), imaginary()});
        }
    }
    if (base.kind() == Kind::Power && e.is_integer()) {
        return power(base.base(), base.exponent() * e);
    }
    if (base.kind() == Kind::Product && e.is_integer()) {
        std::vector<Expr> fs;
        for (const Expr& k : base.children()) fs.push_back(power(k, e));
        return product(std::move(fs));
    }
    detail::Node n;
    n.kind = Kind::Power;
    n.exponent = std::move(e);
    n.kids.push_back(std::move(base));
    return finish(std::move(n));
}

bool Expr::operator==(const Expr& o) const {
    if (p_ == o.p_) return true;
    return p_->hash == o.p_->hash && p_->repr == o.p_->repr;
}

bool Expr::is_number() const {
    switch (kind()) {
        case Kind::Variable: return false;
        case Kind::Constant:
        case Kind::ImaginaryUnit:
        case Kind::Pi: return true;
        default:
            for (const Expr& k : children()) {
                if (!k.is_number()) return false;
            }
            return true;
    }
}

bool Expr::contains(const std::string& var) const {
    if (kind() == Kind::Variable) return name() == var;
    for (const Expr& k : children()) {
        if (k.contains(var)) return true;
    }
    return false;
}

void Expr::collect_variables(std::set<std::string>& out) const {
    if (kind() == Kind::Variable) {
        out.insert(name());
        return;
    }
    for (const Expr& k : children()) k.collect_variables(out);
}

std::set<std::string> Expr::variables() const {
    std::set<std::string> out;
    collect_variables(out);
    return out;
}

Expr Expr::substitute(const std::string& var, const Expr& replacement) const {
    switch (kind()) {
        case Kind::Variable:
            return name() == var ? replacement : *this;
        case Kind::Constant:
        case Kind::ImaginaryUnit:
        case Kind::Pi:
            return *this;
        case Kind::Sum: {
            std::vector<Expr> kids;
            for (const Expr& k : children()) kids.push_back(k.substitute(var, replacement));
            return sum(std::move(kids));
        }
        case Kind::Product: {
            std::vector<Expr> kids;
            for (const Expr& k : children()) kids.push_back(k.substitute(var, replacement));
            return product(std::move(kids));
        }
        case Kind::Power:
            return power(base().substitute(var, replacement), exponent());
        case Kind::Call:
            return call(fn(), arg().substitute(var, replacement));
        case Kind::AbsoluteValue:
            return abs(arg().substitute(var, replacement));
    }
    return *this;
}

std::optional<GaussianRational> Expr::as_gaussian() const {
    switch (kind()) {
        case Kind::Constant: return GaussianRational(value());
        case Kind::ImaginaryUnit: return GaussianRational(Rational(0), Rational(1));
        case Kind::Sum: {
            GaussianRational acc;
            for (const Expr& k : children()) {
                auto g = k.as_gaussian();
                if (!g) return std::nullopt;
                acc = acc + *g;
            }
            return acc;
        }
        case Kind::Product: {
            GaussianRational acc{Rational(1)};
            for (const Expr& k : children()) {
                auto g = k.as_gaussian();
                if (!g) return std::nullopt;
                acc = acc * *g;
            }
            return acc;
        }
        case Kind::Power: {
            auto g = base().as_gaussian();
            if (!g || !exponent().is_integer()) return std::nullopt;
            if (!exponent().re.numerator().fits_int64()) return std::nullopt;
            long long n = exponent().re.numerator().to_int64();
            if (n < -64 || n > 64) return std::nullopt;
            GaussianRational acc{Rational(1)};
            GaussianRational b = *g;
            if (n < 0) {
                if (b.is_zero()) return std::nullopt;
                b = GaussianRational{Rational(1)} / b;
                n = -n;
            }
            for (long long j = 0; j < n; ++j) acc = acc * b;
            return acc;
        }
        default: return std::nullopt;
    }
}

std::optional<Rational> Expr::eval_exact(const std::map<std::string, Rational>& bind) const {
    switch (kind()) {
        case Kind::Constant: return value();
        case Kind::Variable: {
            auto it = bind.find(name());
            if (it == bind.end()) return std::nullopt;
            return it->second;
        }
        case Kind::Sum: {
            Rational acc(0);
            for (const Expr& k : children()) {
                auto v = k.eval_exact(bind);
                if (!v) return std::nullopt;
                acc += *v;
            }
            return acc;
        }
        case Kind::Product: {
            Rational acc(1);
            for (const Expr& k : children()) {
                auto v = k.eval_exact(bind);
                if (!v) return std::nullopt;
                acc *= *v;
            }
            return acc;
        }
        case Kind::Power: {
            auto b = base().eval_exact(bind);
            if (!b || !exponent().is_real()) return std::nullopt;
            const Rational& w = exponent().re;
            if (!w.numerator().fits_int64() || !w.denominator().fits_int64()) return std::nullopt;
            long long p = w.numerator().to_int64();
            long long q = w.denominator().to_int64();
            if (q > 64 || p > 4096 || p < -4096) return std::nullopt;
            if (b->is_zero()) {
                if (p <= 0) return std::nullopt;
                return Rational(0);
            }
            Rational raised = b->pow(p);
            if (q == 1) return raised;
            return Rational::nth_root_exact(raised, static_cast<unsigned>(q));
        }
        case Kind::AbsoluteValue: {
            auto v = arg().eval_exact(bind);
            if (!v) return std::nullopt;
            return v->abs();
        }
        default: return std::nullopt;
    }
}

std::string Interval::to_string() const {
    auto end_str = [](double v) -> std::string {
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    };
    return "(" + end_str(lo) + "," + end_str(hi) + ")";
}

} // namespace usm

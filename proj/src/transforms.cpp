#include "usm/transforms.hpp"

#include <cmath>

#include "usm/errors.hpp"
#include "usm/polynomial.hpp"
#include "usm/simplify.hpp"

namespace usm::transforms {

namespace {

Expr half() { return Expr::constant(Rational(1, 2)); }
GaussianRational g_int(long long n) { return GaussianRational(Rational(n)); }
Expr sq(const Expr& e) { return Expr::power(e, g_int(2)); }
Expr inv(const Expr& e) { return Expr::power(e, g_int(-1)); }

} // namespace

const char* shape_name(Shape s) {
    switch (s) {
        case Shape::Difference: return "difference";
        case Shape::Circular: return "circular";
        case Shape::Sum: return "sum";
        case Shape::Degenerate: return "degenerate";
    }
    return "?";
}

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::Upper: return "upper";
        case Branch::Lower: return "lower";
        case Branch::NotApplicable: return "n/a";
    }
    return "?";
}

QuadraticForm classify_quadratic(const Rational& p, const Rational& q, const Rational& r) {
    if (p.is_zero()) fail(ErrorCode::Precondition, "not a quadratic: leading coefficient is zero");
    QuadraticForm out;
    out.aprime = p;
    out.bprime = q;
    out.cprime = r;
    out.delta = q * q - Rational(4) * p * r;
    out.shift = q / (Rational(2) * p);
    int ds = out.delta.signum();
    if (ds == 0) {
        out.shape = Shape::Degenerate;
    } else if (ds > 0) {
        out.shape = p.signum() > 0 ? Shape::Difference : Shape::Circular;
    } else {
        if (p.signum() < 0) {
            fail(ErrorCode::Domain, "quadratic is negative definite; its square root is nowhere real");
        }
        out.shape = Shape::Sum;
    }
    Rational radius_sq = out.delta.abs() / (Rational(4) * p * p);
    out.radius_exact = Rational::sqrt_exact(radius_sq);
    out.radius_expr = out.radius_exact
                          ? Expr::constant(*out.radius_exact)
                          : simplify(Expr::power(Expr::constant(radius_sq),
                                                 GaussianRational(Rational(1, 2))));
    out.radius = std::sqrt(radius_sq.to_double());
    Rational ap = p.abs();
    out.outer_exact = Rational::sqrt_exact(ap);
    out.outer_expr = out.outer_exact
                         ? Expr::constant(*out.outer_exact)
                         : simplify(Expr::power(Expr::constant(ap), GaussianRational(Rational(1, 2))));
    out.outer = std::sqrt(ap.to_double());
    return out;
}

namespace {

// ----- template detection -----------------------------------------------------

enum class Family { T, R, S, ExpAcos };

struct Evidence {
    Family family;
    bool strong = false; // radical or ratio block: forces kind 2/5
    Rational a, b;
};

// The quadratic under a radical, classified against a plan parameterization.
std::optional<Evidence> quadratic_evidence(const Poly& poly) {
    if (poly.degree() != 2) return std::nullopt;
    QuadraticForm qf = classify_quadratic(poly.coeff(2), poly.coeff(1), poly.coeff(0));
    if (qf.shape == Shape::Degenerate) {
        fail(ErrorCode::NoTemplate,
             "degenerate quadratic under a radical; rewrite sqrt(a'X^2) as sqrt(|a'|)|X| first");
    }
    if (!qf.radius_exact) {
        fail(ErrorCode::NoTemplate, "quadratic radius is irrational; no rational plan exists");
    }
    Evidence ev;
    ev.strong = true;
    ev.a = *qf.radius_exact;
    ev.b = qf.shift;
    switch (qf.shape) {
        case Shape::Difference: ev.family = Family::T; break;
        case Shape::Circular: ev.family = Family::R; break;
        case Shape::Sum: ev.family = Family::S; break;
        default: return std::nullopt;
    }
    return ev;
}

// Mobius ratio c*(x+c1)/(x+c2) under a radical.
std::optional<Evidence> ratio_evidence(const Expr& base, const std::string& var) {
    auto fr = expr_to_fraction(base, var);
    if (!fr) return std::nullopt;
    Poly g = Poly::gcd(fr->num, fr->den);
    Poly num = fr->num / g, den = fr->den / g;
    if (num.degree() != 1 || den.degree() != 1) return std::nullopt;
    Rational c = num.lead() / den.lead();
    Rational c1 = num.coeff(0) / num.lead();
    Rational c2 = den.coeff(0) / den.lead();
    if (c1 == c2) return std::nullopt;
    Evidence ev;
    ev.strong = true;
    if (c.signum() > 0) {
        ev.family = Family::T;
        ev.b = (c1 + c2) / Rational(2);
        ev.a = ((c2 - c1) / Rational(2)).abs();
    } else {
        ev.family = Family::R;
        ev.b = (c1 + c2) / Rational(2);
        ev.a = ((c1 - c2) / Rational(2)).abs();
    }
    return ev;
}

// tan((1/2) * f(u)) with u linear; returns the inverse-trig tag and u.
std::optional<std::pair<Fn, Expr>> half_angle_arg(const Expr& e) {
    if (e.kind() != Kind::Call || e.fn() != Fn::Tan) return std::nullopt;
    const Expr& arg = e.arg();
    if (arg.kind() != Kind::Product || arg.children().size() != 2) return std::nullopt;
    const Expr& c = arg.children()[0];
    const Expr& call = arg.children()[1];
    if (!c.is_constant(Rational(1, 2)) || call.kind() != Kind::Call) return std::nullopt;
    Fn f = call.fn();
    if (f != Fn::Acsc && f != Fn::Asec && f != Fn::Asin && f != Fn::Acos) return std::nullopt;
    return std::make_pair(f, call.arg());
}

std::optional<std::pair<Rational, Rational>> plan_ab_from_linear(const Expr& u,
                                                                 const std::string& var) {
    auto lin = linear_coeffs(u, var);
    if (!lin || lin->first.is_zero()) return std::nullopt;
    const auto& [p, q] = *lin;
    if (p.signum() <= 0) return std::nullopt; // y = (x+b)/a with a > 0
    return std::make_pair(p.reciprocal(), q / p);
}

void scan(const Expr& e, const std::string& var, std::vector<Evidence>& out) {
    if (!e.contains(var)) return;
    if (e.kind() == Kind::Power) {
        const GaussianRational& w = e.exponent();
        bool half_power = w.is_real() && !w.re.is_integer() &&
                          w.re.denominator() == BigInt(2);
        if (half_power) {
            if (auto p = expr_to_poly(e.base(), var); p && p->degree() == 2) {
                if (auto ev = quadratic_evidence(*p)) {
                    out.push_back(*ev);
                    return;
                }
            } else if (!p) {
                if (auto ev = ratio_evidence(e.base(), var)) {
                    out.push_back(*ev);
                    return;
                }
            }
        }
        scan(e.base(), var, out);
        return;
    }
    if (auto ha = half_angle_arg(e)) {
        if (auto ab = plan_ab_from_linear(ha->second, var)) {
            Evidence ev;
            ev.family = (ha->first == Fn::Acsc || ha->first == Fn::Asec) ? Family::T : Family::R;
            ev.strong = false;
            ev.a = ab->first;
            ev.b = ab->second;
            out.push_back(ev);
            return;
        }
    }
    if (e.kind() == Kind::Call && e.fn() == Fn::Exp && e.arg().kind() == Kind::Call &&
        e.arg().fn() == Fn::Acos) {
        if (auto ab = plan_ab_from_linear(e.arg().arg(), var)) {
            Evidence ev;
            ev.family = Family::ExpAcos;
            ev.strong = false;
            ev.a = ab->first;
            ev.b = ab->second;
            out.push_back(ev);
            return;
        }
    }
    for (const Expr& k : e.children()) scan(k, var, out);
}

} // namespace

TransformPlan detect_template(const Expr& e, const std::string& var, const Interval& domain) {
    std::vector<Evidence> evidence;
    scan(simplify(e), var, evidence);
    if (evidence.empty()) fail(ErrorCode::NoTemplate, "no substitution template matched");
    const Evidence& first = evidence[0];
    bool any_strong = false;
    std::size_t exp_acos_count = 0;
    for (const Evidence& ev : evidence) {
        if (ev.a != first.a || ev.b != first.b) {
            fail(ErrorCode::Conflicting, "templates disagree on the (a, b) normalization");
        }
        Family f0 = first.family == Family::ExpAcos ? Family::T : first.family;
        Family fe = ev.family == Family::ExpAcos ? Family::T : ev.family;
        if (f0 != fe) {
            fail(ErrorCode::Conflicting, "templates from different transform families");
        }
        if (ev.family == Family::ExpAcos) ++exp_acos_count;
        else if (ev.strong) any_strong = true;
    }
    bool exp_acos = exp_acos_count > 0;
    if (exp_acos && exp_acos_count != evidence.size()) {
        // |y| <= 1 for the exp(acos) route, |y| >= 1 for every other t-family
        // block: the domains cannot agree.
        fail(ErrorCode::Conflicting, "exp(acos) route cannot mix with |y| >= 1 templates");
    }

    TransformPlan plan;
    plan.a = first.a;
    plan.b = first.b;
    plan.variable = var;
    plan.domain = domain;
    double a = plan.a.to_double();
    double b = plan.b.to_double();
    double hi_edge = a - b;   // x with y = +1
    double lo_edge = -a - b;  // x with y = -1

    Family fam = first.family;
    if (exp_acos) {
        plan.kind = 1;
        plan.route = Route::ExpAcos;
        plan.branch = Branch::Upper;
        plan.param_name = "t";
        Interval band(lo_edge, hi_edge, false, true);
        if (!band.contains(domain)) {
            fail(ErrorCode::Domain,
                 "exp(acos) template needs the domain inside (-a-b, a-b]");
        }
        if (domain.lo <= lo_edge + 1e-9 && !domain.lo_closed) {
            // open at the branch-cut end already; margin is enforced at use
        }
    } else if (fam == Family::T) {
        plan.kind = any_strong ? 2 : 1;
        plan.param_name = "t";
        if (Interval(hi_edge, std::numeric_limits<double>::infinity(), true, false)
                .contains(domain)) {
            plan.branch = Branch::Upper;
        } else if (Interval(-std::numeric_limits<double>::infinity(), lo_edge, false, true)
                       .contains(domain)) {
            plan.branch = Branch::Lower;
        } else {
            fail(ErrorCode::Domain,
                 "domain straddles the |y| >= 1 components; split the request at x = "
                 "-b +- a");
        }
    } else if (fam == Family::R) {
        plan.kind = any_strong ? 5 : 4;
        plan.param_name = "r";
        if (!Interval(lo_edge, hi_edge, true, true).contains(domain)) {
            fail(ErrorCode::Domain, "domain must sit inside |x + b| <= a");
        }
        if (domain.lo >= -b) plan.branch = Branch::Upper;
        else if (domain.hi <= -b) plan.branch = Branch::Lower;
        else plan.branch = Branch::NotApplicable;
    } else {
        plan.kind = 3;
        plan.param_name = "s";
        plan.branch = Branch::NotApplicable;
    }
    if (plan.param_name == var) plan.param_name += "2";
    return plan;
}

namespace {

Expr quadratic_in_x(const std::string& var, const Rational& b, const Rational& a, int sign_a2) {
    // (x+b)^2 + sign * a^2, expanded
    Expr x = Expr::variable(var);
    return Expr::sum({sq(x), Expr::constant(Rational(2) * b) * x,
                      Expr::constant(b * b + Rational(sign_a2) * a * a)});
}

Expr y_of_x(const std::string& var, const Rational& a, const Rational& b) {
    return Expr::constant(a.reciprocal()) * (Expr::variable(var) + Expr::constant(b));
}

Expr tan_half(Fn f, const Expr& y) { return Expr::call(Fn::Tan, half() * Expr::call(f, y)); }

} // namespace

SubstitutionMap build_substitution(const TransformPlan& plan) {
    SubstitutionMap m;
    m.plan = plan;
    const std::string& var = plan.variable;
    Expr x = Expr::variable(var);
    Expr p = Expr::variable(plan.param_name);
    Expr A = Expr::constant(plan.a);
    Expr B = Expr::constant(plan.b);
    Rational a = plan.a, b = plan.b;

    if (plan.kind == 0) {
        m.x_of_param = p;
        m.jacobian = Expr::integer(1);
        m.backsub.emplace_back(plan.domain, x);
        return m;
    }
    if (plan.a.signum() <= 0) fail(ErrorCode::Precondition, "plan needs a > 0");

    switch (plan.kind) {
        case 1:
        case 2: {
            // x = a(t^2+1)/(2t) - b, dx = a(t^2-1)/(2t^2) dt
            m.x_of_param = Expr::constant(a / Rational(2)) * (sq(p) + Expr::integer(1)) * inv(p) -
                           B;
            m.jacobian = Expr::constant(a / Rational(2)) * (sq(p) - Expr::integer(1)) *
                         Expr::power(p, g_int(-2));
            Expr y = y_of_x(var, a, b);
            Expr ratio_up = (Expr::integer(1) - p) * inv(Expr::integer(1) + p);
            m.block_map.emplace_back(tan_half(Fn::Acsc, y), p);
            m.block_map.emplace_back(tan_half(Fn::Asec, y), ratio_up);
            Expr rad = Expr::sqrt(quadratic_in_x(var, b, a, -1));
            Expr rad_repl = Expr::constant(a / Rational(2)) * (sq(p) - Expr::integer(1)) * inv(p);
            if (plan.branch == Branch::Upper) rad_repl = -rad_repl;
            m.block_map.emplace_back(rad, rad_repl);
            if (plan.route == Route::ExpAcos) {
                m.block_map.emplace_back(Expr::call(Fn::Exp, Expr::call(Fn::Acos, y)),
                                         Expr::power(p, GaussianRational(Rational(0), Rational(1))));
            }
            Expr q = quadratic_in_x(var, b, a, -1);
            Expr chord = x + B;
            Expr root = Expr::sqrt(q);
            Expr inv_a = Expr::constant(a.reciprocal());
            if (plan.route == Route::ExpAcos) {
                Interval piece(-a.to_double() - b.to_double(), a.to_double() - b.to_double(),
                               false, true);
                m.backsub.emplace_back(piece, inv_a * (chord - root));
            } else if (plan.branch == Branch::Upper) {
                // t = (x+b - sqrt(Q))/a, emitted through the conjugate
                // a/(x+b + sqrt(Q)) which does not cancel for large x.
                Interval piece(a.to_double() - b.to_double(),
                               std::numeric_limits<double>::infinity(), true, false);
                m.backsub.emplace_back(piece, A * inv(chord + root));
            } else {
                // t = (x+b + sqrt(Q))/a = a/(x+b - sqrt(Q)) on y <= -1
                Interval piece(-std::numeric_limits<double>::infinity(),
                               -a.to_double() - b.to_double(), false, true);
                m.backsub.emplace_back(piece, A * inv(chord - root));
            }
            break;
        }
        case 3: {
            m.x_of_param = Expr::constant(a / Rational(2)) * (sq(p) - Expr::integer(1)) * inv(p) -
                           B;
            m.jacobian = Expr::constant(a / Rational(2)) * (sq(p) + Expr::integer(1)) *
                         Expr::power(p, g_int(-2));
            Expr rad = Expr::sqrt(quadratic_in_x(var, b, a, +1));
            m.block_map.emplace_back(
                rad, Expr::constant(a / Rational(2)) * (sq(p) + Expr::integer(1)) * inv(p));
            Expr root = Expr::sqrt(quadratic_in_x(var, b, a, +1));
            // s = (x+b + sqrt(Q))/a cancels as x -> -inf; use the conjugate
            // a/(sqrt(Q) - (x+b)) on the left of the axis point.
            m.backsub.emplace_back(
                Interval(-std::numeric_limits<double>::infinity(), -b.to_double(), false, true),
                A * inv(root - (x + B)));
            m.backsub.emplace_back(
                Interval(-b.to_double(), std::numeric_limits<double>::infinity(), true, false),
                Expr::constant(a.reciprocal()) * (x + B + root));
            break;
        }
        case 4:
        case 5: {
            Expr one_p_r2 = Expr::integer(1) + sq(p);
            m.x_of_param = Expr::constant(Rational(2) * a) * p * inv(one_p_r2) - B;
            m.jacobian = Expr::constant(Rational(2) * a) * (Expr::integer(1) - sq(p)) *
                         Expr::power(one_p_r2, g_int(-2));
            Expr y = y_of_x(var, a, b);
            m.block_map.emplace_back(tan_half(Fn::Asin, y), p);
            m.block_map.emplace_back(tan_half(Fn::Acos, y),
                                     (Expr::integer(1) - p) * inv(Expr::integer(1) + p));
            // a^2 - (x+b)^2 expanded
            Expr circ = Expr::sum({-sq(x), Expr::constant(Rational(-2) * b) * x,
                                   Expr::constant(a * a - b * b)});
            m.block_map.emplace_back(Expr::sqrt(circ),
                                     A * (Expr::integer(1) - sq(p)) * inv(one_p_r2));
            m.block_map.emplace_back(
                Expr::sqrt((A + B + x) * inv(A - B - x)),
                (Expr::integer(1) + p) * inv(Expr::integer(1) - p));
            Expr root = Expr::sqrt(circ);
            m.backsub.emplace_back(
                Interval(-a.to_double() - b.to_double(), a.to_double() - b.to_double(), true, true),
                (x + B) * inv(A + root));
            break;
        }
        default:
            fail(ErrorCode::Precondition, "bad transform kind");
    }
    // Restrict the back-substitution pieces to the plan domain.
    for (auto& piece : m.backsub) {
        piece.first = piece.first.intersect(plan.domain);
    }
    return m;
}

int param_sign(const TransformPlan& plan) {
    switch (plan.kind) {
        case 1:
        case 2:
            if (plan.route == Route::ExpAcos) return 0;
            return plan.branch == Branch::Upper ? +1 : -1;
        case 3: return +1;
        case 4:
        case 5:
            if (plan.route == Route::Weierstrass) {
                if (plan.domain.lo >= 0) return +1;
                if (plan.domain.hi <= 0) return -1;
                return 0;
            }
            if (plan.branch == Branch::Upper) return +1;
            if (plan.branch == Branch::Lower) return -1;
            return 0;
        default: return 0;
    }
}

namespace {

// ----- block matching during substitution --------------------------------------

struct Replacer {
    const SubstitutionMap& m;
    const std::string& var;

    bool t_family() const { return m.plan.kind == 1 || m.plan.kind == 2; }
    bool r_family() const { return m.plan.kind == 4 || m.plan.kind == 5; }

    Expr param() const { return Expr::variable(m.plan.param_name); }

    // Replacement for sqrt of the plan's canonical quadratic shape.
    Expr shape_sqrt_repl() const {
        Expr p = param();
        Expr A = Expr::constant(m.plan.a);
        if (t_family()) {
            Expr v = Expr::constant(m.plan.a / Rational(2)) * (sq(p) - Expr::integer(1)) * inv(p);
            return m.plan.branch == Branch::Upper || m.plan.route == Route::ExpAcos ? -v : v;
        }
        if (r_family()) {
            return A * (Expr::integer(1) - sq(p)) * inv(Expr::integer(1) + sq(p));
        }
        return Expr::constant(m.plan.a / Rational(2)) * (sq(p) + Expr::integer(1)) * inv(p);
    }

    Expr ratio_sqrt_repl(bool inverted) const {
        Expr p = param();
        Expr one = Expr::integer(1);
        if (t_family()) {
            Expr v = (one - p) * inv(one + p);
            return inverted ? inv(v) : v;
        }
        Expr v = (one + p) * inv(one - p);
        return inverted ? inv(v) : v;
    }

    // base^(k + 1/2) -> repl^(2k+1) with repl the sqrt replacement.
    Expr half_power(const Expr& sqrt_repl, const Rational& w) const {
        Rational two_w = w * Rational(2); // odd integer
        if (!two_w.numerator().fits_int64()) fail(ErrorCode::Unsupported, "huge radical power");
        return Expr::power(sqrt_repl, GaussianRational(Rational(two_w.numerator().to_int64())));
    }

    std::optional<Expr> try_quadratic_block(const Expr& base, const Rational& w) const {
        auto poly = expr_to_poly(base, var);
        if (!poly || poly->degree() != 2) return std::nullopt;
        QuadraticForm qf = classify_quadratic(poly->coeff(2), poly->coeff(1), poly->coeff(0));
        if (!qf.radius_exact) return std::nullopt;
        bool family_ok = (t_family() && qf.shape == Shape::Difference) ||
                         (r_family() && qf.shape == Shape::Circular) ||
                         (m.plan.kind == 3 && qf.shape == Shape::Sum);
        if (!family_ok || *qf.radius_exact != m.plan.a || qf.shift != m.plan.b) {
            fail(ErrorCode::Conflicting,
                 "radical block incompatible with the selected plan");
        }
        Expr repl = qf.outer_expr * shape_sqrt_repl();
        return half_power(repl, w);
    }

    std::optional<Expr> try_ratio_block(const Expr& base, const Rational& w) const {
        auto fr = expr_to_fraction(base, var);
        if (!fr) return std::nullopt;
        Poly g = Poly::gcd(fr->num, fr->den);
        Poly num = fr->num / g, den = fr->den / g;
        if (num.degree() != 1 || den.degree() != 1) return std::nullopt;
        Rational c = num.lead() / den.lead();
        Rational c1 = num.coeff(0) / num.lead();
        Rational c2 = den.coeff(0) / den.lead();
        if (c1 == c2) return std::nullopt;
        Rational lo = c1 < c2 ? c1 : c2, hi = c1 < c2 ? c2 : c1;
        Rational want_lo = m.plan.b - m.plan.a, want_hi = m.plan.b + m.plan.a;
        bool t_form = c.signum() > 0;
        if ((t_form && !t_family()) || (!t_form && !r_family()) || lo != want_lo ||
            hi != want_hi) {
            fail(ErrorCode::Conflicting, "root-ratio block incompatible with the selected plan");
        }
        bool inverted = t_form ? (c1 == want_hi) : (c1 == want_lo);
        Expr scale = simplify(Expr::power(Expr::constant(c.abs()), GaussianRational(Rational(1, 2))));
        return half_power(scale * ratio_sqrt_repl(inverted), w);
    }

    Expr replace(const Expr& e) const {
        if (!e.contains(var)) return e;
        if (e.kind() == Kind::Variable) {
            if (m.plan.route == Route::Weierstrass) {
                fail(ErrorCode::NotRational,
                     "the variable may only appear inside sin and cos");
            }
            return m.x_of_param;
        }
        if (e.kind() == Kind::Power) {
            const GaussianRational& w = e.exponent();
            if (w.is_real() && !w.re.is_integer() && w.re.denominator() == BigInt(2)) {
                if (auto r = try_quadratic_block(e.base(), w.re)) return *r;
                if (auto r = try_ratio_block(e.base(), w.re)) return *r;
            }
            return Expr::power(replace(e.base()), w);
        }
        if (auto ha = half_angle_arg(e)) {
            if (auto ab = plan_ab_from_linear(ha->second, var)) {
                if (ab->first == m.plan.a && ab->second == m.plan.b) {
                    Fn f = ha->first;
                    bool direct = (f == Fn::Acsc && t_family()) || (f == Fn::Asin && r_family());
                    bool flipped = (f == Fn::Asec && t_family()) || (f == Fn::Acos && r_family());
                    if (direct) return param();
                    if (flipped) {
                        Expr one = Expr::integer(1);
                        return (one - param()) * inv(one + param());
                    }
                }
                fail(ErrorCode::Conflicting,
                     "half-angle block incompatible with the selected plan");
            }
        }
        if (m.plan.route == Route::ExpAcos && e.kind() == Kind::Call && e.fn() == Fn::Exp &&
            e.arg().kind() == Kind::Call && e.arg().fn() == Fn::Acos) {
            if (auto ab = plan_ab_from_linear(e.arg().arg(), var)) {
                if (ab->first == m.plan.a && ab->second == m.plan.b) {
                    return Expr::power(param(), GaussianRational(Rational(0), Rational(1)));
                }
            }
        }
        if (m.plan.route == Route::Weierstrass && e.kind() == Kind::Call &&
            e.arg() == Expr::variable(var)) {
            Expr p = param();
            Expr one_p_r2 = Expr::integer(1) + sq(p);
            if (e.fn() == Fn::Sin) return Expr::integer(2) * p * inv(one_p_r2);
            if (e.fn() == Fn::Cos) return (Expr::integer(1) - sq(p)) * inv(one_p_r2);
        }
        switch (e.kind()) {
            case Kind::Sum: {
                std::vector<Expr> kids;
                for (const Expr& k : e.children()) kids.push_back(replace(k));
                return Expr::sum(std::move(kids));
            }
            case Kind::Product: {
                std::vector<Expr> kids;
                for (const Expr& k : e.children()) kids.push_back(replace(k));
                return Expr::product(std::move(kids));
            }
            case Kind::Call:
            case Kind::AbsoluteValue:
                // Any other function of the variable is not a mapped block;
                // the template matched something it should not have.
                fail(ErrorCode::Unmapped,
                     "block '" + e.str() + "' is not covered by the substitution");
            default:
                return e;
        }
    }
};

} // namespace

Expr apply_substitution(const Expr& e, const SubstitutionMap& m) {
    Replacer rep{m, m.plan.variable};
    Expr replaced = rep.replace(simplify(e));
    // kind 0 maps the variable to itself, so the check is vacuous there
    if (m.plan.kind != 0 && replaced.contains(m.plan.variable)) {
        fail(ErrorCode::Unmapped, "an unmapped block still depends on the variable");
    }
    Expr full = replaced * m.jacobian;
    if (m.plan.route == Route::ExpAcos) {
        // the parameter lives on the unit circle; no real-sign assumptions
        return simplify(full);
    }
    return simplify_in_domain(full, m.plan.param_name, param_sign(m.plan));
}

std::pair<Expr, SubstitutionMap> weierstrass_reduce(const WeierstrassInput& w) {
    TransformPlan plan;
    plan.kind = 5;
    plan.route = Route::Weierstrass;
    plan.a = Rational(1);
    plan.b = Rational(0);
    plan.branch = Branch::NotApplicable;
    plan.variable = w.variable;
    plan.param_name = w.variable == "r" ? "r2" : "r";
    constexpr double kPi = 3.141592653589793238462643383279502884;
    plan.domain = Interval(-kPi, kPi, false, false);

    SubstitutionMap m;
    m.plan = plan;
    Expr p = Expr::variable(plan.param_name);
    Expr one_p_r2 = Expr::integer(1) + sq(p);
    m.x_of_param = Expr::integer(2) * Expr::call(Fn::Atan, p);
    m.jacobian = Expr::integer(2) * inv(one_p_r2);
    Expr x = Expr::variable(w.variable);
    m.block_map.emplace_back(Expr::call(Fn::Sin, x), Expr::integer(2) * p * inv(one_p_r2));
    m.block_map.emplace_back(Expr::call(Fn::Cos, x),
                             (Expr::integer(1) - sq(p)) * inv(one_p_r2));
    m.backsub.emplace_back(plan.domain, Expr::call(Fn::Tan, half() * x));

    Replacer rep{m, w.variable};
    Expr replaced = rep.replace(simplify(w.integrand));
    if (replaced.contains(w.variable)) {
        fail(ErrorCode::NotRational, "integrand is not rational in sin and cos of the variable");
    }
    Expr reduced = simplify(replaced * m.jacobian);
    return {reduced, m};
}

namespace {

EulerParameters euler_common(const QuadraticForm& q, double x, const Rational* exact_x) {
    EulerParameters out;
    double A = q.radius;
    double X = x + q.shift.to_double();
    if (q.shape == Shape::Difference) {
        if (std::abs(X) < A * (1.0 - 1e-12)) {
            fail(ErrorCode::Domain, "difference shape needs |X| >= A");
        }
        double S = std::sqrt(std::max(0.0, X * X - A * A));
        out.U_plus = X + S;
        out.U_minus = X - S;
        out.t_usm = X >= 0 ? (X - S) / A : (X + S) / A;
        if (exact_x && q.radius_exact) {
            Rational Xr = *exact_x + q.shift;
            auto Sr = Rational::sqrt_exact(Xr * Xr - *q.radius_exact * *q.radius_exact);
            if (Sr) {
                out.U_plus_exact = Xr + *Sr;
                out.U_minus_exact = Xr - *Sr;
                out.t_usm_exact = (Xr.signum() >= 0 ? Xr - *Sr : Xr + *Sr) / *q.radius_exact;
                out.U_plus = out.U_plus_exact->to_double();
                out.U_minus = out.U_minus_exact->to_double();
                out.t_usm = out.t_usm_exact->to_double();
            }
        }
        return out;
    }
    if (q.shape == Shape::Circular) {
        if (std::abs(X) > A * (1.0 + 1e-12)) {
            fail(ErrorCode::Domain, "circular shape needs |X| <= A");
        }
        if (std::abs(X) < 1e-9) {
            fail(ErrorCode::ExcludedPoint, "Euler parameter at X = 0 exists only as a limit");
        }
        double C = std::sqrt(std::max(0.0, A * A - X * X));
        out.t_euler = (C - A) / X;
        out.r_usm = X / (A + C);
        if (exact_x && q.radius_exact) {
            Rational Xr = *exact_x + q.shift;
            auto Cr = Rational::sqrt_exact(*q.radius_exact * *q.radius_exact - Xr * Xr);
            if (Cr && !Xr.is_zero()) {
                out.t_euler_exact = (*Cr - *q.radius_exact) / Xr;
                out.r_usm_exact = Xr / (*q.radius_exact + *Cr);
                out.t_euler = out.t_euler_exact->to_double();
                out.r_usm = out.r_usm_exact->to_double();
            }
        }
        return out;
    }
    fail(ErrorCode::Precondition, "Euler parameters exist for the difference and circular shapes");
}

} // namespace

EulerParameters euler_parameters(const QuadraticForm& q, double x) {
    return euler_common(q, x, nullptr);
}

EulerParameters euler_parameters(const QuadraticForm& q, const Rational& x) {
    return euler_common(q, x.to_double(), &x);
}

} // namespace usm::transforms

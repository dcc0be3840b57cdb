#include "usm/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>

#include "usm/errors.hpp"
#include "usm/eval.hpp"
#include "usm/parser.hpp"
#include "usm/simplify.hpp"

namespace usm::pipeline {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.141592653589793238462643383279502884;

using transforms::Branch;
using transforms::Route;
using transforms::SubstitutionMap;
using transforms::TransformPlan;

// ---------------------------------------------------------------------------
// degenerate radicals: sqrt(a'(x+shift)^2) -> sqrt(|a'|) |x+shift|

struct DegenerateRewrite {
    Expr rewritten;
    std::vector<double> split_points; // shifts whose |X| changes sign
    bool changed = false;
};

Expr degenerate_walk(const Expr& e, const std::string& var, DegenerateRewrite& info) {
    if (e.kind() == Kind::Power && e.exponent().is_real() &&
        e.exponent().re.denominator() == BigInt(2)) {
        if (auto p = expr_to_poly(e.base(), var); p && p->degree() == 2) {
            Rational delta = p->coeff(1) * p->coeff(1) - Rational(4) * p->coeff(2) * p->coeff(0);
            if (delta.is_zero()) {
                if (p->coeff(2).signum() < 0) {
                    fail(ErrorCode::Domain,
                         "sqrt of a non-positive degenerate quadratic is nowhere real");
                }
                Rational shift = p->coeff(1) / (Rational(2) * p->coeff(2));
                Expr outer = simplify(
                    Expr::power(Expr::constant(p->coeff(2)), GaussianRational(Rational(1, 2))));
                Expr X = Expr::variable(var) + Expr::constant(shift);
                Rational two_w = e.exponent().re * Rational(2);
                long long k = two_w.numerator().to_int64(); // odd
                Expr repl = Expr::power(outer, GaussianRational(Rational(k))) *
                            Expr::power(Expr::abs(X), GaussianRational(Rational(k)));
                info.changed = true;
                info.split_points.push_back(-shift.to_double());
                return repl;
            }
        }
        return Expr::power(degenerate_walk(e.base(), var, info), e.exponent());
    }
    switch (e.kind()) {
        case Kind::Sum: {
            std::vector<Expr> kids;
            for (const Expr& c : e.children()) kids.push_back(degenerate_walk(c, var, info));
            return Expr::sum(std::move(kids));
        }
        case Kind::Product: {
            std::vector<Expr> kids;
            for (const Expr& c : e.children()) kids.push_back(degenerate_walk(c, var, info));
            return Expr::product(std::move(kids));
        }
        case Kind::Power:
            return Expr::power(degenerate_walk(e.base(), var, info), e.exponent());
        case Kind::Call:
            return Expr::call(e.fn(), degenerate_walk(e.arg(), var, info));
        case Kind::AbsoluteValue:
            return Expr::abs(degenerate_walk(e.arg(), var, info));
        default:
            return e;
    }
}

// |u| with u linear and a sign fixed on the interval resolves to +-u.
Expr resolve_abs_on(const Expr& e, const std::string& var, const Interval& iv) {
    switch (e.kind()) {
        case Kind::AbsoluteValue: {
            Expr inner = resolve_abs_on(e.arg(), var, iv);
            if (auto lin = linear_coeffs(inner, var); lin && !lin->first.is_zero()) {
                double root = -(lin->second / lin->first).to_double();
                double slope = lin->first.to_double();
                if (iv.lo >= root - 1e-12) return slope > 0 ? inner : simplify(-inner);
                if (iv.hi <= root + 1e-12) return slope > 0 ? simplify(-inner) : inner;
            }
            return Expr::abs(std::move(inner));
        }
        case Kind::Sum: {
            std::vector<Expr> kids;
            for (const Expr& c : e.children()) kids.push_back(resolve_abs_on(c, var, iv));
            return Expr::sum(std::move(kids));
        }
        case Kind::Product: {
            std::vector<Expr> kids;
            for (const Expr& c : e.children()) kids.push_back(resolve_abs_on(c, var, iv));
            return Expr::product(std::move(kids));
        }
        case Kind::Power:
            return Expr::power(resolve_abs_on(e.base(), var, iv), e.exponent());
        case Kind::Call:
            return Expr::call(e.fn(), resolve_abs_on(e.arg(), var, iv));
        default:
            return e;
    }
}

// ---------------------------------------------------------------------------

bool mentions_trig_of_var(const Expr& e, const std::string& var) {
    if (e.kind() == Kind::Call && (e.fn() == Fn::Sin || e.fn() == Fn::Cos) &&
        e.arg() == Expr::variable(var)) {
        return true;
    }
    for (const Expr& k : e.children()) {
        if (mentions_trig_of_var(k, var)) return true;
    }
    return false;
}

// Maps an x limit through the back-substitution, including the analytic
// limits at infinite endpoints.
double map_param_limit(const SubstitutionMap& m, double x) {
    const TransformPlan& plan = m.plan;
    if (plan.route == Route::Weierstrass) {
        if (std::abs(x - kPi) < 1e-12) return kInf;
        if (std::abs(x + kPi) < 1e-12) return -kInf;
    }
    if (std::isfinite(x)) {
        for (const auto& [interval, expr] : m.backsub) {
            if ((x > interval.lo - 1e-12 && x < interval.hi + 1e-12) &&
                (interval.contains(x) || x <= interval.lo + 1e-12 || x >= interval.hi - 1e-12)) {
                return eval_real(expr, {{plan.variable, x}});
            }
        }
        fail(ErrorCode::Domain, "limit lies outside every back-substitution piece");
    }
    switch (plan.kind) {
        case 0:
            return x;
        case 1:
        case 2:
            // t -> 0 from the branch side as |x| -> inf
            return 0.0;
        case 3:
            return x > 0 ? kInf : 0.0;
        default:
            fail(ErrorCode::Domain, "infinite limit outside the transform's domain");
    }
}

// Limit of one antiderivative term as the parameter goes to +-infinity;
// log terms are handled jointly by the caller.
double term_limit_at_infinity(const ratint::Term& t, const std::string& param, double sign_inf) {
    using Tag = ratint::Term::Tag;
    switch (t.tag) {
        case Tag::Power: {
            if (!t.exponent.is_real()) fail(ErrorCode::Divergent, "oscillatory limit");
            auto body_poly = expr_to_poly(t.body, param);
            if (!body_poly) fail(ErrorCode::Divergent, "unsupported limit shape");
            double growth = static_cast<double>(body_poly->degree()) * t.exponent.re.to_double();
            if (growth < 0) return 0.0;
            fail(ErrorCode::Divergent, "power term diverges at the limit");
        }
        case Tag::Arctan: {
            auto arg_poly = expr_to_poly(t.body, param);
            if (!arg_poly) fail(ErrorCode::Divergent, "unsupported arctan limit");
            if (arg_poly->degree() < 1) {
                Bindings none;
                return eval_complex(t.coeff, none).real() *
                       std::atan(arg_poly->coeff(0).to_double());
            }
            double lead = arg_poly->lead().to_double() * sign_inf;
            Bindings none;
            return eval_complex(t.coeff, none).real() * (lead > 0 ? kPi / 2 : -kPi / 2);
        }
        case Tag::TableSqrt:
            fail(ErrorCode::Divergent, "sqrt term diverges at the limit");
        case Tag::TableLogRatio:
            return 0.0;
        case Tag::Opaque: {
            // numeric probe for stabilized limits (reduction leftovers decay)
            Bindings none;
            double c = eval_complex(t.coeff, none).real();
            double v1, v2;
            try {
                v1 = eval_real(t.body, {{param, sign_inf * 1e8}});
                v2 = eval_real(t.body, {{param, sign_inf * 4e8}});
            } catch (const Error&) {
                fail(ErrorCode::Divergent, "unsupported limit shape");
            }
            if (std::abs(v1 - v2) <= 1e-6 * (1.0 + std::abs(v1))) return c * v2;
            fail(ErrorCode::Divergent, "term does not stabilize at the limit");
        }
        case Tag::LogAbs:
            fail(ErrorCode::Internal, "log terms are handled jointly");
    }
    fail(ErrorCode::Internal, "bad term tag");
}

double antiderivative_limit(const ratint::ParamAntiderivative& pa, double p) {
    if (std::isfinite(p)) {
        try {
            return eval_real(pa.to_expr(), {{pa.param, p}});
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Pole || e.code() == ErrorCode::NonReal) {
                fail(ErrorCode::Divergent, "antiderivative diverges at the mapped limit");
            }
            throw;
        }
    }
    double sign_inf = p > 0 ? 1.0 : -1.0;
    double total = 0.0;
    double log_degree_sum = 0.0;
    double log_value = 0.0;
    Bindings none;
    for (const auto& t : pa.terms) {
        if (t.tag == ratint::Term::Tag::LogAbs) {
            auto body_poly = expr_to_poly(t.body, pa.param);
            if (!body_poly) fail(ErrorCode::Divergent, "unsupported log limit");
            double c = eval_complex(t.coeff, none).real();
            log_degree_sum += c * static_cast<double>(body_poly->degree());
            log_value += c * std::log(std::abs(body_poly->lead().to_double()));
        } else {
            total += term_limit_at_infinity(t, pa.param, sign_inf);
        }
    }
    if (std::abs(log_degree_sum) > 1e-12) {
        fail(ErrorCode::Divergent, "log terms diverge at the limit");
    }
    return total + log_value;
}

// ---------------------------------------------------------------------------
// core integration

struct Options {
    TransformChoice transform = TransformChoice::Auto;
    int forced_kind = 0;
    BranchChoice branch = BranchChoice::Auto;
    bool allow_plain_rational = false; // identity plan (degenerate bypass)
};

ratint::ParamAntiderivative integrate_param(const Expr& g, const SubstitutionMap& m, int depth,
                                            std::vector<IntegrationResult>& chain,
                                            const Interval& x_domain);

IntegrationResult integrate_core(const Expr& f, const std::string& var, const Interval& domain,
                                 const Options& opts, int depth, int n_points, bool do_verify);

TransformPlan make_plan(const Expr& f, const std::string& var, const Interval& domain,
                        const Options& opts) {
    if (opts.transform == TransformChoice::Weierstrass) {
        fail(ErrorCode::Internal, "weierstrass is planned separately");
    }
    TransformPlan plan;
    try {
        plan = transforms::detect_template(f, var, domain);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoTemplate && opts.allow_plain_rational &&
            expr_to_fraction(simplify(f), var)) {
            plan.kind = 0;
            plan.variable = var;
            plan.param_name = var;
            plan.domain = domain;
            return plan;
        }
        throw;
    }
    if (opts.transform == TransformChoice::Forced) {
        int k = opts.forced_kind;
        bool same_family = (k <= 2 && plan.kind <= 2 && plan.route == Route::Standard) ||
                           (k == 3 && plan.kind == 3) ||
                           (k >= 4 && plan.kind >= 4);
        if (!same_family) {
            fail(ErrorCode::NoTemplate, "requested transform does not match the integrand");
        }
        plan.kind = k;
    }
    if (opts.branch != BranchChoice::Auto) {
        Branch want = opts.branch == BranchChoice::Upper ? Branch::Upper : Branch::Lower;
        if (plan.branch != want) {
            fail(ErrorCode::Domain, "requested branch does not contain the domain");
        }
    }
    return plan;
}

bool contains_sum_radical(const Expr& e, const std::string& param) {
    if (e.kind() == Kind::Power && e.exponent().is_real() &&
        e.exponent().re.denominator() == BigInt(2)) {
        if (auto p = expr_to_poly(e.base(), param); p && p->degree() == 2) {
            Rational delta = p->coeff(1) * p->coeff(1) - Rational(4) * p->coeff(2) * p->coeff(0);
            if (delta.signum() < 0 && p->coeff(2).signum() > 0) return true;
        }
    }
    for (const Expr& k : e.children()) {
        if (contains_sum_radical(k, param)) return true;
    }
    return false;
}

Interval param_domain(const SubstitutionMap& m, const Interval& x_domain) {
    double p1 = map_param_limit(m, x_domain.lo);
    double p2 = map_param_limit(m, x_domain.hi);
    if (p1 > p2) std::swap(p1, p2);
    return Interval(p1, p2, false, false);
}

ratint::ParamAntiderivative integrate_param(const Expr& g, const SubstitutionMap& m, int depth,
                                            std::vector<IntegrationResult>& chain,
                                            const Interval& x_domain) {
    const std::string& param = m.plan.param_name;
    if (auto laurent = ratint::integrate_laurent(g, param)) {
        return *laurent;
    }
    ratint::ParamAntiderivative pa;
    try {
        pa = ratint::integrate_rational(ratint::to_rational_function(g, param));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::TablePath) {
            pa = ratint::integrate_table(g, param, transforms::param_sign(m.plan));
        } else if (e.code() == ErrorCode::NotRational) {
            pa.param = param;
            pa.remainder = g;
        } else {
            throw;
        }
    }
    if (pa.remainder && depth > 1 && contains_sum_radical(*pa.remainder, param)) {
        IntegrationRequest inner;
        inner.integrand = *pa.remainder;
        inner.variable = param;
        inner.domain = param_domain(m, x_domain);
        inner.max_chain_depth = depth - 1;
        inner.verify = false;
        IntegrationResult r =
            integrate_core(inner.integrand, param, inner.domain, Options{}, depth - 1, 0, false);
        if (r.antiderivative.pieces.size() == 1) {
            pa.terms.push_back(ratint::Term{ratint::Term::Tag::Opaque, Expr::integer(1),
                                            r.antiderivative.pieces[0].second,
                                            GaussianRational()});
            pa.remainder.reset();
            chain.push_back(std::move(r));
        }
    }
    return pa;
}

IntegrationResult integrate_core(const Expr& f, const std::string& var, const Interval& domain,
                                 const Options& opts, int depth, int n_points, bool do_verify) {
    IntegrationResult out;
    bool weierstrass = opts.transform == TransformChoice::Weierstrass;
    if (!weierstrass && opts.transform == TransformChoice::Auto) {
        // No explicit choice: integrands rational in sin/cos of the variable
        // go through the half-angle route when nothing else matches.
        try {
            (void)transforms::detect_template(f, var, domain);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NoTemplate && mentions_trig_of_var(f, var) &&
                !(opts.allow_plain_rational && expr_to_fraction(simplify(f), var))) {
                weierstrass = true;
            }
        }
    }
    if (weierstrass) {
        bool fallback = opts.transform != TransformChoice::Weierstrass;
        if (!Interval(-kPi, kPi, false, false).contains(domain)) {
            fail(ErrorCode::Domain, "the half-angle substitution needs the domain inside (-pi, pi)");
        }
        try {
            auto [g, m] = transforms::weierstrass_reduce({f, var});
            m.plan.domain = domain;
            for (auto& piece : m.backsub) piece.first = piece.first.intersect(domain);
            out.plan = m.plan;
            out.map = m;
            out.transformed_integrand = g;
        } catch (const Error& e) {
            if (fallback &&
                (e.code() == ErrorCode::NotRational || e.code() == ErrorCode::Unmapped)) {
                fail(ErrorCode::NoTemplate, "no substitution template matched");
            }
            throw;
        }
    } else {
        TransformPlan plan = make_plan(f, var, domain, opts);
        out.plan = plan;
        out.map = transforms::build_substitution(plan);
        out.transformed_integrand = transforms::apply_substitution(f, out.map);
    }
    out.param_antiderivative =
        integrate_param(out.transformed_integrand, out.map, depth, out.chain, domain);
    if (!out.param_antiderivative.complete()) {
        fail(ErrorCode::Unintegrable,
             "unintegrable remainder at maximum chain depth: " +
                 out.param_antiderivative.remainder->str());
    }
    out.antiderivative = backsub::back_substitute(out.param_antiderivative, out.map);
    if (do_verify) {
        out.verification = verify_antiderivative(f, out.antiderivative, n_points, var);
    } else {
        out.verification.pass = true;
    }
    return out;
}

} // namespace

int default_verify_points() {
    if (const char* env = std::getenv("USM_VERIFY_POINTS")) {
        int v = std::atoi(env);
        if (v >= 8) return v;
    }
    return 64;
}

IntegrationResult integrate(const IntegrationRequest& req) {
    if (req.domain.empty()) fail(ErrorCode::Domain, "empty integration domain");
    if (req.max_chain_depth < 1 || req.max_chain_depth > 3) {
        fail(ErrorCode::Precondition, "max_chain_depth must be in [1, 3]");
    }
    int n_points = req.verify_points > 0 ? req.verify_points : default_verify_points();
    Options opts;
    opts.transform = req.transform;
    opts.forced_kind = req.forced_kind;
    opts.branch = req.branch;

    Expr f = simplify(req.integrand);
    DegenerateRewrite info;
    Expr rewritten = degenerate_walk(f, req.variable, info);
    if (!info.changed) {
        return integrate_core(f, req.variable, req.domain, opts, req.max_chain_depth, n_points,
                              req.verify);
    }
    // Degenerate radicals became sqrt(|a'|)|X|: split the domain at each
    // sign change of X, resolve the absolute values per side, and integrate
    // each side (a plain rational integrand is allowed here).
    opts.allow_plain_rational = true;
    std::vector<double> cuts;
    for (double c : info.split_points) {
        if (req.domain.lo < c && c < req.domain.hi) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Interval> segments;
    double lo = req.domain.lo;
    bool lo_closed = req.domain.lo_closed;
    for (double c : cuts) {
        segments.push_back(Interval(lo, c, lo_closed, false));
        lo = c;
        lo_closed = false;
    }
    segments.push_back(Interval(lo, req.domain.hi, lo_closed, req.domain.hi_closed));

    IntegrationResult out;
    bool first = true;
    for (const Interval& seg : segments) {
        if (seg.empty()) continue;
        Expr resolved = simplify(resolve_abs_on(rewritten, req.variable, seg));
        IntegrationResult part = integrate_core(resolved, req.variable, seg, opts,
                                                req.max_chain_depth, n_points, req.verify);
        if (first) {
            out = std::move(part);
            first = false;
        } else {
            for (auto& piece : part.antiderivative.pieces) {
                out.antiderivative.pieces.push_back(std::move(piece));
            }
            for (auto& pt : part.verification.points) {
                out.verification.points.push_back(pt);
            }
            out.verification.max_rel_err =
                std::max(out.verification.max_rel_err, part.verification.max_rel_err);
            out.verification.pass = out.verification.pass && part.verification.pass;
            out.verification.n_points += part.verification.n_points;
        }
    }
    if (first) fail(ErrorCode::Domain, "no usable segment in the domain");
    return out;
}

VerificationReport verify_antiderivative(const Expr& f, const backsub::Antiderivative& F,
                                         int n_points, const std::string& var) {
    if (n_points < 8) fail(ErrorCode::Precondition, "need at least 8 verification points");
    VerificationReport report;
    report.pass = true;
    const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    for (const auto& [interval, expr] : F.pieces) {
        double lo = interval.lo, hi = interval.hi;
        if (std::isinf(lo) && std::isinf(hi)) {
            lo = -10;
            hi = 10;
        } else if (std::isinf(lo)) {
            lo = hi - 10;
        } else if (std::isinf(hi)) {
            hi = lo + 10;
        }
        // At least max(1e-4, 1e-3 * width); 2% of the window keeps the
        // central difference accurate across inverse-sqrt endpoint
        // singularities of radical integrands.
        double margin = std::max(1e-4, 0.02 * (hi - lo));
        report.skipped_margin = std::max(report.skipped_margin, margin);
        double a = lo + margin, b = hi - margin;
        if (a >= b) fail(ErrorCode::Domain, "piece too narrow to verify");
        double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
        int evaluated = 0;
        for (int k = 0; k < n_points; ++k) {
            double x = mid + rad * std::cos(kPi * (2.0 * k + 1.0) / (2.0 * n_points));
            double dir = x < mid ? 1.0 : -1.0; // nudges move toward the center
            bool done = false;
            VerificationReport::Point best{0, 0, 0,
                                           std::numeric_limits<double>::infinity()};
            bool best_ok = false;
            for (int attempt = 0; attempt < 8 && !done; ++attempt) {
                // geometric steps clear interior pole neighborhoods quickly
                double step = attempt == 0 ? 0.0 : 0.2 * margin * std::pow(1.9, attempt - 1);
                double xx = x + step * dir;
                if (xx <= a || xx >= b) break;
                try {
                    double expected = eval_real(f, {{var, xx}});
                    if (std::abs(expected) > 1e10) continue; // too close to a pole
                    double h = h0 * std::max(1.0, std::abs(xx));
                    if (xx - 2 * h <= interval.lo || xx + 2 * h >= interval.hi) continue;
                    double fp = eval_real(expr, {{var, xx + h}});
                    double fm = eval_real(expr, {{var, xx - h}});
                    double got = (fp - fm) / (2.0 * h);
                    double rel = std::abs(got - expected) / std::max(std::abs(expected), 1e-2);
                    // Probe the truncation error with a doubled step; a large
                    // estimate means the difference quotient itself is noisy
                    // (typically next to a pole of the integrand), so the
                    // point moves rather than report a meaningless error.
                    double fp2 = eval_real(expr, {{var, xx + 2 * h}});
                    double fm2 = eval_real(expr, {{var, xx - 2 * h}});
                    double got2 = (fp2 - fm2) / (4.0 * h);
                    double est = std::abs(got2 - got) / 3.0;
                    bool clean = est <= 3e-8 * std::max(std::abs(expected), 1e-2);
                    if (!best_ok && (clean || rel < best.rel_err)) {
                        best = {xx, expected, got, rel};
                        if (clean) best_ok = true;
                    }
                    if (clean) done = true;
                } catch (const Error&) {
                    // pole or non-real point; try the nudged position
                }
            }
            // Points whose difference quotient never stabilized are not
            // checkable by this method; they are skipped, not failed.
            if (best_ok) {
                report.points.push_back(best);
                report.max_rel_err = std::max(report.max_rel_err, best.rel_err);
                ++evaluated;
            }
        }
        if (evaluated < std::max(8, n_points / 2)) {
            fail(ErrorCode::Domain, "piece " + interval.to_string() + " is not verifiable");
        }
        report.n_points += evaluated;
    }
    report.pass = report.max_rel_err <= 1e-7;
    return report;
}

double definite(const IntegrationRequest& req, double lower, double upper) {
    IntegrationRequest inner = req;
    inner.verify = false;
    if (lower >= upper) fail(ErrorCode::Domain, "definite integral needs lower < upper");
    IntegrationResult r = integrate(inner);
    double p_lo = map_param_limit(r.map, lower);
    double p_hi = map_param_limit(r.map, upper);
    double at_hi = antiderivative_limit(r.param_antiderivative, p_hi);
    double at_lo = antiderivative_limit(r.param_antiderivative, p_lo);
    return at_hi - at_lo;
}

namespace {

struct CorpusRng {
    std::mt19937_64 rng;
    explicit CorpusRng(std::uint64_t seed) : rng(seed) {}
    long long pick(long long lo, long long hi) {
        return lo + static_cast<long long>(rng() % static_cast<unsigned long long>(hi - lo + 1));
    }
};

} // namespace

CorpusReport run_corpus(std::uint64_t seed, int count) {
    if (count < 1) fail(ErrorCode::Precondition, "corpus count must be >= 1");
    auto t0 = std::chrono::steady_clock::now();
    CorpusReport report;
    report.seed = seed;
    report.count = count;
    CorpusRng cr(seed);

    for (int index = 0; index < count; ++index) {
        // random small rational a > 0, b
        Rational a(cr.pick(1, 3), cr.pick(1, 2));
        Rational b(cr.pick(-2, 2), cr.pick(1, 2));
        Expr x = Expr::variable("x");
        Expr y = Expr::constant(a.reciprocal()) * (x + Expr::constant(b));
        Expr T1 = Expr::call(Fn::Tan, Expr::constant(Rational(1, 2)) * Expr::call(Fn::Acsc, y));
        Expr T2 = Expr::call(Fn::Tan, Expr::constant(Rational(1, 2)) * Expr::call(Fn::Asec, y));

        auto atom = [&](long long which) -> Expr {
            switch (which) {
                case 0: return x + Expr::integer(cr.pick(-2, 2));
                case 1: return T1;
                case 2: return T2;
                case 3: return T1 - T2;
                case 4: return T1 + T2;
                case 5: return T1 + Expr::integer(cr.pick(1, 2));
                default: return T2 + Expr::integer(cr.pick(1, 2));
            }
        };
        // numerator: 1..3 monomials of total degree <= 3
        std::vector<Expr> monomials;
        long long n_terms = cr.pick(1, 3);
        for (long long t = 0; t < n_terms; ++t) {
            Expr term = Expr::integer(cr.pick(1, 3) * (cr.pick(0, 1) ? 1 : -1));
            long long deg = cr.pick(0, 2);
            for (long long d = 0; d < deg; ++d) {
                long long which = cr.pick(0, 2);
                term = term * (which == 0 ? x : which == 1 ? T1 : T2);
            }
            monomials.push_back(term);
        }
        Expr P = Expr::sum(std::move(monomials));
        if (P.is_zero()) P = T1;
        // denominator: product of 0..2 distinct atoms
        long long n_atoms = cr.pick(0, 2);
        long long first_atom = cr.pick(0, 6);
        Expr Q = Expr::integer(1);
        if (n_atoms >= 1) Q = Q * atom(first_atom);
        if (n_atoms == 2) {
            long long second = cr.pick(0, 6);
            if (second == first_atom) second = (second + 1) % 7;
            Q = Q * atom(second);
        }
        Expr integrand = P * Expr::power(Q, GaussianRational(Rational(-1)));
        if (!integrand.contains("x") ||
            !(integrand.str().find("acsc") != std::string::npos ||
              integrand.str().find("asec") != std::string::npos)) {
            integrand = integrand * T1;
        }

        CorpusEntry entry;
        entry.index = index;
        entry.integrand = integrand.str();
        entry.a = a;
        entry.b = b;

        double av = a.to_double(), bv = b.to_double();
        auto run_side = [&](bool upper) -> std::string {
            IntegrationRequest req;
            req.integrand = integrand;
            req.variable = "x";
            req.domain = upper ? Interval(av - bv, av - bv + 10, false, false)
                               : Interval(-av - bv - 10, -av - bv, false, false);
            req.verify = true;
            req.verify_points = 32;
            try {
                IntegrationResult r = integrate(req);
                entry.max_rel_err = std::max(entry.max_rel_err, r.verification.max_rel_err);
                return r.verification.pass ? "pass" : "fail";
            } catch (const Error& e) {
                if (e.code() == ErrorCode::Unintegrable) return "remainder";
                return "remainder"; // other hard failures count against the budget
            }
        };
        entry.upper_status = run_side(true);
        entry.lower_status = run_side(false);
        if (entry.upper_status == "fail" || entry.lower_status == "fail") {
            ++report.fail;
        } else if (entry.upper_status == "remainder" || entry.lower_status == "remainder") {
            ++report.remainder;
        } else {
            ++report.pass;
        }
        report.entries.push_back(std::move(entry));
    }
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return report;
}

} // namespace usm::pipeline

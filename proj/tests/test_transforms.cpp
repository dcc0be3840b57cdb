#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "usm/errors.hpp"
#include "usm/eval.hpp"
#include "usm/parser.hpp"
#include "usm/simplify.hpp"
#include "usm/transforms.hpp"

#include "support/quadrature.hpp"

using namespace usm;
using namespace usm::transforms;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("quadratic classification") {
    auto d = classify_quadratic(Rational(1), Rational(4), Rational(3));
    CHECK(d.shape == Shape::Difference);
    CHECK(d.shift == Rational(2));
    CHECK(d.radius_exact.value() == Rational(1));

    auto c = classify_quadratic(Rational(-1), Rational(0), Rational(4));
    CHECK(c.shape == Shape::Circular);
    CHECK(c.shift == Rational(0));
    CHECK(c.radius_exact.value() == Rational(2));

    auto s = classify_quadratic(Rational(1), Rational(0), Rational(1));
    CHECK(s.shape == Shape::Sum);
    CHECK(s.radius_exact.value() == Rational(1));

    auto g = classify_quadratic(Rational(4), Rational(4), Rational(1));
    CHECK(g.shape == Shape::Degenerate);
    CHECK(g.shift == Rational(1, 2));

    CHECK_THROWS_AS(classify_quadratic(Rational(0), Rational(1), Rational(1)), Error);
    CHECK_THROWS_AS(classify_quadratic(Rational(-1), Rational(0), Rational(-1)), Error);

    // irrational radius carried exactly
    auto ir = classify_quadratic(Rational(1), Rational(0), Rational(-2));
    CHECK(!ir.radius_exact.has_value());
    CHECK(ir.radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(ir.radius_expr == simplify(parse("sqrt(2)")));
}

TEST_CASE("template detection") {
    auto p1 = detect_template(parse("sqrt(x^2-1)"), "x", Interval::open(1, kInf));
    CHECK(p1.kind == 2);
    CHECK(p1.a == Rational(1));
    CHECK(p1.b == Rational(0));
    CHECK(p1.branch == Branch::Upper);

    auto p1l = detect_template(parse("sqrt(x^2-1)"), "x", Interval::open(-kInf, -1));
    CHECK(p1l.branch == Branch::Lower);

    auto p4 = detect_template(parse("sqrt((x+1)/(x+3))"), "x", Interval::open(-1, kInf));
    CHECK(p4.kind == 2);
    CHECK(p4.a == Rational(1));
    CHECK(p4.b == Rational(2));
    CHECK(p4.branch == Branch::Upper);

    auto p6 = detect_template(parse("1/(x^3*sqrt(4-x^2))"), "x", Interval::open(0, 2));
    CHECK(p6.kind == 5);
    CHECK(p6.a == Rational(2));
    CHECK(p6.b == Rational(0));

    auto p3 = detect_template(parse("1/(x+sqrt(1+x^2))^2"), "x", Interval::open(0, kInf));
    CHECK(p3.kind == 3);
    CHECK(p3.param_name == "s");

    auto p5 = detect_template(parse("1/(tan((1/2)*acsc(x)) - tan((1/2)*asec(x)))"), "x",
                              Interval::open(1, kInf));
    CHECK(p5.kind == 1);
    CHECK(p5.branch == Branch::Upper);

    auto p8 = detect_template(parse("exp(acos(x))"), "x", Interval::open(-1, 1));
    CHECK(p8.kind == 1);
    CHECK(p8.route == Route::ExpAcos);

    CHECK_THROWS_AS(detect_template(parse("sin(x)*ln(x)"), "x", Interval::open(1, 2)), Error);
    // straddling domain must be rejected with guidance to split
    CHECK_THROWS_AS(detect_template(parse("sqrt(x^2-1)"), "x", Interval::open(-5, 5)), Error);
    // conflicting families
    CHECK_THROWS_AS(
        detect_template(parse("sqrt(x^2-1)*sqrt(4-x^2)"), "x", Interval::open(1, 2)), Error);
    // irrational radius
    CHECK_THROWS_AS(detect_template(parse("sqrt(x^2-2)"), "x", Interval::open(2, kInf)), Error);
}

TEST_CASE("substitution maps: round trips and jacobians") {
    std::mt19937 rng(31);
    auto rand_rat = [&](int lo, int hi, int den_max) {
        long long num = lo + static_cast<long long>(rng() % (hi - lo + 1));
        long long den = 1 + static_cast<long long>(rng() % den_max);
        return Rational(num, den);
    };
    int done = 0;
    for (int it = 0; it < 200 && done < 100; ++it) {
        int kind = 1 + static_cast<int>(rng() % 5);
        Rational a = rand_rat(1, 6, 3);
        Rational b = rand_rat(-4, 4, 2);
        TransformPlan plan;
        plan.kind = kind;
        plan.a = a;
        plan.b = b;
        plan.variable = "x";
        plan.param_name = kind <= 2 ? "t" : (kind == 3 ? "s" : "r");
        double av = a.to_double(), bv = b.to_double();
        double x;
        if (kind <= 2) {
            bool upper = rng() % 2 == 0;
            plan.branch = upper ? Branch::Upper : Branch::Lower;
            plan.domain = upper ? Interval(av - bv, kInf, true, false)
                                : Interval(-kInf, -av - bv, false, true);
            double off = 0.01 + 4.0 * (static_cast<double>(rng() % 1000) / 1000.0);
            x = upper ? av - bv + off : -av - bv - off;
        } else if (kind == 3) {
            plan.branch = Branch::NotApplicable;
            plan.domain = Interval::all();
            x = -5.0 + 10.0 * (static_cast<double>(rng() % 1000) / 1000.0);
        } else {
            plan.branch = Branch::NotApplicable;
            plan.domain = Interval(-av - bv, av - bv, true, true);
            double frac = 0.02 + 0.96 * (static_cast<double>(rng() % 1000) / 1000.0);
            x = -av - bv + frac * 2 * av;
        }
        SubstitutionMap m = build_substitution(plan);
        REQUIRE(!m.backsub.empty());
        const Expr* backsub_expr = nullptr;
        for (const auto& [iv, ex] : m.backsub) {
            if (iv.contains(x)) backsub_expr = &ex;
        }
        REQUIRE(backsub_expr != nullptr);
        double t = eval_real(*backsub_expr, {{"x", x}});
        double back = eval_real(m.x_of_param, {{plan.param_name, t}});
        CAPTURE(kind);
        CAPTURE(x);
        CHECK(std::abs(back - x) <= 1e-10 * std::max(1.0, std::abs(x)));
        ++done;

        if (kind <= 2) {
            TransformPlan other = plan;
            other.branch = plan.branch == Branch::Upper ? Branch::Lower : Branch::Upper;
            other.domain = other.branch == Branch::Upper ? Interval(av - bv, kInf, true, false)
                                                         : Interval(-kInf, -av - bv, false, true);
            SubstitutionMap m2 = build_substitution(other);
            CHECK(m.jacobian == m2.jacobian); // structural equality
        }
    }
    CHECK(done == 100);
}

TEST_CASE("backsub block consistency") {
    // kind 2 upper: the radical replacement evaluates to the principal root
    TransformPlan plan;
    plan.kind = 2;
    plan.a = Rational(1);
    plan.b = Rational(0);
    plan.variable = "x";
    plan.param_name = "t";
    plan.branch = Branch::Upper;
    plan.domain = Interval(1, kInf, true, false);
    SubstitutionMap m = build_substitution(plan);
    Expr repl;
    for (const auto& [pat, rep] : m.block_map) {
        if (pat == parse("sqrt(x^2-1)")) repl = rep;
    }
    for (double x : {1.05, 1.7, 3.0, 12.0}) {
        double t = eval_real(m.backsub[0].second, {{"x", x}});
        double lhs = eval_real(repl, {{"t", t}});
        double direct = std::sqrt(x * x - 1.0);
        CHECK(lhs >= 0.0);
        CHECK(std::abs(lhs - direct) <= 1e-10 * std::max(1.0, direct));
    }
    // kind 5: a(1-r^2)/(1+r^2) >= 0 on |y| <= 1
    TransformPlan p5;
    p5.kind = 5;
    p5.a = Rational(2);
    p5.b = Rational(0);
    p5.variable = "x";
    p5.param_name = "r";
    p5.domain = Interval(-2, 2, true, true);
    SubstitutionMap m5 = build_substitution(p5);
    Expr rep5;
    for (const auto& [pat, rep] : m5.block_map) {
        if (pat == parse("sqrt(4-x^2)")) rep5 = rep;
    }
    for (double x = -1.99; x <= 1.99; x += 0.23) {
        double r = eval_real(m5.backsub[0].second, {{"x", x}});
        double v = eval_real(rep5, {{"r", r}});
        CHECK(v >= 0.0);
        CHECK(std::abs(v - std::sqrt(4 - x * x)) <= 1e-10 * 2);
    }
}

TEST_CASE("apply_substitution reproduces the worked reductions") {
    // sqrt(x^2-1) -> -(t^2-1)^2/(4t^3)
    {
        auto plan = detect_template(parse("sqrt(x^2-1)"), "x", Interval::open(1, kInf));
        auto m = build_substitution(plan);
        Expr g = apply_substitution(parse("sqrt(x^2-1)"), m);
        CHECK(g == simplify_in_domain(parse("-(t^2-1)^2/(4*t^3)"), "t", 1));
    }
    // 1/(x*sqrt(x^2+x)) -> -4/(t-1)^2
    {
        auto plan = detect_template(parse("1/(x*sqrt(x^2+x))"), "x", Interval::open(0, kInf));
        CHECK(plan.kind == 2);
        CHECK(plan.a == Rational(1, 2));
        CHECK(plan.b == Rational(1, 2));
        auto m = build_substitution(plan);
        Expr g = apply_substitution(parse("1/(x*sqrt(x^2+x))"), m);
        CHECK(g == simplify_in_domain(parse("-4/(t-1)^2"), "t", 1));
    }
    // 1/(x^3*sqrt(4-x^2)) -> (1/32)(r^-3 + 2 r^-1 + r)
    {
        auto plan = detect_template(parse("1/(x^3*sqrt(4-x^2))"), "x", Interval::open(0, 2));
        auto m = build_substitution(plan);
        Expr g = apply_substitution(parse("1/(x^3*sqrt(4-x^2))"), m);
        CHECK(g == simplify_in_domain(parse("(1/32)*(r^-3 + 2*r^-1 + r)"), "r", 1));
    }
    // mixed half-angle integrand: (a/2)(t-1)(t+1)^2/(t^2(t^2+2t-1)) with a=1
    {
        Expr e = parse("1/(tan((1/2)*acsc(x)) - tan((1/2)*asec(x)))");
        auto plan = detect_template(e, "x", Interval::open(1, kInf));
        auto m = build_substitution(plan);
        Expr g = apply_substitution(e, m);
        CHECK(g == simplify_in_domain(parse("(1/2)*(t-1)*(t+1)^2/(t^2*(t^2+2*t-1))"), "t", 1));
    }
    // unmapped block discovered late
    {
        auto plan = detect_template(parse("sqrt(x^2-1)"), "x", Interval::open(1, kInf));
        auto m = build_substitution(plan);
        CHECK_THROWS_AS(apply_substitution(parse("sqrt(x^2-1)*ln(x)"), m), Error);
    }
}

TEST_CASE("weierstrass reduction") {
    auto [g, m] = weierstrass_reduce({parse("1/(2+cos(w))"), "w"});
    CHECK(g == simplify(parse("2/(r^2+3)")));

    auto [g2, m2] = weierstrass_reduce({parse("sin(w)"), "w"});
    CHECK(g2 == simplify(parse("4*r/(1+r^2)^2")));

    auto [g3, m3] = weierstrass_reduce({parse("1"), "w"});
    CHECK(g3 == simplify(parse("2/(1+r^2)")));

    CHECK_THROWS_AS(weierstrass_reduce({parse("w*sin(w)"), "w"}), Error);

    // r = tan(w/2) round trip through x_of_param = 2 atan r
    for (double w : {-2.0, -0.5, 0.3, 1.2, 2.9}) {
        double r = eval_real(m.backsub[0].second, {{"w", w}});
        CHECK(eval_real(m.x_of_param, {{"r", r}}) == doctest::Approx(w).epsilon(1e-12));
    }
}

TEST_CASE("weierstrass quadrature equivalence") {
    std::mt19937 rng(42);
    for (int it = 0; it < 20; ++it) {
        // rational trig integrand with a dominant constant denominator
        long long c = 3 + static_cast<long long>(rng() % 4);
        long long p1 = static_cast<long long>(rng() % 3) - 1;
        long long q1 = static_cast<long long>(rng() % 3) - 1;
        long long n1 = static_cast<long long>(rng() % 5) - 2;
        long long n2 = static_cast<long long>(rng() % 5) - 2;
        Expr sw = Expr::call(Fn::Sin, Expr::variable("w"));
        Expr cw = Expr::call(Fn::Cos, Expr::variable("w"));
        Expr num = Expr::integer(n1) * sw + Expr::integer(n2) * cw + Expr::integer(1);
        Expr den = Expr::integer(c) + Expr::integer(p1) * sw + Expr::integer(q1) * cw;
        Expr f = num / den;
        auto [g, m] = weierstrass_reduce({f, "w"});

        double w1 = -2.8 + 0.2 * static_cast<double>(rng() % 10);
        double w2 = w1 + 0.4 + 0.2 * static_cast<double>(rng() % 8);
        double direct = test_support::integrate(
            [&](double w) { return eval_real(f, {{"w", w}}); }, w1, w2, 1e-11);
        double r1 = std::tan(w1 / 2), r2 = std::tan(w2 / 2);
        double reduced = test_support::integrate(
            [&](double r) { return eval_real(g, {{m.plan.param_name, r}}); }, r1, r2, 1e-11);
        CAPTURE(f.str());
        CHECK(std::abs(direct - reduced) <= 1e-8 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("euler parameters") {
    // difference shape at the Pythagorean point X = 5/4
    auto q = classify_quadratic(Rational(1), Rational(0), Rational(-1));
    auto ep = euler_parameters(q, Rational(5, 4));
    REQUIRE(ep.U_plus_exact.has_value());
    CHECK(*ep.U_plus_exact == Rational(2));
    CHECK(*ep.U_minus_exact == Rational(1, 2));
    CHECK(*ep.t_usm_exact == Rational(1, 2));
    // {U+, U-} = {A t, A/t} exactly
    Rational At = *ep.t_usm_exact;
    Rational Aot = ep.t_usm_exact->reciprocal();
    bool match = (*ep.U_plus_exact == At && *ep.U_minus_exact == Aot) ||
                 (*ep.U_plus_exact == Aot && *ep.U_minus_exact == At);
    CHECK(match);
    // other component
    auto en = euler_parameters(q, Rational(-5, 4));
    CHECK(*en.t_usm_exact == Rational(-1, 2));
    bool match2 = (*en.U_plus_exact == Rational(-1, 2) && *en.U_minus_exact == Rational(-2));
    CHECK(match2);

    // circular shape at the 3-4-5 point
    auto qc = classify_quadratic(Rational(-1), Rational(0), Rational(1));
    auto ec = euler_parameters(qc, Rational(3, 5));
    CHECK(*ec.t_euler_exact == Rational(-1, 3));
    CHECK(*ec.r_usm_exact == Rational(1, 3));
    CHECK_THROWS_AS(euler_parameters(qc, 0.0), Error);

    // t_E = -r on a fine grid
    for (int k = 1; k < 999; ++k) {
        double X = -1.0 + 2.0 * k / 999.0;
        if (std::abs(X) < 1e-3) continue;
        auto e = euler_parameters(qc, X);
        CHECK(std::abs(e.t_euler + e.r_usm) <= 1e-12);
    }
}

TEST_CASE("euler combination product equals the squared radius") {
    auto q = classify_quadratic(Rational(1), Rational(0), Rational(-1));
    for (double X = 1.0; X < 8.0; X += 0.37) {
        auto e = euler_parameters(q, X);
        CHECK(e.U_plus * e.U_minus == doctest::Approx(1.0).epsilon(1e-12));
        auto en = euler_parameters(q, -X);
        CHECK(en.U_plus * en.U_minus == doctest::Approx(1.0).epsilon(1e-12));
    }
}

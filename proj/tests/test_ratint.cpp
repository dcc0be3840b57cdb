#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "usm/derivative.hpp"
#include "usm/errors.hpp"
#include "usm/eval.hpp"
#include "usm/parser.hpp"
#include "usm/ratint.hpp"
#include "usm/simplify.hpp"

using namespace usm;
using namespace usm::ratint;

namespace {

Poly P(std::initializer_list<long long> asc) {
    std::vector<Rational> c;
    for (long long v : asc) c.emplace_back(v);
    return Poly(std::move(c));
}

// numeric check that d/dt antiderivative == integrand on sample points
void check_derivative(const ParamAntiderivative& pa, const Expr& integrand,
                      std::vector<double> samples) {
    REQUIRE(pa.complete());
    Expr F = pa.to_expr();
    int checked = 0;
    for (double t : samples) {
        double h = 1e-6 * std::max(1.0, std::abs(t));
        double got, expected;
        try {
            got = (eval_real(F, {{pa.param, t + h}}) - eval_real(F, {{pa.param, t - h}})) /
                  (2 * h);
            expected = eval_real(integrand, {{pa.param, t}});
        } catch (const Error&) {
            continue; // sample on a pole
        }
        CAPTURE(t);
        CHECK(std::abs(got - expected) <= 1e-6 * std::max(1.0, std::abs(expected)));
        ++checked;
    }
    CHECK(checked >= static_cast<int>(samples.size()) - 2);
}

std::vector<double> grid32(double lo, double hi) {
    std::vector<double> out;
    for (int i = 0; i < 32; ++i) out.push_back(lo + (hi - lo) * (i + 0.5) / 32);
    return out;
}

} // namespace

TEST_CASE("to_rational_function") {
    auto f = to_rational_function(parse("(1/32)*(r^-3 + 2*r^-1 + r)"), "r");
    CHECK(f.num == P({1, 0, 2, 0, 1}).scale(Rational(1, 32)));
    CHECK(f.den == P({0, 0, 0, 1}));

    auto g = to_rational_function(parse("-4/(t-1)^2"), "t");
    CHECK(g.num == P({-4}));
    CHECK(g.den == P({1, -2, 1}));

    try {
        to_rational_function(parse("sqrt(t^2+1)/t"), "t");
        FAIL("expected the table-path signal");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TablePath);
    }
    CHECK_THROWS_AS(to_rational_function(parse("ln(t)"), "t"), Error);
}

TEST_CASE("partial fraction reconstruction on random inputs") {
    std::mt19937 rng(2024);
    auto rand_rat = [&](int lo, int hi) {
        return Rational(lo + static_cast<long long>(rng() % (hi - lo + 1)),
                        1 + static_cast<long long>(rng() % 2));
    };
    int done = 0;
    for (int it = 0; it < 260 && done < 200; ++it) {
        // denominator: product of random linear/quadratic factors, total
        // degree <= 8
        Poly den(Rational(1));
        int total = 0;
        while (total < 2 + static_cast<int>(rng() % 6)) {
            if (rng() % 2) {
                den = den * P({static_cast<long long>(rng() % 9) - 4, 1});
                total += 1;
            } else {
                long long c0 = static_cast<long long>(rng() % 9) - 4;
                long long c1 = static_cast<long long>(rng() % 7) - 3;
                den = den * P({c0, c1, 1});
                total += 2;
            }
            if (rng() % 3 == 0) break;
        }
        if (den.degree() < 1) continue;
        // proper numerator
        std::vector<Rational> nc;
        for (long i = 0; i < den.degree(); ++i) nc.push_back(rand_rat(-5, 5));
        Poly num(std::move(nc));
        if (num.is_zero()) continue;
        Poly g = Poly::gcd(num, den);
        RationalFunction f{(num / g).scale((den / g).lead().reciprocal()), (den / g).monic(),
                           "t"};

        PartialFractions pf = partial_fractions(f);
        // re-sum exactly
        Poly acc_num = pf.poly_part;
        Poly acc_den(Rational(1));
        auto add_fraction = [&](const Poly& n, const Poly& d) {
            acc_num = acc_num * d + n * acc_den;
            acc_den = acc_den * d;
        };
        for (const auto& piece : pf.pieces) {
            add_fraction(piece.numerator, piece.factor.pow(piece.power));
        }
        if (pf.bad_den.degree() >= 1) add_fraction(pf.bad_num, pf.bad_den);
        // compare acc_num/acc_den == f.num/f.den exactly
        CHECK((acc_num * f.den == f.num * acc_den));
        ++done;
    }
    CHECK(done >= 200);
}

TEST_CASE("worked integrations") {
    // -(t^4 - 2 t^2 + 1)/(4 t^3)
    auto f1 = to_rational_function(parse("-(t^4-2*t^2+1)/(4*t^3)"), "t");
    auto a1 = integrate_rational(f1);
    CHECK(a1.complete());
    CHECK(simplify(a1.to_expr()) ==
          simplify(parse("-t^2/8 + (1/2)*ln(abs(t)) + 1/(8*t^2)")));

    auto f2 = to_rational_function(parse("-4/(t-1)^2"), "t");
    auto a2 = integrate_rational(f2);
    CHECK(simplify(a2.to_expr()) == simplify(parse("4/(t-1)")));

    auto f3 = to_rational_function(parse("(1/32)*(r^-3 + 2*r^-1 + r)"), "r");
    auto a3 = integrate_rational(f3);
    CHECK(simplify(a3.to_expr()) ==
          simplify(parse("(1/16)*ln(abs(r)) + (1/64)*(r^2 - 1/r^2)")));
}

TEST_CASE("quadratic factors: arctan, irrational logs, repeated powers") {
    // irreducible with complex roots
    auto f = to_rational_function(parse("1/(t^2+t+1)"), "t");
    auto a = integrate_rational(f);
    check_derivative(a, parse("1/(t^2+t+1)"), grid32(-3, 3));

    // irreducible over Q with real roots: t^2 + 2t - 1
    auto g = to_rational_function(parse("(t+3)/(t^2+2*t-1)"), "t");
    auto b = integrate_rational(g);
    check_derivative(b, parse("(t+3)/(t^2+2*t-1)"), grid32(1, 4));

    // repeated quadratic, complex roots
    auto h = to_rational_function(parse("t/(t^2+4)^3"), "t");
    auto c = integrate_rational(h);
    check_derivative(c, parse("t/(t^2+4)^3"), grid32(-2, 2));

    auto h2 = to_rational_function(parse("(t^2+5)/((t^2+1)^2*(t-2))"), "t");
    auto c2 = integrate_rational(h2);
    check_derivative(c2, parse("(t^2+5)/((t^2+1)^2*(t-2))"), grid32(3, 8));

    // repeated irrational-real quadratic
    auto h3 = to_rational_function(parse("(t+1)/(t^2-2)^2"), "t");
    auto c3 = integrate_rational(h3);
    check_derivative(c3, parse("(t+1)/(t^2-2)^2"), grid32(2, 6));

    // the mixed worked example: (1/2)(t-1)(t+1)^2/(t^2(t^2+2t-1))
    Expr mixed = parse("(1/2)*(t-1)*(t+1)^2/(t^2*(t^2+2*t-1))");
    auto f5 = to_rational_function(mixed, "t");
    auto a5 = integrate_rational(f5);
    check_derivative(a5, mixed, grid32(1.2, 5));
}

TEST_CASE("degree >= 3 irreducible goes to the remainder") {
    auto f = to_rational_function(parse("1/(t^3+t+1)"), "t");
    auto a = integrate_rational(f);
    CHECK(!a.complete());
    // and mixed: the reducible part is integrated, the rest reported
    auto g = to_rational_function(parse("1/((t-1)*(t^3+t+1))"), "t");
    auto b = integrate_rational(g);
    CHECK(!b.complete());
    CHECK(!b.terms.empty());
}

TEST_CASE("linearity of integrate_rational") {
    std::mt19937 rng(77);
    for (int it = 0; it < 20; ++it) {
        Expr fe = parse("(t+2)/(t^2+1)");
        Expr ge = parse("1/(t-3)");
        Rational alpha(static_cast<long long>(rng() % 7) - 3, 1 + rng() % 2);
        Rational beta(static_cast<long long>(rng() % 7) - 3, 1 + rng() % 2);
        if (alpha.is_zero() || beta.is_zero()) continue;
        Expr combo = Expr::constant(alpha) * fe + Expr::constant(beta) * ge;
        auto a = integrate_rational(to_rational_function(combo, "t"));
        auto af = integrate_rational(to_rational_function(fe, "t"));
        auto ag = integrate_rational(to_rational_function(ge, "t"));
        Expr lhs = a.to_expr();
        Expr rhs = Expr::constant(alpha) * af.to_expr() + Expr::constant(beta) * ag.to_expr();
        // difference differentiates to zero: compare numerically
        for (double t : {4.0, 5.5, 7.25}) {
            double l = eval_real(differentiate(lhs, "t"), {{"t", t}});
            double r = eval_real(differentiate(rhs, "t"), {{"t", t}});
            CHECK(std::abs(l - r) <= 1e-9 * std::max(1.0, std::abs(l)));
        }
    }
}

TEST_CASE("gaussian-exponent power path") {
    auto a = integrate_laurent(parse("t^(i)*(t^2-1)/(2*t^2)"), "t");
    REQUIRE(a.has_value());
    CHECK(a->complete());
    CHECK(simplify(a->to_expr()) ==
          simplify(parse("(1/4)*(1-i)*t^(1+i) + (1/4)*(1+i)*t^(i-1)")));
    // w = -1 goes to the log
    auto b = integrate_laurent(parse("3/t"), "t");
    REQUIRE(b.has_value());
    CHECK(simplify(b->to_expr()) == simplify(parse("3*ln(abs(t))")));
    CHECK(!integrate_laurent(parse("1/(t-1)"), "t").has_value());
}

TEST_CASE("standard-form table") {
    Expr e = parse("(sqrt(2)/4)*(t/sqrt(t^2+1) - 1/(t*sqrt(t^2+1)))");
    auto a = integrate_table(e, "t", +1);
    REQUIRE(a.complete());
    Expr expected = parse(
        "(sqrt(2)/4)*(sqrt(t^2+1) - "
        "ln(abs((t+sqrt(t^2+1)-1)/(t+sqrt(t^2+1)+1))))");
    for (double t : {0.3, 0.8, 1.5, 4.0}) {
        double l = eval_real(a.to_expr(), {{"t", t}});
        double r = eval_real(expected, {{"t", t}});
        CHECK(l == doctest::Approx(r).epsilon(1e-12));
    }
    check_derivative(a, e, grid32(0.2, 5));

    auto zero = integrate_table(parse("0"), "t", 0);
    CHECK(zero.complete());
    CHECK(zero.to_expr().is_zero());

    auto off = integrate_table(parse("1/sqrt(t^2+1)"), "t", +1);
    CHECK(!off.complete());
}

TEST_CASE("antiderivatives differentiate back to the integrand") {
    std::mt19937 rng(9);
    for (int it = 0; it < 40; ++it) {
        // random proper or improper rational function with friendly factors
        Poly den(Rational(1));
        for (int f = 0; f < 1 + static_cast<int>(rng() % 2); ++f) {
            if (rng() % 2) den = den * P({static_cast<long long>(rng() % 5) - 2, 1});
            else den = den * P({static_cast<long long>(rng() % 4) + 1, static_cast<long long>(rng() % 5) - 2, 1});
        }
        std::vector<Rational> nc;
        for (int i = 0; i < static_cast<int>(rng() % 5) + 1; ++i) {
            nc.emplace_back(static_cast<long long>(rng() % 11) - 5);
        }
        Poly num(std::move(nc));
        if (num.is_zero()) continue;
        Poly g = Poly::gcd(num, den);
        RationalFunction f{(num / g).scale((den / g).lead().reciprocal()), (den / g).monic(),
                           "t"};
        auto a = integrate_rational(f);
        if (!a.complete()) continue;
        Expr integrand = f.num.to_expr("t") *
                         Expr::power(f.den.to_expr("t"), GaussianRational(Rational(-1)));
        check_derivative(a, integrand, grid32(5.0, 9.0));
    }
}

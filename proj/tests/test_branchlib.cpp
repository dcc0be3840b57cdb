#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "usm/branchlib.hpp"
#include "usm/errors.hpp"

using namespace usm;
using namespace usm::branchlib;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("principal catalogue values") {
    CHECK(principal(PrincipalFn::Acos, {0.5, 0.0}).real() == doctest::Approx(kPi / 3).epsilon(1e-14));
    Complex s = principal(PrincipalFn::Sqrt, {-0.75, 0.0});
    CHECK(s.real() == doctest::Approx(0.0));
    CHECK(s.imag() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
    CHECK(std::abs(principal(PrincipalFn::Asinh, {0.0, 0.0})) == 0.0);
    CHECK_THROWS_AS(principal(PrincipalFn::Asec, {0.0, 0.0}), Error);
    CHECK_THROWS_AS(principal(PrincipalFn::Log, {0.0, 0.0}), Error);
    // classical real ranges
    for (double y : {-1.0, -0.7, -0.2, 0.3, 0.9, 1.0}) {
        Complex a = principal(PrincipalFn::Acos, {y, 0.0});
        CHECK(std::abs(a.imag()) < 1e-14);
        CHECK(a.real() >= -1e-14);
        CHECK(a.real() <= kPi + 1e-14);
        Complex b = principal(PrincipalFn::Asin, {y, 0.0});
        CHECK(std::abs(b.real()) <= kPi / 2 + 1e-14);
    }
    for (double y : {-5.0, -1.0, 1.0, 3.0}) {
        Complex g = principal(PrincipalFn::Asec, {y, 0.0});
        CHECK(std::abs(g.imag()) < 1e-13);
        CHECK(g.real() >= -1e-14);
        CHECK(g.real() <= kPi + 1e-14);
    }
}

TEST_CASE("first identity, part A") {
    // direct evaluation oracle at y = 1/2
    auto s = thm1_sides(0.5, Part::A);
    CHECK(s.lhs.real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.lhs.imag() == doctest::Approx(-std::sqrt(3.0) / 2).epsilon(1e-15));
    CHECK(s.abs_error <= 1e-15);
    for (double y = -1.0; y <= 1.0; y += 1.0 / 128) {
        CHECK(thm1_sides(y, Part::A).abs_error <= 1e-13);
    }
    CHECK_THROWS_AS(thm1_sides(2.0, Part::A), Error);
}

TEST_CASE("first identity, part B, both forms") {
    // Pythagorean point 5/4: t = 5/4 - 3/4 = 1/2
    auto s = thm1_sides(1.25, Part::B, HalfAngleForm::Csc);
    CHECK(s.rhs.real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.abs_error <= 1e-15);
    // negative component: y + sqrt(y^2-1) = -1/2
    auto n = thm1_sides(-1.25, Part::B, HalfAngleForm::Csc);
    CHECK(n.rhs.real() == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(n.abs_error <= 1e-15);

    for (double y = 1.0 + 1e-6; y < 100.0; y *= 1.37) {
        CHECK(thm1_sides(y, Part::B, HalfAngleForm::Csc).abs_error <= 1e-12);
        CHECK(thm1_sides(-y, Part::B, HalfAngleForm::Csc).abs_error <= 1e-12);
        CHECK(thm1_sides(y, Part::B, HalfAngleForm::Sec).abs_error <= 1e-12);
        CHECK(thm1_sides(-y, Part::B, HalfAngleForm::Sec).abs_error <= 1e-12);
    }
    CHECK_THROWS_AS(thm1_sides(-1.0, Part::B, HalfAngleForm::Sec), Error);
    CHECK_THROWS_AS(thm1_sides(0.5, Part::B), Error);
}

TEST_CASE("sign table is not vacuous") {
    // swapping the sign at y = 2 must break the identity badly
    double y = 2.0;
    Complex alpha = principal(PrincipalFn::Acos, {y, 0.0});
    Complex wrong = std::exp(Complex(0.0, -1.0) * alpha);
    Complex rhs = thm1_sides(y, Part::B, HalfAngleForm::Csc).rhs;
    CHECK(std::abs(wrong - rhs) >= 0.1);
    CHECK(thm1_sides(y, Part::B, HalfAngleForm::Csc).abs_error <= 1e-12);
}

TEST_CASE("csc and sec forms agree on both components") {
    for (double y = 1.0 + 1e-6; y < 100.0; y *= 1.11) {
        auto c = thm1_sides(y, Part::B, HalfAngleForm::Csc);
        auto s = thm1_sides(y, Part::B, HalfAngleForm::Sec);
        CHECK(std::abs(c.rhs - s.rhs) <= 1e-12);
        auto cn = thm1_sides(-y, Part::B, HalfAngleForm::Csc);
        auto sn = thm1_sides(-y, Part::B, HalfAngleForm::Sec);
        CHECK(std::abs(cn.rhs - sn.rhs) <= 1e-12);
    }
}

TEST_CASE("second identity") {
    // 3-4-5 point: tan(asin(3/5)/2) = 1/3
    auto s = thm2_sides(0.6, Part::A);
    CHECK(s.rhs.real() == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(s.abs_error <= 1e-15);
    auto b = thm2_sides(1.0, Part::B);
    CHECK(b.lhs.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.rhs.real() == doctest::Approx(1.0).epsilon(1e-12));
    auto c = thm2_sides(-0.6, Part::C);
    CHECK(c.abs_error <= 1e-12);

    for (double y = 1e-3; y <= 1.0; y += 1e-2) {
        CHECK(thm2_sides(y, Part::A).abs_error <= 1e-12);
        CHECK(thm2_sides(-y, Part::A).abs_error <= 1e-12);
        CHECK(thm2_sides(y, Part::C).abs_error <= 1e-12);
        CHECK(thm2_sides(-y, Part::C).abs_error <= 1e-12);
    }
    for (double y = 1.0; y < 100.0; y *= 1.17) {
        CHECK(thm2_sides(y, Part::B).abs_error <= 1e-12);
        CHECK(thm2_sides(-y, Part::B).abs_error <= 1e-12);
    }
    CHECK_THROWS_AS(thm2_sides(0.0, Part::A), Error);
    CHECK_THROWS_AS(thm2_sides(1e-9, Part::C), Error);
}

TEST_CASE("bridge identity") {
    auto z = bridge_sides(0.0);
    CHECK(z.lhs.real() == doctest::Approx(0.0));
    CHECK(z.lhs.imag() == doctest::Approx(1.0).epsilon(1e-15));
    // 3-4-5 point
    auto p = bridge_sides(0.75);
    CHECK(p.rhs.imag() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.abs_error <= 1e-15);
    auto n = bridge_sides(-0.75);
    CHECK(n.rhs.imag() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(n.abs_error <= 1e-15);
    for (int k = 0; k <= 2000; ++k) {
        double y = -10.0 + k * (20.0 / 2000);
        CHECK(bridge_sides(y).abs_error <= 1e-12);
    }
}

TEST_CASE("unit modulus and reciprocal roots") {
    for (double y = -1.0; y <= 1.0; y += 1.0 / 64) {
        CHECK(std::abs(std::abs(thm1_sides(y, Part::A).lhs) - 1.0) <= 1e-14);
    }
    for (double y = 1.0; y < 6.0; y *= 1.18) {
        double s = std::sqrt((y - 1.0) * (y + 1.0));
        CHECK(std::abs((y - s) * (y + s) - 1.0) <= 1e-14);
    }
    // exact at a Pythagorean point
    Rational y(5, 4), s(3, 4);
    CHECK((y - s) * (y + s) == Rational(1));
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace usm {

// Arbitrary-precision signed integer, sign + magnitude in 32-bit limbs
// (least significant first). Only what exact rational arithmetic needs.
class BigInt {
public:
    BigInt() = default;
    BigInt(long long v);
    static BigInt from_string(std::string_view s);

    int signum() const { return sign_; }
    bool is_zero() const { return sign_ == 0; }
    bool is_one() const;
    bool is_negative() const { return sign_ < 0; }

    BigInt operator-() const;
    BigInt abs() const;

    friend BigInt operator+(const BigInt& a, const BigInt& b);
    friend BigInt operator-(const BigInt& a, const BigInt& b);
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    friend BigInt operator/(const BigInt& a, const BigInt& b); // truncates toward zero
    friend BigInt operator%(const BigInt& a, const BigInt& b); // sign follows dividend

    // q,r with a = q*b + r, |r| < |b|, r sign matching a (truncated division).
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);

    static BigInt gcd(const BigInt& a, const BigInt& b); // non-negative
    BigInt pow_u(unsigned long long e) const;

    // Floor of the square root, n >= 0.
    static BigInt isqrt(const BigInt& n);
    // The exact square root when n is a perfect square.
    static std::optional<BigInt> sqrt_exact(const BigInt& n);
    // Exact k-th root of n >= 0 when it exists.
    static std::optional<BigInt> nth_root_exact(const BigInt& n, unsigned k);

    int compare(const BigInt& o) const;
    bool operator==(const BigInt& o) const { return compare(o) == 0; }
    bool operator!=(const BigInt& o) const { return compare(o) != 0; }
    bool operator<(const BigInt& o) const { return compare(o) < 0; }
    bool operator<=(const BigInt& o) const { return compare(o) <= 0; }
    bool operator>(const BigInt& o) const { return compare(o) > 0; }
    bool operator>=(const BigInt& o) const { return compare(o) >= 0; }

    double to_double() const;
    std::string to_string() const;
    bool fits_int64() const;
    long long to_int64() const; // requires fits_int64()
    std::size_t hash() const;

    std::size_t bit_length() const;
    bool is_even() const;

private:
    int8_t sign_ = 0;
    std::vector<uint32_t> mag_;

    static BigInt make(int8_t sign, std::vector<uint32_t> mag);
    friend class Rational;
};

// Exact rational number; denominator > 0, always reduced, zero is 0/1.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long v) : num_(v), den_(1) {}
    Rational(long long n, long long d);
    Rational(BigInt n, BigInt d);

    static Rational from_integer(BigInt n);
    // Accepts "p", "p/q" and decimal literals like "0.75".
    static std::optional<Rational> from_string(std::string_view s);

    const BigInt& numerator() const { return num_; }
    const BigInt& denominator() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_integer() const { return den_.is_one(); }
    int signum() const { return num_.signum(); }

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    Rational reciprocal() const;
    Rational abs() const;
    Rational pow(long long e) const;

    int compare(const Rational& o) const;
    bool operator==(const Rational& o) const { return compare(o) == 0; }
    bool operator!=(const Rational& o) const { return compare(o) != 0; }
    bool operator<(const Rational& o) const { return compare(o) < 0; }
    bool operator<=(const Rational& o) const { return compare(o) <= 0; }
    bool operator>(const Rational& o) const { return compare(o) > 0; }
    bool operator>=(const Rational& o) const { return compare(o) >= 0; }

    // Exact square root of a non-negative rational, when both parts are
    // perfect squares.
    static std::optional<Rational> sqrt_exact(const Rational& r);
    static std::optional<Rational> nth_root_exact(const Rational& r, unsigned k);

    double to_double() const;
    std::string to_string() const; // "p" or "p/q"
    std::size_t hash() const;

    bool fits_int64() const { return num_.fits_int64() && den_.fits_int64(); }

private:
    BigInt num_, den_;
    void reduce();
};

// a/b + c/d * i with both components exact.
struct GaussianRational {
    Rational re, im;

    GaussianRational() = default;
    GaussianRational(Rational r) : re(std::move(r)) {}
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    GaussianRational(long long r) : re(r) {}

    bool is_real() const { return im.is_zero(); }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_one() const { return re.is_one() && im.is_zero(); }
    bool is_integer() const { return im.is_zero() && re.is_integer(); }

    GaussianRational operator-() const { return {-re, -im}; }
    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b);

    bool operator==(const GaussianRational& o) const { return re == o.re && im == o.im; }
    bool operator!=(const GaussianRational& o) const { return !(*this == o); }

    std::size_t hash() const;
};

// Closest rational with denominator <= max_den (continued fractions);
// nullopt when x is not finite or no convergent lands within tol.
std::optional<Rational> rationalize(double x, long long max_den, double tol);

} // namespace usm

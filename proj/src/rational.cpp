#include "usm/rational.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "usm/errors.hpp"

namespace usm {

namespace {

using Mag = std::vector<uint32_t>;
constexpr uint64_t kBase = 1ull << 32;

void trim(Mag& m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
}

int cmp_mag(const Mag& a, const Mag& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

Mag add_mag(const Mag& a, const Mag& b) {
    const Mag& hi = a.size() >= b.size() ? a : b;
    const Mag& lo = a.size() >= b.size() ? b : a;
    Mag out(hi.size(), 0);
    uint64_t carry = 0;
    for (std::size_t i = 0; i < hi.size(); ++i) {
        uint64_t s = carry + hi[i] + (i < lo.size() ? lo[i] : 0u);
        out[i] = static_cast<uint32_t>(s);
        carry = s >> 32;
    }
    if (carry) out.push_back(static_cast<uint32_t>(carry));
    return out;
}

// Requires a >= b.
Mag sub_mag(const Mag& a, const Mag& b) {
    Mag out(a.size(), 0);
    int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int64_t d = static_cast<int64_t>(a[i]) - borrow - (i < b.size() ? b[i] : 0u);
        if (d < 0) {
            d += static_cast<int64_t>(kBase);
            borrow = 1;
        } else {
            borrow = 0;
        }
        out[i] = static_cast<uint32_t>(d);
    }
    trim(out);
    return out;
}

Mag mul_mag(const Mag& a, const Mag& b) {
    if (a.empty() || b.empty()) return {};
    Mag out(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        uint64_t carry = 0;
        uint64_t ai = a[i];
        for (std::size_t j = 0; j < b.size(); ++j) {
            uint64_t cur = out[i + j] + ai * b[j] + carry;
            out[i + j] = static_cast<uint32_t>(cur);
            carry = cur >> 32;
        }
        std::size_t k = i + b.size();
        while (carry) {
            uint64_t cur = out[k] + carry;
            out[k] = static_cast<uint32_t>(cur);
            carry = cur >> 32;
            ++k;
        }
    }
    trim(out);
    return out;
}

Mag shl_bits(const Mag& a, unsigned s) {
    if (a.empty()) return {};
    if (s == 0) return a;
    Mag out(a.size() + 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        uint64_t v = static_cast<uint64_t>(a[i]) << s;
        out[i] |= static_cast<uint32_t>(v);
        out[i + 1] |= static_cast<uint32_t>(v >> 32);
    }
    trim(out);
    return out;
}

Mag shr_bits(const Mag& a, unsigned s) {
    if (a.empty() || s == 0) return a;
    Mag out(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        uint64_t v = a[i];
        out[i] |= static_cast<uint32_t>(v >> s);
        if (i > 0) out[i - 1] |= static_cast<uint32_t>(v << (32 - s));
    }
    trim(out);
    return out;
}

// Knuth algorithm D. u, v magnitudes, v non-empty; produces q, r.
void divmod_mag(const Mag& u, const Mag& v, Mag& q, Mag& r) {
    q.clear();
    r.clear();
    if (cmp_mag(u, v) < 0) {
        r = u;
        return;
    }
    if (v.size() == 1) {
        uint64_t d = v[0], rem = 0;
        q.assign(u.size(), 0);
        for (std::size_t i = u.size(); i-- > 0;) {
            uint64_t cur = (rem << 32) | u[i];
            q[i] = static_cast<uint32_t>(cur / d);
            rem = cur % d;
        }
        trim(q);
        if (rem) r.push_back(static_cast<uint32_t>(rem));
        return;
    }

    unsigned s = std::countl_zero(v.back());
    Mag vn = shl_bits(v, s);
    Mag un = shl_bits(u, s);
    un.resize(u.size() + 1, 0); // guarantee the extra top limb

    std::size_t n = vn.size();
    std::size_t m = un.size() - n - (un.size() > u.size() + 1 ? 1 : 0);
    // After the resize un.size() == u.size()+1, so m = u.size()+1-n.
    m = un.size() - n;

    q.assign(m, 0);
    const uint64_t vtop = vn[n - 1];
    const uint64_t vsec = vn[n - 2];

    for (std::size_t j = m; j-- > 0;) {
        uint64_t hi = (static_cast<uint64_t>(un[j + n]) << 32) | un[j + n - 1];
        uint64_t qhat = hi / vtop;
        uint64_t rhat = hi % vtop;
        if (qhat >= kBase) {
            qhat = kBase - 1;
            rhat = hi - qhat * vtop;
        }
        while (rhat < kBase && qhat * vsec > ((rhat << 32) | un[j + n - 2])) {
            --qhat;
            rhat += vtop;
        }
        // Multiply-subtract qhat*vn from un[j .. j+n].
        int64_t borrow = 0;
        uint64_t carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            uint64_t p = qhat * vn[i] + carry;
            carry = p >> 32;
            int64_t d = static_cast<int64_t>(un[i + j]) - static_cast<int64_t>(p & 0xffffffffu) - borrow;
            if (d < 0) {
                d += static_cast<int64_t>(kBase);
                borrow = 1;
            } else {
                borrow = 0;
            }
            un[i + j] = static_cast<uint32_t>(d);
        }
        int64_t d = static_cast<int64_t>(un[j + n]) - static_cast<int64_t>(carry) - borrow;
        if (d < 0) {
            // qhat was one too large: add back.
            d += static_cast<int64_t>(kBase);
            --qhat;
            uint64_t c2 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                uint64_t sum = static_cast<uint64_t>(un[i + j]) + vn[i] + c2;
                un[i + j] = static_cast<uint32_t>(sum);
                c2 = sum >> 32;
            }
            d += static_cast<int64_t>(c2);
            d &= 0xffffffff;
        }
        un[j + n] = static_cast<uint32_t>(d);
        q[j] = static_cast<uint32_t>(qhat);
    }
    trim(q);
    un.resize(n);
    r = shr_bits(un, s);
}

} // namespace

BigInt BigInt::make(int8_t sign, Mag mag) {
    BigInt b;
    trim(mag);
    b.mag_ = std::move(mag);
    b.sign_ = b.mag_.empty() ? 0 : sign;
    return b;
}

BigInt::BigInt(long long v) {
    if (v == 0) return;
    sign_ = v < 0 ? -1 : 1;
    unsigned long long a = v < 0 ? 0ull - static_cast<unsigned long long>(v) : static_cast<unsigned long long>(v);
    while (a) {
        mag_.push_back(static_cast<uint32_t>(a));
        a >>= 32;
    }
}

BigInt BigInt::from_string(std::string_view s) {
    std::size_t i = 0;
    int8_t sign = 1;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        if (s[i] == '-') sign = -1;
        ++i;
    }
    if (i >= s.size()) fail(ErrorCode::Parse, "empty integer literal");
    BigInt out;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') fail(ErrorCode::Parse, "bad digit in integer literal");
        out = out * BigInt(10) + BigInt(s[i] - '0');
    }
    if (sign < 0) out = -out;
    return out;
}

bool BigInt::is_one() const { return sign_ == 1 && mag_.size() == 1 && mag_[0] == 1; }

BigInt BigInt::operator-() const { return make(static_cast<int8_t>(-sign_), mag_); }
BigInt BigInt::abs() const { return make(1, mag_); }

BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    if (a.sign_ == b.sign_) return BigInt::make(a.sign_, add_mag(a.mag_, b.mag_));
    int c = cmp_mag(a.mag_, b.mag_);
    if (c == 0) return BigInt();
    if (c > 0) return BigInt::make(a.sign_, sub_mag(a.mag_, b.mag_));
    return BigInt::make(b.sign_, sub_mag(b.mag_, a.mag_));
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return BigInt();
    return BigInt::make(static_cast<int8_t>(a.sign_ * b.sign_), mul_mag(a.mag_, b.mag_));
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.sign_ == 0) fail(ErrorCode::Pole, "integer division by zero");
    Mag qm, rm;
    divmod_mag(a.mag_, b.mag_, qm, rm);
    q = make(static_cast<int8_t>(a.sign_ * b.sign_), std::move(qm));
    r = make(a.sign_, std::move(rm));
}

BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return q;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return r;
}

BigInt BigInt::gcd(const BigInt& a, const BigInt& b) {
    BigInt x = a.abs(), y = b.abs();
    while (!y.is_zero()) {
        BigInt r = x % y;
        x = y;
        y = r;
    }
    return x;
}

BigInt BigInt::pow_u(unsigned long long e) const {
    BigInt base = *this, out(1);
    while (e) {
        if (e & 1) out = out * base;
        base = base * base;
        e >>= 1;
    }
    return out;
}

std::size_t BigInt::bit_length() const {
    if (mag_.empty()) return 0;
    return 32 * (mag_.size() - 1) + (32 - std::countl_zero(mag_.back()));
}

bool BigInt::is_even() const { return mag_.empty() || (mag_[0] & 1u) == 0; }

BigInt BigInt::isqrt(const BigInt& n) {
    if (n.sign_ < 0) fail(ErrorCode::Precondition, "isqrt of negative integer");
    if (n.is_zero()) return BigInt();
    if (n.bit_length() <= 52) {
        auto v = static_cast<long long>(std::sqrt(n.to_double()));
        BigInt x(v);
        while (x * x > n) x = x - BigInt(1);
        while ((x + BigInt(1)) * (x + BigInt(1)) <= n) x = x + BigInt(1);
        return x;
    }
    // Newton iteration seeded a bit above the root.
    BigInt x = BigInt(1);
    std::size_t half = (n.bit_length() + 1) / 2;
    x = BigInt(1);
    for (std::size_t i = 0; i < half + 1; ++i) x = x + x; // 2^(half+1) > sqrt(n)
    for (;;) {
        BigInt y = (x + n / x) / BigInt(2);
        if (y >= x) break;
        x = y;
    }
    while (x * x > n) x = x - BigInt(1);
    return x;
}

std::optional<BigInt> BigInt::sqrt_exact(const BigInt& n) {
    if (n.sign_ < 0) return std::nullopt;
    BigInt r = isqrt(n);
    if (r * r == n) return r;
    return std::nullopt;
}

std::optional<BigInt> BigInt::nth_root_exact(const BigInt& n, unsigned k) {
    if (k == 0) return std::nullopt;
    if (k == 1) return n;
    if (n.sign_ < 0) {
        if (k % 2 == 0) return std::nullopt;
        auto r = nth_root_exact(-n, k);
        if (r) return -*r;
        return std::nullopt;
    }
    if (n.is_zero()) return BigInt();
    double guess = std::pow(n.to_double(), 1.0 / k);
    long long g = static_cast<long long>(std::llround(guess));
    for (long long c = std::max(0ll, g - 2); c <= g + 2; ++c) {
        BigInt p = BigInt(c).pow_u(k);
        if (p == n) return BigInt(c);
    }
    return std::nullopt;
}

int BigInt::compare(const BigInt& o) const {
    if (sign_ != o.sign_) return sign_ < o.sign_ ? -1 : 1;
    int c = cmp_mag(mag_, o.mag_);
    return sign_ >= 0 ? c : -c;
}

double BigInt::to_double() const {
    if (mag_.empty()) return 0.0;
    double v = 0.0;
    std::size_t top = mag_.size();
    std::size_t used = std::min<std::size_t>(top, 3);
    for (std::size_t i = 0; i < used; ++i) {
        v = v * 4294967296.0 + mag_[top - 1 - i];
    }
    int exp = static_cast<int>(32 * (top - used));
    double out = std::ldexp(v, exp);
    return sign_ < 0 ? -out : out;
}

std::string BigInt::to_string() const {
    if (is_zero()) return "0";
    Mag cur = mag_;
    std::string digits;
    const Mag ten9 = {1000000000u};
    while (!cur.empty()) {
        Mag q, r;
        divmod_mag(cur, ten9, q, r);
        uint32_t chunk = r.empty() ? 0u : r[0];
        for (int i = 0; i < 9; ++i) {
            digits.push_back(static_cast<char>('0' + chunk % 10));
            chunk /= 10;
        }
        cur = q;
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    if (sign_ < 0) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

bool BigInt::fits_int64() const {
    if (mag_.size() > 2) return false;
    if (mag_.size() < 2) return true;
    uint64_t v = (static_cast<uint64_t>(mag_[1]) << 32) | mag_[0];
    if (sign_ > 0) return v <= static_cast<uint64_t>(std::numeric_limits<long long>::max());
    return v <= static_cast<uint64_t>(std::numeric_limits<long long>::max()) + 1;
}

long long BigInt::to_int64() const {
    uint64_t v = 0;
    if (mag_.size() > 0) v |= mag_[0];
    if (mag_.size() > 1) v |= static_cast<uint64_t>(mag_[1]) << 32;
    return sign_ < 0 ? -static_cast<long long>(v) : static_cast<long long>(v);
}

std::size_t BigInt::hash() const {
    std::size_t h = static_cast<std::size_t>(sign_ + 2);
    for (uint32_t limb : mag_) h = h * 1000003u ^ limb;
    return h;
}

// ---------------------------------------------------------------------------

Rational::Rational(long long n, long long d) : num_(n), den_(d) { reduce(); }
Rational::Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { reduce(); }

Rational Rational::from_integer(BigInt n) {
    Rational r;
    r.num_ = std::move(n);
    r.den_ = BigInt(1);
    return r;
}

void Rational::reduce() {
    if (den_.is_zero()) fail(ErrorCode::Pole, "rational with zero denominator");
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    if (den_.is_negative()) {
        num_ = -num_;
        den_ = -den_;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (!g.is_one()) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
}

std::optional<Rational> Rational::from_string(std::string_view s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    try {
        if (slash != std::string_view::npos) {
            BigInt n = BigInt::from_string(s.substr(0, slash));
            BigInt d = BigInt::from_string(s.substr(slash + 1));
            if (d.is_zero()) return std::nullopt;
            return Rational(std::move(n), std::move(d));
        }
        auto dot = s.find('.');
        if (dot != std::string_view::npos) {
            std::string digits(s.substr(0, dot));
            std::string frac(s.substr(dot + 1));
            if (frac.empty() && digits.empty()) return std::nullopt;
            BigInt n = BigInt::from_string(digits.empty() || digits == "-" || digits == "+"
                                               ? digits + "0"
                                               : digits);
            bool neg = n.is_negative() || (!digits.empty() && digits[0] == '-');
            BigInt scale = BigInt(10).pow_u(frac.size());
            BigInt f = frac.empty() ? BigInt() : BigInt::from_string(frac);
            BigInt total = n.abs() * scale + f;
            if (neg) total = -total;
            return Rational(std::move(total), std::move(scale));
        }
        return Rational::from_integer(BigInt::from_string(s));
    } catch (const Error&) {
        return std::nullopt;
    }
}

Rational Rational::operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) fail(ErrorCode::Pole, "rational division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

Rational Rational::reciprocal() const {
    if (is_zero()) fail(ErrorCode::Pole, "reciprocal of zero");
    return Rational(den_, num_);
}

Rational Rational::abs() const { return num_.is_negative() ? -*this : *this; }

Rational Rational::pow(long long e) const {
    if (e == 0) return Rational(1);
    if (is_zero()) {
        if (e < 0) fail(ErrorCode::Pole, "zero to a negative power");
        return Rational(0);
    }
    unsigned long long a = e < 0 ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
    Rational base = e < 0 ? reciprocal() : *this;
    Rational out(1);
    while (a) {
        if (a & 1) out *= base;
        base *= base;
        a >>= 1;
    }
    return out;
}

int Rational::compare(const Rational& o) const {
    return (num_ * o.den_).compare(o.num_ * den_);
}

std::optional<Rational> Rational::sqrt_exact(const Rational& r) {
    if (r.signum() < 0) return std::nullopt;
    auto n = BigInt::sqrt_exact(r.num_);
    if (!n) return std::nullopt;
    auto d = BigInt::sqrt_exact(r.den_);
    if (!d) return std::nullopt;
    return Rational(std::move(*n), std::move(*d));
}

std::optional<Rational> Rational::nth_root_exact(const Rational& r, unsigned k) {
    auto n = BigInt::nth_root_exact(r.num_, k);
    if (!n) return std::nullopt;
    auto d = BigInt::nth_root_exact(r.den_, k);
    if (!d) return std::nullopt;
    return Rational(std::move(*n), std::move(*d));
}

double Rational::to_double() const {
    double n = num_.to_double();
    double d = den_.to_double();
    if (std::isfinite(n) && std::isfinite(d)) return n / d;
    // Scale both parts down by a common power of two.
    long shift = static_cast<long>(std::max(num_.bit_length(), den_.bit_length())) - 900;
    if (shift < 0) shift = 0;
    BigInt two_s = BigInt(2).pow_u(static_cast<unsigned long long>(shift));
    return (num_ / two_s).to_double() / (den_ / two_s).to_double();
}

std::string Rational::to_string() const {
    if (den_.is_one()) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
}

std::size_t Rational::hash() const { return num_.hash() * 2654435761u ^ den_.hash(); }

GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational n2 = b.re * b.re + b.im * b.im;
    if (n2.is_zero()) fail(ErrorCode::Pole, "gaussian division by zero");
    return {(a.re * b.re + a.im * b.im) / n2, (a.im * b.re - a.re * b.im) / n2};
}

std::size_t GaussianRational::hash() const { return re.hash() * 31 + im.hash(); }

std::optional<Rational> rationalize(double x, long long max_den, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    double v = x;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int iter = 0; iter < 64; ++iter) {
        double fl = std::floor(v);
        if (fl > 9e17 || fl < -9e17) return std::nullopt;
        long long a = static_cast<long long>(fl);
        long long p2 = a * p1 + p0;
        long long q2 = a * q1 + q0;
        if (q2 > max_den || q2 < 0) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - x) <= tol * std::max(1.0, std::abs(x))) {
            return Rational(p1, q1);
        }
        double frac = v - fl;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    if (q1 != 0) {
        double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - x) <= tol * std::max(1.0, std::abs(x))) return Rational(p1, q1);
    }
    return std::nullopt;
}

} // namespace usm

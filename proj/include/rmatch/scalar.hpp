#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rmatch {

using Int = boost::multiprecision::cpp_int;

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct field_mismatch : std::domain_error {
    using std::domain_error::domain_error;
};

/// Arbitrary-precision rational, always reduced, denominator > 0.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long n) : num_(n), den_(1) {}
    Rational(Int n) : num_(std::move(n)), den_(1) {}
    Rational(Int n, Int d);

    const Int& num() const { return num_; }
    const Int& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

    Rational operator-() const;
    Rational abs() const { return num_ < 0 ? -*this : *this; }
    Rational reciprocal() const;

    friend Rational operator+(const Rational& x, const Rational& y);
    friend Rational operator-(const Rational& x, const Rational& y);
    friend Rational operator*(const Rational& x, const Rational& y);
    friend Rational operator/(const Rational& x, const Rational& y);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& x, const Rational& y) {
        return x.num_ == y.num_ && x.den_ == y.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& x, const Rational& y);

    /// Largest integer <= value.
    Int floor() const;

    /// Canonical text: "p" for integers, "p/q" otherwise.
    std::string str() const;
    static Rational parse(const std::string& s);

    double to_double() const;

private:
    Int num_;
    Int den_;
    void reduce();
};

/// Element of Q or of a real quadratic field Q(sqrt(d)): value a + b*sqrt(d).
///
/// d == 0 encodes a plain rational (b is forced to 0). Arithmetic between two
/// values with different nonzero d throws field_mismatch; rationals combine
/// with any field. Comparisons are exact, via sign analysis of a^2 - b^2 d.
class Scalar {
public:
    Scalar() : a_(), b_(), d_(0) {}
    Scalar(long n) : a_(n), b_(), d_(0) {}
    Scalar(Rational r) : a_(std::move(r)), b_(), d_(0) {}
    Scalar(Rational a, Rational b, std::int64_t d);

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    std::int64_t d() const { return d_; }

    bool is_rational() const { return d_ == 0; }
    /// Throws if the value has a nonzero sqrt part.
    const Rational& rational() const;

    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
    int sign() const;

    Scalar operator-() const;
    Scalar abs() const { return sign() < 0 ? -*this : *this; }
    Scalar reciprocal() const;

    friend Scalar operator+(const Scalar& x, const Scalar& y);
    friend Scalar operator-(const Scalar& x, const Scalar& y);
    friend Scalar operator*(const Scalar& x, const Scalar& y);
    friend Scalar operator/(const Scalar& x, const Scalar& y);
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
    Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

    friend bool operator==(const Scalar& x, const Scalar& y);
    friend std::strong_ordering operator<=>(const Scalar& x, const Scalar& y) {
        int s = (x - y).sign();
        return s < 0 ? std::strong_ordering::less
                     : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    /// Canonical text: "p/q" or "(p/q)+(r/s)*sqrt(d)".
    std::string str() const;
    static Scalar parse(const std::string& s);

    /// Decimal rendering with the given number of significant digits,
    /// computed by integer arithmetic (deterministic across platforms).
    std::string decimal(int sig_digits = 20) const;

    double to_double() const;

private:
    Rational a_, b_;
    std::int64_t d_;
    static std::int64_t join_fields(const Scalar& x, const Scalar& y);
};

inline int cmp(const Scalar& x, const Scalar& y) { return (x - y).sign(); }

/// Exact comparison across different quadratic fields: decides the sign of
/// (a + b sqrt(d)) - c sqrt(d') by sign analysis plus one squaring step,
/// which eliminates the second radical. Falls back to cmp for compatible
/// fields.
int cmp_cross(const Scalar& x, const Scalar& y);

/// floor(sqrt(n)) for n >= 0.
Int isqrt(const Int& n);

Int gcd_int(Int a, Int b);

bool is_square_free(std::int64_t d);

}  // namespace rmatch

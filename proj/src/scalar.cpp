#include "rmatch/scalar.hpp"

#include <algorithm>
#include <sstream>

namespace rmatch {

namespace {

Int gcd(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

void Rational::reduce() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    if (num_ == 0) {
        den_ = 1;
        return;
    }
    Int g = gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational::Rational(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) { reduce(); }

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational Rational::reciprocal() const {
    if (num_ == 0) throw std::domain_error("reciprocal of zero");
    return Rational(den_, num_);
}

Rational operator+(const Rational& x, const Rational& y) {
    return Rational(x.num_ * y.den_ + y.num_ * x.den_, x.den_ * y.den_);
}

Rational operator-(const Rational& x, const Rational& y) {
    return Rational(x.num_ * y.den_ - y.num_ * x.den_, x.den_ * y.den_);
}

Rational operator*(const Rational& x, const Rational& y) {
    return Rational(x.num_ * y.num_, x.den_ * y.den_);
}

Rational operator/(const Rational& x, const Rational& y) {
    if (y.num_ == 0) throw std::domain_error("division by zero");
    return Rational(x.num_ * y.den_, x.den_ * y.num_);
}

std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
    Int lhs = x.num_ * y.den_;
    Int rhs = y.num_ * x.den_;
    return lhs < rhs ? std::strong_ordering::less
                     : (lhs > rhs ? std::strong_ordering::greater : std::strong_ordering::equal);
}

Int Rational::floor() const {
    Int q = num_ / den_;
    if (num_ < 0 && q * den_ != num_) --q;
    return q;
}

std::string Rational::str() const {
    std::ostringstream os;
    os << num_;
    if (den_ != 1) os << "/" << den_;
    return os.str();
}

Rational Rational::parse(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Int(s));
        Int n(s.substr(0, slash));
        Int d(s.substr(slash + 1));
        return Rational(n, d);
    } catch (const std::exception&) {
        throw parse_error("bad rational: '" + s + "'");
    }
}

double Rational::to_double() const {
    return static_cast<double>(boost::multiprecision::cpp_rational(num_, den_));
}

Int isqrt(const Int& n) {
    if (n < 0) throw std::domain_error("isqrt of negative");
    if (n == 0) return 0;
    Int x = Int(1) << (static_cast<unsigned>(boost::multiprecision::msb(n)) / 2 + 1);
    for (;;) {
        Int y = (x + n / x) / 2;
        if (y >= x) break;
        x = y;
    }
    return x;
}

Int gcd_int(Int a, Int b) { return gcd(std::move(a), std::move(b)); }

bool is_square_free(std::int64_t d) {
    if (d < 2) return false;
    for (std::int64_t p = 2; p * p <= d; ++p) {
        if (d % (p * p) == 0) return false;
    }
    return true;
}

Scalar::Scalar(Rational a, Rational b, std::int64_t d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
    if (b_.is_zero()) {
        d_ = 0;
        return;
    }
    if (!is_square_free(d_)) throw std::domain_error("field base must be square-free and >= 2");
}

const Rational& Scalar::rational() const {
    if (d_ != 0) throw field_mismatch("scalar is not rational: " + str());
    return a_;
}

int Scalar::sign() const {
    if (b_.is_zero()) return a_.sign();
    if (a_.is_zero()) return b_.sign();
    int sa = a_.sign(), sb = b_.sign();
    if (sa == sb) return sa;
    // Opposite signs: compare a^2 with b^2 d by integer cross-multiplication.
    Rational lhs = a_ * a_;
    Rational rhs = b_ * b_ * Rational(d_);
    auto c = lhs <=> rhs;
    if (c == std::strong_ordering::greater) return sa;
    if (c == std::strong_ordering::less) return sb;
    return 0;
}

std::int64_t Scalar::join_fields(const Scalar& x, const Scalar& y) {
    if (x.d_ == 0) return y.d_;
    if (y.d_ == 0 || y.d_ == x.d_) return x.d_;
    throw field_mismatch("mixed field contexts: sqrt(" + std::to_string(x.d_) + ") vs sqrt(" +
                         std::to_string(y.d_) + ")");
}

Scalar Scalar::operator-() const {
    Scalar r;
    r.a_ = -a_;
    r.b_ = -b_;
    r.d_ = d_;
    return r;
}

Scalar Scalar::reciprocal() const {
    if (is_zero()) throw std::domain_error("reciprocal of zero");
    if (d_ == 0) return Scalar(a_.reciprocal());
    // 1/(a + b sqrt d) = (a - b sqrt d)/(a^2 - b^2 d); denominator nonzero since sqrt d irrational.
    Rational denom = a_ * a_ - b_ * b_ * Rational(d_);
    return Scalar(a_ / denom, -(b_ / denom), d_);
}

Scalar operator+(const Scalar& x, const Scalar& y) {
    std::int64_t d = Scalar::join_fields(x, y);
    return Scalar(x.a_ + y.a_, x.b_ + y.b_, d);
}

Scalar operator-(const Scalar& x, const Scalar& y) {
    std::int64_t d = Scalar::join_fields(x, y);
    return Scalar(x.a_ - y.a_, x.b_ - y.b_, d);
}

Scalar operator*(const Scalar& x, const Scalar& y) {
    std::int64_t d = Scalar::join_fields(x, y);
    Rational rd(d);
    return Scalar(x.a_ * y.a_ + x.b_ * y.b_ * rd, x.a_ * y.b_ + x.b_ * y.a_, d);
}

Scalar operator/(const Scalar& x, const Scalar& y) { return x * y.reciprocal(); }

bool operator==(const Scalar& x, const Scalar& y) {
    if (x.d_ != 0 && y.d_ != 0 && x.d_ != y.d_) {
        Scalar::join_fields(x, y);  // throws
    }
    return x.a_ == y.a_ && x.b_ == y.b_;
}

std::string Scalar::str() const {
    if (d_ == 0) return a_.str();
    std::string sa = a_.str();
    if (!a_.is_integer()) {
        // keep "p/q" visible inside parentheses
    }
    std::string sb = b_.str();
    return "(" + sa + ")+(" + sb + ")*sqrt(" + std::to_string(d_) + ")";
}

Scalar Scalar::parse(const std::string& s) {
    auto star = s.find("*sqrt(");
    if (star == std::string::npos) return Scalar(Rational::parse(s));
    // Expect "(A)+(B)*sqrt(d)".
    if (s.empty() || s.front() != '(') throw parse_error("bad scalar: '" + s + "'");
    auto close_a = s.find(')');
    if (close_a == std::string::npos) throw parse_error("bad scalar: '" + s + "'");
    Rational a = Rational::parse(s.substr(1, close_a - 1));
    auto open_b = s.find('(', close_a + 1);
    auto close_b = s.find(')', open_b + 1);
    if (open_b == std::string::npos || close_b == std::string::npos || s[close_a + 1] != '+')
        throw parse_error("bad scalar: '" + s + "'");
    Rational b = Rational::parse(s.substr(open_b + 1, close_b - open_b - 1));
    auto close_d = s.rfind(')');
    std::size_t dpos = star + 6;
    if (close_d == std::string::npos || close_d <= dpos) throw parse_error("bad scalar: '" + s + "'");
    std::int64_t d = std::stoll(s.substr(dpos, close_d - dpos));
    return Scalar(std::move(a), std::move(b), d);
}

std::string Scalar::decimal(int sig_digits) const {
    if (sig_digits < 1) sig_digits = 1;
    int guard = 6;
    // Common denominator Q > 0: value = (A + B*sqrt(d)) / Q.
    Int Q = a_.den() * b_.den();
    Int A = a_.num() * b_.den();
    Int B = b_.num() * a_.den();

    // Find the decimal exponent first with a coarse pass, then render.
    auto floor_scaled = [&](int digits) -> Int {
        // floor(value * 10^digits)
        Int scale = 1;
        for (int i = 0; i < digits; ++i) scale *= 10;
        Int x = A * scale;
        if (B != 0) {
            // floor(|B| sqrt(d) scale); sqrt(d) irrational so never an integer
            Int root = isqrt(B * B * Int(d_) * scale * scale);
            x += (B > 0) ? root : -(root + 1);
        }
        Int q = x / Q;
        if (x < 0 && q * Q != x) --q;
        return q;
    };

    bool neg = sign() < 0;
    if (is_zero()) return "0";

    // Render with enough fractional digits: if |value| >= 1 the integer part
    // supplies leading digits; otherwise count leading zeros after the point.
    Int v0 = floor_scaled(0);
    std::string int_part = (neg ? (-v0 - 1) : v0).str();
    int int_digits = (v0 == 0 || v0 == -1) ? 0 : static_cast<int>(int_part.size());

    int frac = sig_digits + guard;
    if (int_digits == 0) frac += 40;  // room to find leading zeros for small values
    Int scaled = floor_scaled(frac);
    if (neg) scaled = -scaled;  // |value| rounded toward -inf => toward 0 adjust is negligible at guard depth
    std::string digits = scaled.str();
    while (static_cast<int>(digits.size()) < frac + 1) digits.insert(digits.begin(), '0');
    std::string whole = digits.substr(0, digits.size() - frac);
    std::string fracs = digits.substr(digits.size() - frac);

    // Trim to sig_digits significant digits (truncation; deterministic).
    std::string out;
    if (whole != "0" && !whole.empty() && whole.find_first_not_of('0') != std::string::npos) {
        int have = static_cast<int>(whole.size());
        if (have >= sig_digits) {
            out = whole;  // do not truncate the integer part
        } else {
            out = whole + "." + fracs.substr(0, sig_digits - have);
        }
    } else {
        // value < 1: skip leading zeros in the fractional part
        std::size_t nz = fracs.find_first_not_of('0');
        if (nz == std::string::npos) return "0";
        out = "0." + fracs.substr(0, nz + sig_digits);
    }
    // strip trailing zeros after the decimal point
    if (out.find('.') != std::string::npos) {
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
    }
    return neg ? "-" + out : out;
}

int cmp_cross(const Scalar& x, const Scalar& y) {
    if (x.d() == 0 || y.d() == 0 || x.d() == y.d()) return cmp(x, y);
    // x - y = (ax - ay) + bx sqrt(dx) - by sqrt(dy) = L - R with
    // L = (ax - ay) + bx sqrt(dx) in the dx-field and R = by sqrt(dy).
    Scalar L(x.a() - y.a(), x.b(), x.d());
    Scalar R(Rational(0), y.b(), y.d());
    int sl = L.sign(), sr = R.sign();
    if (sl != sr) return sl > sr ? 1 : -1;
    if (sl == 0) return 0;
    // equal nonzero signs: compare L^2 (back in the dx-field) with the
    // rational R^2 = by^2 dy
    Scalar l2 = L * L;
    Scalar r2(y.b() * y.b() * Rational(y.d()));
    int c2 = cmp(l2, r2);
    return sl > 0 ? c2 : -c2;
}

double Scalar::to_double() const {
    double v = a_.to_double();
    if (d_ != 0) v += b_.to_double() * std::sqrt(static_cast<double>(d_));
    return v;
}

}  // namespace rmatch

#include "rmatch/scalar.hpp"

#include <doctest.h>

#include <random>

using namespace rmatch;

namespace {

Rational rr(long n, long d) { return Rational(Int(n), Int(d)); }

// Small seeded generator for property checks.
struct Gen {
    std::mt19937_64 rng{42};
    Rational rational() {
        std::uniform_int_distribution<long> num(-50, 50), den(1, 30);
        return rr(num(rng), den(rng));
    }
    Scalar quad(std::int64_t d) {
        return Scalar(rational(), rational(), d);
    }
};

}  // namespace

TEST_CASE("rational normalization and arithmetic") {
    CHECK(rr(2, 4).str() == "1/2");
    CHECK(rr(-2, -4).str() == "1/2");
    CHECK(rr(2, -4).str() == "-1/2");
    CHECK(rr(0, 7).str() == "0");
    CHECK((rr(1, 3) + rr(1, 6)).str() == "1/2");
    CHECK((rr(1, 3) * rr(3, 5)).str() == "1/5");
    CHECK((rr(1, 3) / rr(2, 3)).str() == "1/2");
    CHECK(rr(7, 2).floor() == 3);
    CHECK(rr(-7, 2).floor() == -4);
    CHECK(rr(-6, 2).floor() == -3);
    CHECK_THROWS(rr(1, 1) / rr(0, 1));
}

TEST_CASE("cmp is exact and total") {
    // reflexivity
    CHECK(cmp(Scalar(rr(1, 2)), Scalar(rr(1, 2))) == 0);
    // golden mean beta = (1+sqrt5)/2 vs 8/5: beta > 1.6
    Scalar beta(rr(1, 2), rr(1, 2), 5);
    CHECK(cmp(beta, Scalar(rr(8, 5))) > 0);
    // l_4 = (5 - sqrt13)/2 < 7/10 (Fig. 1's alpha lies inside J_4)
    Scalar l4(rr(5, 2), rr(-1, 2), 13);
    CHECK(cmp(l4, Scalar(rr(7, 10))) < 0);
    // and l_4 > 1/2 since sqrt13 < 4
    CHECK(cmp(l4, Scalar(rr(1, 2))) > 0);
}

TEST_CASE("field axioms on random samples") {
    Gen g;
    for (int i = 0; i < 200; ++i) {
        Scalar x = g.quad(5), y = g.quad(5), z = g.quad(5);
        CHECK((x + y) + z == x + (y + z));
        CHECK(x * (y + z) == x * y + x * z);
        CHECK(x + y == y + x);
        if (!y.is_zero()) CHECK((x / y) * y == x);
    }
}

TEST_CASE("cmp antisymmetric and transitive on random triples") {
    Gen g;
    for (int i = 0; i < 200; ++i) {
        Scalar x = g.quad(13), y = g.quad(13), z = g.quad(13);
        CHECK(cmp(x, y) == -cmp(y, x));
        if (cmp(x, y) <= 0 && cmp(y, z) <= 0) CHECK(cmp(x, z) <= 0);
    }
}

TEST_CASE("quad with b=0 agrees with rational cmp") {
    Gen g;
    for (int i = 0; i < 100; ++i) {
        Rational a = g.rational(), b = g.rational();
        Scalar qa(a, Rational(0), 7), qb(b, Rational(0), 7);
        CHECK(cmp(qa, qb) == ((a < b) ? -1 : (a == b ? 0 : 1)));
    }
}

TEST_CASE("mixed field contexts are a hard error") {
    Scalar r5(rr(1, 1), rr(1, 1), 5);
    Scalar r13(rr(1, 1), rr(1, 1), 13);
    CHECK_THROWS_AS((void)(r5 + r13), field_mismatch);
    CHECK_THROWS_AS((void)(r5 * r13), field_mismatch);
    // rationals join any field
    CHECK((r5 + Scalar(rr(1, 2))).d() == 5);
}

TEST_CASE("canonical text round trip") {
    Gen g;
    for (int i = 0; i < 100; ++i) {
        Scalar x = g.quad(5);
        CHECK(Scalar::parse(x.str()) == x);
        Scalar r{g.rational()};
        CHECK(Scalar::parse(r.str()) == r);
    }
    CHECK(Scalar::parse("7/5").str() == "7/5");
    CHECK(Scalar::parse("(1/2)+(1/2)*sqrt(5)").str() == "(1/2)+(1/2)*sqrt(5)");
    CHECK(Scalar::parse("(1/2)+(-1/2)*sqrt(13)").str() == "(1/2)+(-1/2)*sqrt(13)");
    CHECK_THROWS_AS(Scalar::parse("zzz"), parse_error);
}

TEST_CASE("sign analysis without floating point") {
    // a > 0, b < 0, a^2 vs b^2 d decides
    Scalar x(rr(4, 1), rr(-1, 1), 13);  // 4 - sqrt13 > 0
    CHECK(x.sign() == 1);
    Scalar y(rr(3, 1), rr(-1, 1), 13);  // 3 - sqrt13 < 0
    CHECK(y.sign() == -1);
    Scalar z(rr(-7, 2), rr(1, 1), 13);  // sqrt13 - 3.5 > 0
    CHECK(z.sign() == 1);
    CHECK(Scalar(rr(0, 1)).sign() == 0);
}

TEST_CASE("decimal rendering is deterministic and plausible") {
    CHECK(Scalar(rr(1, 2)).decimal(20) == "0.5");
    CHECK(Scalar(rr(-1, 3)).decimal(5) == "-0.33333");
    Scalar beta(rr(1, 2), rr(1, 2), 5);
    std::string d = beta.decimal(20);
    CHECK(d.substr(0, 12) == "1.6180339887");
    CHECK(Scalar(rr(2, 1)).decimal(20) == "2");
}

TEST_CASE("isqrt") {
    CHECK(isqrt(Int(0)) == 0);
    CHECK(isqrt(Int(1)) == 1);
    CHECK(isqrt(Int(15)) == 3);
    CHECK(isqrt(Int(16)) == 4);
    Int big = Int("123456789123456789123456789");
    Int r = isqrt(big);
    CHECK(r * r <= big);
    CHECK((r + 1) * (r + 1) > big);
}

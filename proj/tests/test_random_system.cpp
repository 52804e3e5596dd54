#include "rmatch/random_system.hpp"
#include "rmatch/sbfamily.hpp"

#include <doctest.h>

using namespace rmatch;

namespace {
Rational rr(long n, long d) { return Rational(Int(n), Int(d)); }
}

TEST_CASE("constructor validation") {
    DoublingParams params(rr(3, 2), rr(1, 2));
    RandomSystem sys = make_doubling_system(params);
    CHECK(sys.n_maps() == 2);
    // degenerate probabilities rejected
    CHECK_THROWS(DoublingParams(rr(3, 2), rr(0, 1)));
    CHECK_THROWS(DoublingParams(rr(3, 2), rr(1, 1)));
}

TEST_CASE("common partition is the coarsest refinement") {
    RandomSystem sys = make_doubling_system({rr(7, 5), rr(1, 3)});
    const auto& part = sys.partition();
    REQUIRE(part.size() == 6);
    CHECK(part[0] == Scalar(-1));
    CHECK(part[1] == Scalar(rr(-1, 2)));
    CHECK(part[2] == Scalar(rr(-1, 5)));  // (1-alpha)/2
    CHECK(part[3] == Scalar(rr(1, 5)));   // (alpha-1)/2
    CHECK(part[4] == Scalar(rr(1, 2)));
    CHECK(part[5] == Scalar(1));
    CHECK(sys.critical_points().size() == 4);

    // alpha = 1 degenerates the middle pair to one point
    RandomSystem deg = make_doubling_system({rr(1, 1), rr(1, 2)});
    CHECK(deg.partition().size() == 5);
    CHECK(deg.critical_points().size() == 3);
    // alpha = 2: coincident maps, reduced critical set {-1/2, 1/2}
    RandomSystem two = make_doubling_system({rr(2, 1), rr(1, 2)});
    CHECK(two.critical_points().size() == 2);
}

TEST_CASE("word weight") {
    RandomSystem sys = make_doubling_system({rr(3, 2), rr(1, 3)});
    CHECK(sys.word_weight({}) == Rational(1));
    CHECK(sys.word_weight({0, 1, 1}) == rr(4, 27));
    // multinomial normalization at length 3
    Rational total;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) total += sys.word_weight({a, b, c});
    CHECK(total == Rational(1));
}

TEST_CASE("apply_word follows the paper's composition order") {
    // alpha in (1, 3/2): T_1(1 - alpha) = 2 - 2alpha
    Rational alpha = rr(7, 5);
    RandomSystem sys = make_doubling_system({alpha, rr(1, 2)});
    Scalar x(Rational(1) - alpha);
    CHECK(sys.apply_word({1}, x) == Scalar(Rational(2) - Rational(2) * alpha));
    // empty word is the identity
    CHECK(sys.apply_word({}, Scalar(1)) == Scalar(1));
    // associativity of concatenation
    Word w1{0, 1}, w2{1, 0}, cat{0, 1, 1, 0};
    Scalar y0(rr(3, 7));
    CHECK(sys.apply_word(cat, y0) == sys.apply_word(w2, sys.apply_word(w1, y0)));
}

TEST_CASE("degenerate orbit detection in apply_word") {
    // alpha = 3/2: T_0(1) = 1/2 is a critical point; continuing must throw
    RandomSystem sys = make_doubling_system({rr(3, 2), rr(1, 2)});
    CHECK_THROWS_AS(sys.apply_word({0, 0}, Scalar(1)), degenerate_orbit);
}

TEST_CASE("hypotheses for the doubling family") {
    RandomSystem sys = make_doubling_system({rr(7, 5), rr(1, 4)});
    auto rep = sys.check_hypotheses();
    CHECK(rep.a1);
    CHECK(rep.a2);
    CHECK(rep.rho == Scalar(rr(1, 2)));  // p_j/|T_j'| = p_j/2 sums to 1/2
    CHECK(rep.a3);
    CHECK(rep.c_applicable);
    CHECK(rep.c1);
    CHECK(rep.c2);
    CHECK(rep.c3);
}

TEST_CASE("(c2) witnessed by distinct averaged fixed points") {
    RandomSystem sys = make_doubling_system({rr(7, 5), rr(1, 2)});
    auto rep = sys.check_hypotheses();
    // cell 1 (slope 2, intercept alpha): fixed point alpha; cell 3: 0
    REQUIRE(rep.c2);
    CHECK(rep.c2_cell_i != rep.c2_cell_n);
}

TEST_CASE("hypotheses pass for all rational alpha in (1,2], p in (0,1) samples") {
    for (long num = 11; num <= 19; num += 2) {
        RandomSystem sys = make_doubling_system({rr(num, 10), rr(2, 7)});
        auto rep = sys.check_hypotheses();
        CHECK(rep.all_a());
        CHECK((rep.c1 && rep.c2 && rep.c3));
    }
}

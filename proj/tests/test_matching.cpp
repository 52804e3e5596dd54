#include "rmatch/matching.hpp"
#include "rmatch/sbfamily.hpp"

#include <doctest.h>

#include <set>

using namespace rmatch;

namespace {

Rational rr(long n, long d) { return Rational(Int(n), Int(d)); }

MatchingCertificate expect_cert(const RandomSystem& sys, const Scalar& c, SearchOptions opt = {}) {
    auto res = find_matching(sys, c, opt);
    auto* cert = std::get_if<MatchingCertificate>(&res);
    REQUIRE(cert != nullptr);
    return *cert;
}

}  // namespace

TEST_CASE("tree expansion matches the theorem's collapse for alpha in [3/2,2]") {
    // alpha = 8/5: T_j(1-alpha) = 2-alpha = T_j(1), so depth 2 collapses
    RandomSystem sys = make_doubling_system({rr(8, 5), rr(1, 2)});
    OrbitTree plus(sys, {Scalar(rr(1, 2)), +1});
    plus.expand_to(2);
    REQUIRE(plus.level(0).classes.size() == 1);
    CHECK(plus.level(0).classes[0].pt.value == Scalar(rr(-3, 5)));  // 1 - alpha
    REQUIRE(plus.level(1).classes.size() == 1);
    CHECK(plus.level(1).classes[0].pt.value == Scalar(rr(2, 5)));  // 2 - alpha
}

TEST_CASE("doubling alpha=8/5 has strong matching with M=2, Y={2-alpha}") {
    RandomSystem sys = make_doubling_system({rr(8, 5), rr(1, 3)});
    auto cert = expect_cert(sys, Scalar(rr(1, 2)));
    CHECK(cert.M == 2);
    REQUIRE(cert.y_set.size() == 1);
    CHECK(cert.y_set[0] == Scalar(rr(2, 5)));
    CHECK(cert.strong);
    // single y, constant slope 2: both sums are 1/4
    CHECK(cert.balance[0].sum_minus == Scalar(rr(1, 4)));
    CHECK(cert.balance[0].sum_plus == Scalar(rr(1, 4)));
}

TEST_CASE("doubling alpha=7/5 has strong matching with M=3, Y={-1/5}") {
    // S(1) = 3/5 lies in (1/2, 9/10), so M_alpha = 2 and Y = {S^2(1)} = {-1/5}
    RandomSystem sys = make_doubling_system({rr(7, 5), rr(1, 2)});
    auto cert = expect_cert(sys, Scalar(rr(1, 2)));
    CHECK(cert.M == 3);
    REQUIRE(cert.y_set.size() == 1);
    CHECK(cert.y_set[0] == Scalar(rr(-1, 5)));
    CHECK(cert.strong);
    CHECK_FALSE(cert.crossed_critical);
}

TEST_CASE("doubling alpha=6/5 reports no matching within depth (Markov cycle)") {
    RandomSystem sys = make_doubling_system({rr(6, 5), rr(1, 2)});
    SearchOptions opt;
    opt.m_max = 10;
    auto res = find_matching(sys, Scalar(rr(1, 2)), opt);
    REQUIRE(std::holds_alternative<NoMatchingWithinDepth>(res));
    auto cls = m_alpha(rr(6, 5));
    CHECK(cls.kind == MAlphaResult::Cycle);
    REQUIRE(cls.cycle.size() == 2);
    CHECK(cls.cycle[0] == rr(4, 5));
    CHECK(cls.cycle[1] == rr(2, 5));
}

TEST_CASE("stop-word cylinders partition the ray space") {
    RandomSystem sys = make_doubling_system({rr(7, 5), rr(2, 7)});
    auto cert = expect_cert(sys, Scalar(rr(1, 2)));
    Rational mass_minus, mass_plus;
    for (const auto& e : cert.balance) {
        mass_minus += e.mass_minus;
        mass_plus += e.mass_plus;
    }
    CHECK(mass_minus == Rational(1));
    CHECK(mass_plus == Rational(1));
}

TEST_CASE("tree consistency against apply_word brute force") {
    RandomSystem sys = make_doubling_system({rr(7, 5), rr(1, 2)});
    Scalar c(rr(1, 2));
    for (int side = -1; side <= 1; side += 2) {
        OrbitTree tree(sys, {c, side});
        std::size_t depth = 4;
        tree.expand_to(depth);
        // enumerate all words and reconcile against apply_word_sided
        for (std::size_t len = 1; len <= depth; ++len) {
            for (std::size_t bits = 0; bits < (1u << len); ++bits) {
                Word w;
                for (std::size_t k = 0; k < len; ++k) w.push_back((bits >> k) & 1);
                SidedPoint p = sys.apply_word_sided(w, {c, side});
                bool found = false;
                for (const auto& cl : tree.level(len - 1).classes)
                    if (cl.pt.value == p.value) found = true;
                CHECK(found);
            }
        }
    }
}

TEST_CASE("verify_strong recomputes the balance sums") {
    RandomSystem sys = make_doubling_system({rr(7, 5), rr(1, 3)});
    auto cert = expect_cert(sys, Scalar(rr(1, 2)));
    auto re = verify_strong(sys, cert);
    CHECK(re.strong == cert.strong);
    CHECK(re.balance[0].sum_minus == cert.balance[0].sum_minus);
}

TEST_CASE("alternative stopping rejects non-covering Y sets") {
    RandomSystem sys = make_doubling_system({rr(7, 5), rr(1, 2)});
    auto cert = expect_cert(sys, Scalar(rr(1, 2)));
    // {1-alpha} alone misses the rays that stay on the orbit of 1
    CHECK_THROWS_AS(alternative_stopping(sys, cert, {Scalar(rr(-2, 5))}), std::invalid_argument);
}

TEST_CASE("deterministic one-map system reduces to classical matching") {
    // |Omega| = 1: S_alpha with alpha = 7/5 matches at M = M_alpha + 1 = 3
    RandomSystem sys = make_deterministic_doubling(rr(7, 5));
    auto cert = expect_cert(sys, Scalar(rr(1, 2)));
    CHECK(cert.M == 3);
    CHECK(cert.y_set[0] == Scalar(rr(-1, 5)));
    CHECK(cert.strong);  // equal one-sided derivative products (2^3 both)
}

TEST_CASE("proposition oracle: tree points stay in {S^k(1), S^k(1)-alpha}") {
    Rational alpha = rr(7, 5);
    RandomSystem sys = make_doubling_system({alpha, rr(1, 2)});
    auto cls = m_alpha(alpha);
    REQUIRE(cls.kind == MAlphaResult::Matching);
    // brute force over all words up to length M_alpha, starting from 1 and 1-alpha
    for (const Scalar x0 : {Scalar(1), Scalar(Rational(1) - alpha)}) {
        for (std::size_t len = 0; len <= cls.m_alpha; ++len) {
            for (std::size_t bits = 0; bits < (1u << len); ++bits) {
                Word w;
                for (std::size_t k = 0; k < len; ++k) w.push_back((bits >> k) & 1);
                Scalar v = sys.apply_word(w, x0);
                Rational sk = cls.orbit.at(len);
                CHECK((v == Scalar(sk) || v == Scalar(sk - alpha)));
            }
        }
    }
}

TEST_CASE("difference-orbit count: 2(k+1) distinct values for k < M_alpha") {
    Rational alpha = rr(137, 99);  // generic matching parameter
    auto cls = m_alpha(alpha);
    REQUIRE(cls.kind == MAlphaResult::Matching);
    for (std::size_t k = 0; k + 1 < cls.m_alpha; ++k) {
        std::set<std::string> vals;
        Rational x(1), y = Rational(1) - alpha;
        for (std::size_t n = 0; n <= k; ++n) {
            vals.insert(x.str());
            vals.insert((x - alpha).str());
            // step both deterministically: S(x), with S^k(1)-alpha tracked
            Rational half(1, 2);
            auto step = [&](Rational v) {
                if (v < -half) return v * Rational(2) + alpha;
                if (v <= half) return v * Rational(2);
                return v * Rational(2) - alpha;
            };
            x = step(x);
            (void)y;
        }
        CHECK(vals.size() == 2 * (k + 1));
    }
}

#include "rmatch/pwmap.hpp"
#include "rmatch/sbfamily.hpp"

#include <doctest.h>

using namespace rmatch;

namespace {
Rational rr(long n, long d) { return Rational(Int(n), Int(d)); }
}

TEST_CASE("one-sided evaluation of the doubling maps at the critical point") {
    // T_{alpha,0} at x = 1/2: left limit 1 (= a_{4,0}), right limit 1-alpha (= b_{4,0})
    DoublingParams params(rr(7, 5), rr(1, 2));
    RandomSystem sys = make_doubling_system(params);
    Scalar half(rr(1, 2));
    CHECK(sys.map(0).eval(half, Side::Below) == Scalar(1));
    CHECK(sys.map(0).eval(half, Side::Above) == Scalar(rr(-2, 5)));  // 1 - 7/5
    CHECK(sys.map(1).eval(half, Side::Above) == Scalar(rr(-2, 5)));
    // fixed point of the middle branch
    CHECK(sys.map(0).eval(Scalar(0)) == Scalar(0));
    CHECK(sys.map(1).eval(Scalar(0)) == Scalar(0));
    // every doubling branch has derivative 2
    CHECK(sys.map(0).deriv(half, Side::Below) == Scalar(2));
    CHECK(sys.map(1).deriv(Scalar(rr(-3, 4))) == Scalar(2));
}

TEST_CASE("domain errors and boundary ownership") {
    DoublingParams params(rr(3, 2), rr(1, 2));
    RandomSystem sys = make_doubling_system(params);
    CHECK_THROWS_AS(sys.map(0).eval(Scalar(rr(3, 2))), domain_error_x);
    // T_{alpha,0} owns (1/2, 1] on the top branch: at 1/2 the middle applies
    CHECK(sys.map(0).eval(Scalar(rr(1, 2))) == Scalar(1));
    // T_{alpha,1} owns [ (alpha-1)/2, 1 ] on the top branch
    CHECK(sys.map(1).eval(Scalar(rr(1, 4))) == Scalar(rr(-1, 1)));
}

TEST_CASE("monotone branch evaluation is order preserving") {
    PiecewiseMap s = s_alpha_map(rr(7, 5));
    Scalar a(rr(-2, 5)), b(rr(-1, 5));
    CHECK(cmp(s.eval(a), s.eval(b)) < 0);
}

TEST_CASE("preimages of affine maps") {
    // doubling alpha = 3/2: preimages of 0 are {-3/4, 0, 3/4}
    DoublingParams params(rr(3, 2), rr(1, 2));
    RandomSystem sys = make_doubling_system(params);
    const auto& m0 = dynamic_cast<const PiecewiseMap&>(sys.map(0));
    auto pre = m0.preimages(Scalar(0));
    REQUIRE(pre.size() == 3);
    CHECK(pre[0].first == Scalar(rr(-3, 4)));
    CHECK(pre[1].first == Scalar(0));
    CHECK(pre[2].first == Scalar(rr(3, 4)));
    // preimage count equals the number of branches whose image contains y,
    // and T(preimage) = y exactly
    for (const auto& [x, bi] : m0.preimages(Scalar(rr(1, 3))))
        CHECK(m0.branches()[bi].eval(x) == Scalar(rr(1, 3)));
}

TEST_CASE("eval at vs one-sided limits agree per ownership") {
    DoublingParams params(rr(7, 5), rr(1, 2));
    RandomSystem sys = make_doubling_system(params);
    // at each interior critical point, the owning side limit equals eval-at
    for (const auto& c : sys.critical_points()) {
        for (std::size_t j = 0; j < 2; ++j) {
            Scalar at = sys.map(j).eval(c, Side::At);
            Scalar below = sys.map(j).eval(c, Side::Below);
            Scalar above = sys.map(j).eval(c, Side::Above);
            CHECK((at == below || at == above));
        }
    }
}

TEST_CASE("sided step tracks approach through monotone branches") {
    DoublingParams params(rr(7, 5), rr(1, 2));
    RandomSystem sys = make_doubling_system(params);
    SidedStep st = sys.map(0).step({Scalar(rr(1, 2)), -1});
    CHECK(st.next.value == Scalar(1));
    CHECK(st.next.approach == -1);  // increasing branch keeps the side
    CHECK(*st.deriv == Scalar(2));
    CHECK(st.through_critical);
}

TEST_CASE("map validation rejects broken branch lists") {
    Scalar one(1);
    std::vector<Branch> gap;
    gap.push_back(affine_branch(-one, true, Scalar(0), true, Scalar(2), Scalar(0)));
    gap.push_back(affine_branch(Scalar(rr(1, 4)), true, one, true, Scalar(2), Scalar(0)));
    CHECK_THROWS(PiecewiseMap(-one, one, gap));

    std::vector<Branch> both_own;
    both_own.push_back(affine_branch(-one, true, Scalar(0), true, Scalar(2), Scalar(0)));
    both_own.push_back(affine_branch(Scalar(0), true, one, true, Scalar(2), Scalar(0)));
    CHECK_THROWS(PiecewiseMap(-one, one, both_own));
}

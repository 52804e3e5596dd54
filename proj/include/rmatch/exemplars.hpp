#pragma once

#include "rmatch/density.hpp"

namespace rmatch {

/// sqrt of a nonnegative rational as an exact Scalar: rational when the
/// value is a perfect square, otherwise (s/q) * sqrt(d) with d square-free.
Scalar sqrt_of_rational(const Rational& r);

// ---------------------------------------------------------------------------
// Random Nakada / Ito-Tanaka alpha-continued fractions on [alpha-1, alpha].

struct CFParams {
    Rational alpha;  // in (0, 1)
    Rational p0;

    CFParams(Rational a, Rational p);
};

/// Lazy-branch Moebius map: digits are materialized per visited point.
class CfMap final : public MapBase {
public:
    CfMap(Rational alpha, int j);

    const Scalar& lo() const override { return lo_; }
    const Scalar& hi() const override { return hi_; }
    Branch branch_at(const Scalar& x, Side side) const override;
    bool is_critical(const Scalar& x) const override;
    bool affine_only() const override { return false; }
    bool has_conventional_fixed_zero() const override { return true; }

private:
    Rational alpha_;
    int j_;
    Scalar lo_, hi_;
};

RandomSystem cf_system(const CFParams& params);

/// Standing-hypothesis report for the CF family (countable partition).
HypothesisReport cf_hypotheses(const CFParams& params);

/// Matching-interval endpoints l_n, r_n of J_n (n >= 4); exact, each in its
/// own quadratic field.
std::pair<Scalar, Scalar> jn_interval(int n);
/// Subdivision points i_{n,k} of J_n, 2 <= k <= n.
Scalar i_nk(int n, int k);

/// True iff l < x < r, decided exactly (per-field comparisons).
bool interval_contains(const Scalar& l, const Scalar& r, const Rational& x);

/// Locate a rational alpha: the J_n cell (n, k) with alpha in
/// J_n intersect (i_{n,k+1}, i_{n,k}], or n = 0 when uncovered.
struct CfCell {
    int n = 0, k = 0;
    bool in_nonstrong_interval = false;  // ((sqrt10-2)/2, 2-sqrt2)
};
CfCell locate_cf_parameter(const Rational& alpha, int n_cap = 64);

/// Negative critical points: -1/(alpha+n) (a T0 critical) and 1/(alpha-n)
/// (a T1 critical); smallest valid n is used when n == 0.
Scalar cf_negative_critical_t0(const CFParams& params, int n = 0);
Scalar cf_negative_critical_t1(const CFParams& params, int n = 0);

struct CfCertificates {
    CfCell cell;
    MatchingCertificate positive;  // critical point 1/(alpha+1)
    MatchingCertificate negative;  // critical point -1/(alpha+n)
    /// The two-value certificate of the matching definition's display for
    /// the negative critical point (Y = {1-alpha, y}).
    MatchingCertificate negative_paper_y;
};

/// Certificates at a rational alpha inside a matching interval of the CF
/// family: strong with M=4 inside J_n; random-but-not-strong with M=3 on
/// ((sqrt10-2)/2, 2-sqrt2). Throws when alpha lies in neither.
CfCertificates cf_certificates(const CFParams& params);

// ---------------------------------------------------------------------------
// Random generalised beta-transformations, beta the golden mean.

Scalar golden_mean();          // (1+sqrt5)/2
Scalar beta_interval_lo();     // (3 beta - 2)/2
Scalar beta_interval_hi();     // 4 beta - 5

struct BetaParams {
    Scalar alpha;  // in ((3b-2)/2, 4b-5), exact in Q(sqrt 5)
    Rational p0;

    BetaParams(Scalar a, Rational p);
};

RandomSystem beta_system(const BetaParams& params);

/// Strong certificates for all four critical points {-1, -1/b, 1/b, 1},
/// in partition order (M=7 at +-1/b, M=3 at +-1).
std::vector<MatchingCertificate> beta_certificates(const BetaParams& params);

DensityResult beta_density(const BetaParams& params);

}  // namespace rmatch

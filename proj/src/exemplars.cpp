#include "rmatch/exemplars.hpp"

namespace rmatch {

Scalar sqrt_of_rational(const Rational& r) {
    if (r.sign() < 0) throw std::domain_error("sqrt of a negative rational");
    if (r.is_zero()) return Scalar(0);
    // sqrt(p/q) = sqrt(p q)/q; split the square part of p q.
    Int m = r.num() * r.den();
    Int s = 1, d = 1;
    for (Int f = 2; f * f <= m; ++f) {
        while (m % (f * f) == 0) {
            m /= f * f;
            s *= f;
        }
    }
    d = m;
    if (d == 1) return Scalar(Rational(s, r.den()));
    return Scalar(Rational(0), Rational(s, r.den()), static_cast<std::int64_t>(d));
}

// ---------------------------------------------------------------------------

CFParams::CFParams(Rational a, Rational p) : alpha(std::move(a)), p0(std::move(p)) {
    if (alpha.sign() <= 0 || alpha >= Rational(1))
        throw std::invalid_argument("alpha must lie in (0, 1)");
    if (p0.sign() <= 0 || p0 >= Rational(1)) throw std::invalid_argument("p0 must lie in (0, 1)");
}

CfMap::CfMap(Rational alpha, int j) : alpha_(std::move(alpha)), j_(j) {
    lo_ = Scalar(alpha_ - Rational(1));
    hi_ = Scalar(alpha_);
}

namespace {

Rational rat_of(const Scalar& x) {
    if (!x.is_rational())
        throw domain_error_x("CF orbits are evaluated at rational points only");
    return x.rational();
}

}  // namespace

Branch CfMap::branch_at(const Scalar& xs, Side side) const {
    Rational x = rat_of(xs);
    if (x < rat_of(lo_) || x > rat_of(hi_)) throw domain_error_x("point outside [alpha-1, alpha]");
    if (x.is_zero()) throw domain_error_x("no branch at the conventional fixed point 0");
    Branch b;
    b.lo_closed = false;
    b.hi_closed = true;
    Rational one(1);
    if (x.sign() > 0) {
        // T(x) = 1/x - n on (1/(alpha+n), 1/(alpha+n-1)]; same for both maps.
        Rational q = one / x - alpha_;
        // q in [n-1, n) on branch n; the right-closed boundary has integral q.
        Int n = (q.is_integer() && side == Side::Above) ? q.floor() : q.floor() + 1;
        b.form = MoebiusForm{Scalar(Rational(-n)), Scalar(1), Scalar(1), Scalar(0)};
        Rational blo = one / (alpha_ + Rational(n));
        Rational bhi = one / (alpha_ + Rational(n) - one);
        b.lo = Scalar(blo);
        b.hi = bhi > alpha_ ? hi_ : Scalar(bhi);
        return b;
    }
    if (j_ == 0) {
        // T0(x) = -1/x - n on [-1/(alpha+n-1), -1/(alpha+n)).
        Rational q = -(one / x) - alpha_;  // = 1/|x| - alpha
        Int n;
        if (q.is_integer()) {
            // x = -1/(alpha+q): left-closed end of branch q+1
            n = (side == Side::Below) ? q.floor() : q.floor() + 1;
        } else {
            n = q.floor() + 1;
        }
        b.form = MoebiusForm{Scalar(Rational(-n)), Scalar(-1), Scalar(1), Scalar(0)};
        Rational blo = -(one / (alpha_ + Rational(n) - one));
        Rational bhi = -(one / (alpha_ + Rational(n)));
        b.lo = blo < rat_of(lo_) ? lo_ : Scalar(blo);
        b.hi = Scalar(bhi);
        b.lo_closed = true;
        b.hi_closed = false;
        return b;
    }
    // T1(x) = 1/x + n on [1/(alpha-n), 1/(alpha-n-1)).
    Rational q = alpha_ - one / x;  // in [n, n+1) on the branch
    Int n;
    if (q.is_integer()) {
        // x = 1/(alpha-q): left-closed end of branch q
        n = (side == Side::Below) ? q.floor() - 1 : q.floor();
    } else {
        n = q.floor();
    }
    b.form = MoebiusForm{Scalar(Rational(n)), Scalar(1), Scalar(1), Scalar(0)};
    Rational blo = one / (alpha_ - Rational(n));
    Rational bhi = one / (alpha_ - Rational(n) - one);
    b.lo = blo < rat_of(lo_) ? lo_ : Scalar(blo);
    b.hi = Scalar(bhi);
    b.lo_closed = true;
    b.hi_closed = false;
    return b;
}

bool CfMap::is_critical(const Scalar& xs) const {
    if (!xs.is_rational()) return false;
    Rational x = xs.rational();
    if (x.is_zero()) return false;
    if (x <= rat_of(lo_) || x >= rat_of(hi_)) return false;
    Rational one(1);
    if (x.sign() > 0) return (one / x - alpha_).is_integer();
    if (j_ == 0) return (-(one / x) - alpha_).is_integer();
    return (alpha_ - one / x).is_integer();
}

RandomSystem cf_system(const CFParams& params) {
    return RandomSystem(
        {std::make_shared<CfMap>(params.alpha, 0), std::make_shared<CfMap>(params.alpha, 1)},
        {params.p0, Rational(1) - params.p0});
}

HypothesisReport cf_hypotheses(const CFParams& params) {
    HypothesisReport rep;
    rep.a1 = true;  // countable branch partition, C^1 monotone per branch
    rep.a3 = true;
    // |T'| = 1/x^2 >= 1/max(alpha, 1-alpha)^2 on each side; since alpha > 1/2
    // on all matching intervals of interest, rho = alpha^2 when alpha >= 1/2.
    Rational m = params.alpha >= Rational(1) - params.alpha ? params.alpha
                                                            : Rational(1) - params.alpha;
    rep.rho = Scalar(m * m);
    rep.a2 = rep.rho < Scalar(1);
    rep.c_applicable = false;
    return rep;
}

std::pair<Scalar, Scalar> jn_interval(int n) {
    if (n < 4) throw std::invalid_argument("J_n needs n >= 4");
    Rational rn(n);
    // l_n = (n+1 - sqrt(n^2-2n+5))/2
    Scalar root_l = sqrt_of_rational(rn * rn - Rational(2) * rn + Rational(5));
    Scalar l = (Scalar(rn + Rational(1)) - root_l) / Scalar(2);
    // r_n = sqrt((n-2)/n)
    Scalar r = sqrt_of_rational((rn - Rational(2)) / rn);
    return {l, r};
}

Scalar i_nk(int n, int k) {
    if (n < 4 || k < 2 || k > n) throw std::invalid_argument("i_{n,k} needs n >= 4, 2 <= k <= n");
    Rational rn(n), rk(k);
    Scalar root = sqrt_of_rational(rk * rk * rn * rn - Rational(2) * rk * rk * rn + rk * rk +
                                   Rational(4));
    Scalar num = Scalar(Rational(-4) + Rational(2) * rn - rk * rn + rk) + root;
    return num / Scalar(Rational(2) * (rn - Rational(1)));
}

bool interval_contains(const Scalar& l, const Scalar& r, const Rational& x) {
    Scalar xs{x};
    return cmp(l, xs) < 0 && cmp(xs, r) < 0;
}

CfCell locate_cf_parameter(const Rational& alpha, int n_cap) {
    CfCell cell;
    Scalar xs{alpha};
    Scalar ns_lo = (sqrt_of_rational(Rational(10)) - Scalar(2)) / Scalar(2);
    Scalar ns_hi = Scalar(2) - sqrt_of_rational(Rational(2));
    if (cmp(ns_lo, xs) < 0 && cmp(xs, ns_hi) < 0) {
        cell.in_nonstrong_interval = true;
        return cell;
    }
    for (int n = 4; n <= n_cap; ++n) {
        auto [l, r] = jn_interval(n);
        if (!interval_contains(l, r, alpha)) continue;
        for (int k = 2; k <= n - 1; ++k) {
            // alpha in (i_{n,k+1}, i_{n,k}]
            if (cmp(Scalar(alpha), i_nk(n, k)) <= 0 && cmp(i_nk(n, k + 1), Scalar(alpha)) < 0) {
                cell.n = n;
                cell.k = k;
                return cell;
            }
        }
        cell.n = n;  // inside J_n but no k-cell: should not happen
        return cell;
    }
    return cell;
}

Scalar cf_positive_critical(const CFParams& params, int n) {
    Rational one(1);
    if (n == 0) {
        // smallest n with 1/(alpha+n) strictly inside (0, alpha)
        n = 1;
        while (!(one / (params.alpha + Rational(n)) < params.alpha)) ++n;
    }
    return Scalar(one / (params.alpha + Rational(n)));
}

Scalar cf_negative_critical_t0(const CFParams& params, int n) {
    Rational one(1);
    if (n == 0) {
        n = 1;
        while (-(one / (params.alpha + Rational(n))) < params.alpha - one) ++n;
    }
    return Scalar(-(one / (params.alpha + Rational(n))));
}

Scalar cf_negative_critical_t1(const CFParams& params, int n) {
    Rational one(1);
    if (n == 0) {
        n = 2;
        while (one / (params.alpha - Rational(n)) < params.alpha - one) ++n;
    }
    return Scalar(one / (params.alpha - Rational(n)));
}

CfCertificates cf_certificates(const CFParams& params) {
    CfCertificates out;
    out.cell = locate_cf_parameter(params.alpha);
    if (out.cell.n == 0 && !out.cell.in_nonstrong_interval)
        throw std::invalid_argument("alpha lies in no covered matching interval");
    RandomSystem sys = cf_system(params);
    Scalar c_pos = Scalar(Rational(1) / (params.alpha + Rational(1)));
    Scalar c_neg = cf_negative_critical_t0(params);

    SearchOptions opt;
    opt.require_strong = !out.cell.in_nonstrong_interval;
    opt.m_max = out.cell.in_nonstrong_interval ? 3 : 6;
    opt.max_y = 3;

    auto get = [&](const Scalar& c) {
        auto res = find_matching(sys, c, opt);
        if (auto* cert = std::get_if<MatchingCertificate>(&res)) return *cert;
        const auto& nm = std::get<NoMatchingWithinDepth>(res);
        throw structural_error("no CF certificate within depth " + std::to_string(nm.depth) +
                               ": " + nm.note);
    };
    out.positive = get(c_pos);
    out.negative = get(c_neg);
    // The displayed two-value stop set for the negative critical point.
    if (!out.cell.in_nonstrong_interval) {
        Scalar one_minus_alpha = Scalar(Rational(1) - params.alpha);
        std::vector<Scalar> ys{one_minus_alpha};
        for (const auto& y : out.negative.y_set)
            if (!(y == one_minus_alpha)) ys.push_back(y);
        out.negative_paper_y = alternative_stopping(sys, out.negative, ys);
    } else {
        out.negative_paper_y = out.negative;
    }
    return out;
}

// ---------------------------------------------------------------------------

Scalar golden_mean() { return Scalar(Rational(1, 2), Rational(1, 2), 5); }

Scalar beta_interval_lo() {
    return (Scalar(3) * golden_mean() - Scalar(2)) / Scalar(2);
}

Scalar beta_interval_hi() { return Scalar(4) * golden_mean() - Scalar(5); }

BetaParams::BetaParams(Scalar a, Rational p) : alpha(std::move(a)), p0(std::move(p)) {
    if (!(cmp(beta_interval_lo(), alpha) < 0 && cmp(alpha, beta_interval_hi()) < 0))
        throw std::invalid_argument("alpha must lie in ((3b-2)/2, 4b-5)");
    if (p0.sign() <= 0 || p0 >= Rational(1)) throw std::invalid_argument("p0 must lie in (0, 1)");
}

namespace {

MapPtr beta_map(const Scalar& alpha, int j) {
    Scalar b = golden_mean();
    Scalar inv_b = b - Scalar(1);  // 1/beta
    std::vector<Branch> br;
    if (j == 0) {
        br.push_back(affine_branch(-b, true, -inv_b, false, b, alpha));
        br.push_back(affine_branch(-inv_b, true, Scalar(1), false, b, Scalar(0)));
        br.push_back(affine_branch(Scalar(1), true, b, true, b, -alpha));
    } else {
        br.push_back(affine_branch(-b, true, Scalar(-1), true, b, alpha));
        br.push_back(affine_branch(Scalar(-1), false, inv_b, true, b, Scalar(0)));
        br.push_back(affine_branch(inv_b, false, b, true, b, -alpha));
    }
    return std::make_shared<PiecewiseMap>(-b, b, std::move(br));
}

}  // namespace

RandomSystem beta_system(const BetaParams& params) {
    return RandomSystem({beta_map(params.alpha, 0), beta_map(params.alpha, 1)},
                        {params.p0, Rational(1) - params.p0});
}

std::vector<MatchingCertificate> beta_certificates(const BetaParams& params) {
    RandomSystem sys = beta_system(params);
    std::vector<MatchingCertificate> out;
    SearchOptions opt;
    opt.require_strong = true;
    opt.m_max = 8;
    opt.max_y = 2;
    for (const auto& c : sys.critical_points()) {
        auto res = find_matching(sys, c, opt);
        if (auto* cert = std::get_if<MatchingCertificate>(&res)) {
            out.push_back(std::move(*cert));
        } else {
            throw structural_error("no strong beta certificate at c = " + c.str());
        }
    }
    return out;
}

DensityResult beta_density(const BetaParams& params) {
    RandomSystem sys = beta_system(params);
    return density_via_matching(sys, beta_certificates(params));
}

}  // namespace rmatch

#include "rmatch/sbfamily.hpp"

#include "rmatch/parallel.hpp"

#include <algorithm>
#include <map>

namespace rmatch {

DoublingParams::DoublingParams(Rational a, Rational pr) : alpha(std::move(a)), p(std::move(pr)) {
    if (alpha < Rational(1) || alpha > Rational(2))
        throw std::invalid_argument("alpha must lie in [1, 2]");
    if (p.sign() <= 0 || p >= Rational(1)) throw std::invalid_argument("p must lie in (0, 1)");
}

namespace {

MapPtr doubling_map(const Rational& alpha, int j) {
    Scalar a(alpha), one(1), half(Rational(1, 2)), two(2);
    Scalar c2 = (one - a) / two;  // (1-alpha)/2
    Scalar c3 = (a - one) / two;  // (alpha-1)/2
    std::vector<Branch> br;
    if (j == 0) {
        br.push_back(affine_branch(-one, true, c2, true, two, a));
        br.push_back(affine_branch(c2, false, half, true, two, Scalar(0)));
        br.push_back(affine_branch(half, false, one, true, two, -a));
    } else {
        br.push_back(affine_branch(-one, true, -half, false, two, a));
        br.push_back(affine_branch(-half, true, c3, false, two, Scalar(0)));
        br.push_back(affine_branch(c3, true, one, true, two, -a));
    }
    return std::make_shared<PiecewiseMap>(-one, one, std::move(br));
}

}  // namespace

RandomSystem make_doubling_system(const DoublingParams& params) {
    return RandomSystem({doubling_map(params.alpha, 0), doubling_map(params.alpha, 1)},
                        {params.p, Rational(1) - params.p});
}

PiecewiseMap s_alpha_map(const Rational& alpha) {
    Scalar a(alpha), one(1), half(Rational(1, 2)), two(2);
    std::vector<Branch> br;
    br.push_back(affine_branch(-one, true, -half, false, two, a));
    br.push_back(affine_branch(-half, true, half, true, two, Scalar(0)));
    br.push_back(affine_branch(half, false, one, true, two, -a));
    return PiecewiseMap(-one, one, std::move(br));
}

RandomSystem make_deterministic_doubling(const Rational& alpha) {
    return RandomSystem({std::make_shared<PiecewiseMap>(s_alpha_map(alpha))}, {Rational(1)});
}

MAlphaResult m_alpha(const Rational& alpha, std::size_t cap) {
    MAlphaResult out;
    Rational half(1, 2);
    Rational win_hi = alpha - half;
    Rational x(1);
    std::map<std::string, std::size_t> seen;
    for (std::size_t n = 0; n <= cap; ++n) {
        out.orbit.push_back(x);
        if (half < x && x < win_hi) {
            out.kind = MAlphaResult::Matching;
            out.m_alpha = n + 1;
            // also record S^{M_alpha}(1) = 2x - alpha, the matching value Y
            out.orbit.push_back(x * Rational(2) - alpha);
            return out;
        }
        auto [it, fresh] = seen.emplace(x.str(), n);
        if (!fresh) {
            out.kind = MAlphaResult::Cycle;
            out.cycle.assign(out.orbit.begin() + static_cast<long>(it->second),
                             out.orbit.end() - 1);
            return out;
        }
        // deterministic S_alpha step with the display's boundary ownership
        if (x < -half)
            x = x * Rational(2) + alpha;
        else if (x <= half)
            x = x * Rational(2);
        else
            x = x * Rational(2) - alpha;
    }
    out.kind = MAlphaResult::Unresolved;
    return out;
}

std::vector<int> s_digit_word(const Rational& alpha, std::size_t n) {
    Rational half(1, 2);
    Rational x(1);
    std::vector<int> out;
    for (std::size_t k = 0; k < n; ++k) {
        if (x < -half) {
            out.push_back(-1);
            x = x * Rational(2) + alpha;
        } else if (x <= half) {
            out.push_back(0);
            x = x * Rational(2);
        } else {
            out.push_back(1);
            x = x * Rational(2) - alpha;
        }
    }
    return out;
}

std::vector<int> digits(const DoublingParams& params, const std::vector<int>& omega_prefix,
                        const Scalar& x, std::size_t n) {
    RandomSystem sys = make_doubling_system(params);
    Scalar cur = x;
    Scalar a(params.alpha);
    std::vector<int> out;
    for (std::size_t k = 0; k < n; ++k) {
        int j = omega_prefix.empty()
                    ? 0
                    : omega_prefix[std::min(k, omega_prefix.size() - 1)];
        Branch br = sys.map(static_cast<std::size_t>(j)).branch_at(cur, Side::At);
        const auto& f = std::get<AffineForm>(br.form);
        // T(x) = 2x - s*alpha, so the digit is -intercept/alpha
        int s = f.d.is_zero() ? 0 : (f.d.sign() > 0 ? -1 : 1);
        out.push_back(s);
        cur = br.eval(cur);
    }
    return out;
}

Rational pi0_exact(const DoublingParams& params, const StepDensity& density) {
    Scalar a(params.alpha), one(1), half(Rational(1, 2)), two(2);
    Scalar c2 = (one - a) / two, c3 = (a - one) / two;
    Scalar i2 = density.integral_over(-half, c2);
    Scalar i3 = density.integral_over(c2, c3);
    Scalar i4 = density.integral_over(c3, half);
    Scalar p0(params.p), p1(Rational(1) - params.p);
    return (p1 * i2 + i3 + p0 * i4).rational();
}

DoublingPipelineResult doubling_pipeline(const DoublingParams& params, std::size_t depth_cap) {
    DoublingPipelineResult out;
    out.classification = m_alpha(params.alpha, depth_cap == 0 ? 1 : (1u << 16));
    RandomSystem sys = make_doubling_system(params);

    bool matched = false;
    if (out.classification.kind == MAlphaResult::Matching &&
        out.classification.m_alpha + 1 <= depth_cap) {
        SearchOptions opt;
        opt.m_max = out.classification.m_alpha + 1;
        opt.require_strong = true;
        std::vector<MatchingCertificate> certs;
        bool ok = true;
        for (const auto& c : sys.critical_points()) {
            auto res = find_matching(sys, c, opt);
            auto* cert = std::get_if<MatchingCertificate>(&res);
            if (!cert || !cert->strong || cert->crossed_critical) {
                ok = false;
                break;
            }
            certs.push_back(std::move(*cert));
        }
        if (ok) {
            out.density = density_via_matching(sys, certs);
            out.certs = std::move(certs);
            matched = true;
        }
    }
    if (!matched) out.density = density_via_markov(sys);
    out.pi0 = pi0_exact(params, out.density.f);
    return out;
}

std::string AffineInAlpha::str() const {
    std::string s = m.str();
    if (n != 0) {
        s += (n > 0 ? "+" : "-");
        Int an = n < 0 ? Int(-n) : n;
        if (an != 1) s += an.str() + "*";
        s += "alpha";
    }
    return s;
}

ScanResult scan_matching_intervals(const Rational& lo, const Rational& hi,
                                   std::size_t depth_cap) {
    ScanResult out;
    struct Cell {
        Rational lo, hi;
        Int m, n;  // orbit point m + n*alpha
        std::size_t depth;
        std::vector<int> word;
    };
    std::vector<Cell> queue{Cell{lo, hi, 1, 0, 0, {}}};
    Rational half(1, 2);
    std::map<std::string, bool> boundary_seen;

    while (!queue.empty()) {
        Cell cell = std::move(queue.back());
        queue.pop_back();
        if (cell.lo >= cell.hi) continue;
        if (cell.depth >= depth_cap) {
            out.gaps.emplace_back(cell.lo, cell.hi);
            continue;
        }
        // Linear comparison roots of x(alpha) = m + n alpha inside the cell:
        //   x = 1/2, x = -1/2, x = alpha - 1/2.
        std::vector<Rational> cuts;
        auto add_root = [&](const Rational& num, const Rational& den) {
            if (den.is_zero()) return;
            Rational r = num / den;
            if (cell.lo < r && r < cell.hi) cuts.push_back(r);
        };
        Rational rm(cell.m), rn(cell.n);
        add_root(half - rm, rn);                 // m + n a = 1/2
        add_root(-half - rm, rn);                // m + n a = -1/2
        add_root(rm + half, Rational(1) - rn);   // m + n a = a - 1/2
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (const auto& c : cuts)
            if (boundary_seen.emplace(c.str(), true).second) out.boundary_points.push_back(c);

        std::vector<Rational> edges{cell.lo};
        edges.insert(edges.end(), cuts.begin(), cuts.end());
        edges.push_back(cell.hi);
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const Rational& l = edges[i];
            const Rational& r = edges[i + 1];
            if (l >= r) continue;
            Rational t = (l + r) / Rational(2);
            Rational x = rm + rn * t;
            if (half < x && x < t - half) {
                MatchingInterval mi;
                mi.left = l;
                mi.right = r;
                mi.m_alpha = cell.depth + 1;
                mi.branch_word = cell.word;
                mi.y_formula = AffineInAlpha{2 * cell.m, 2 * cell.n - 1};
                out.intervals.push_back(std::move(mi));
                continue;
            }
            Cell next;
            next.lo = l;
            next.hi = r;
            next.depth = cell.depth + 1;
            next.word = cell.word;
            if (x > half) {
                next.m = 2 * cell.m;
                next.n = 2 * cell.n - 1;
                next.word.push_back(1);
            } else if (x < -half) {
                next.m = 2 * cell.m;
                next.n = 2 * cell.n + 1;
                next.word.push_back(-1);
            } else {
                next.m = 2 * cell.m;
                next.n = 2 * cell.n;
                next.word.push_back(0);
            }
            queue.push_back(std::move(next));
        }
    }
    auto by_left = [](const auto& a, const auto& b) { return a.left < b.left; };
    std::sort(out.intervals.begin(), out.intervals.end(), by_left);
    std::sort(out.gaps.begin(), out.gaps.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::sort(out.boundary_points.begin(), out.boundary_points.end());
    return out;
}

std::vector<SurfaceRow> pi0_surface(const std::vector<Rational>& alphas,
                                    const std::vector<Rational>& ps, std::size_t depth_cap) {
    std::vector<SurfaceRow> rows(alphas.size() * ps.size());
    parallel_for(rows.size(), [&](std::size_t idx) {
        const Rational& a = alphas[idx / ps.size()];
        const Rational& p = ps[idx % ps.size()];
        SurfaceRow row;
        row.alpha = a;
        row.p = p;
        try {
            auto res = doubling_pipeline(DoublingParams(a, p), depth_cap);
            row.pi0 = res.pi0;
            row.status = res.density.route;
            if (res.certs) row.M = (*res.certs)[0].M;
        } catch (const std::exception& e) {
            row.status = std::string("failed: ") + e.what();
        }
        rows[idx] = std::move(row);
    });
    return rows;
}

}  // namespace rmatch

#pragma once

#include "rmatch/density.hpp"

#include <optional>

namespace rmatch {

/// Parameters of the random symmetric doubling family R_alpha.
struct DoublingParams {
    Rational alpha;  // in [1, 2]
    Rational p;      // p_0 = p, p_1 = 1 - p, in (0, 1)

    DoublingParams(Rational a, Rational pr);
};

/// The two maps T_{alpha,0}, T_{alpha,1} on [-1, 1] with the boundary
/// ownership of the defining display.
RandomSystem make_doubling_system(const DoublingParams& params);

/// The deterministic symmetric doubling map S_alpha as a one-map system.
RandomSystem make_deterministic_doubling(const Rational& alpha);
PiecewiseMap s_alpha_map(const Rational& alpha);

/// Exact deterministic orbit classification of 1 under S_alpha.
struct MAlphaResult {
    enum Kind { Matching, Cycle, Unresolved } kind = Unresolved;
    std::size_t m_alpha = 0;            // valid when Matching
    std::vector<Rational> orbit;        // S^0(1) .. up to entry or cycle closure
    std::vector<Rational> cycle;        // valid when Cycle
};

MAlphaResult m_alpha(const Rational& alpha, std::size_t cap = 1 << 16);

/// Deterministic signed binary digits of 1 under S_alpha (b_1 b_2 ...).
std::vector<int> s_digit_word(const Rational& alpha, std::size_t n);

/// First n random signed binary digits of (omega, x); omega entries beyond
/// the supplied prefix repeat its last symbol (or 0 if empty).
std::vector<int> digits(const DoublingParams& params, const std::vector<int>& omega_prefix,
                        const Scalar& x, std::size_t n);

/// Exact digit-0 frequency from the invariant density.
Rational pi0_exact(const DoublingParams& params, const StepDensity& density);

/// Full doubling pipeline: certificates on all critical points and the exact
/// invariant density, via matching when certified strong, otherwise via the
/// finite orbit closure.
struct DoublingPipelineResult {
    DensityResult density;
    std::optional<std::vector<MatchingCertificate>> certs;  // matching route only
    MAlphaResult classification;
    Rational pi0;
};

DoublingPipelineResult doubling_pipeline(const DoublingParams& params,
                                         std::size_t depth_cap = 24);

/// Point m + n*alpha, closed under the symbolic doubling branch actions.
struct AffineInAlpha {
    Int m, n;
    Rational at(const Rational& alpha) const { return Rational(m) + Rational(n) * alpha; }
    std::string str() const;
};

struct MatchingInterval {
    Rational left, right;  // open cell (left, right)
    std::size_t m_alpha = 0;
    std::vector<int> branch_word;  // deterministic digits of 1 on the cell
    AffineInAlpha y_formula;       // S^{m_alpha}(1) as a function of alpha
};

struct ScanResult {
    std::vector<MatchingInterval> intervals;          // sorted, pairwise disjoint
    std::vector<std::pair<Rational, Rational>> gaps;  // unresolved cells at the cap
    std::vector<Rational> boundary_points;            // subdivision points
};

/// Symbolic subdivision of [lo, hi] into matching cells of the orbit of 1.
ScanResult scan_matching_intervals(const Rational& lo, const Rational& hi,
                                   std::size_t depth_cap = 24);

struct SurfaceRow {
    Rational alpha, p;
    std::optional<Rational> pi0;
    std::string status;  // "matching", "markov" or an error note
    std::size_t M = 0;   // certificate depth when matching
};

std::vector<SurfaceRow> pi0_surface(const std::vector<Rational>& alphas,
                                    const std::vector<Rational>& ps, std::size_t depth_cap = 24);

}  // namespace rmatch

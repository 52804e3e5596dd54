#pragma once

#include "rmatch/pwmap.hpp"

#include <vector>

namespace rmatch {

using Word = std::vector<int>;  // map indices, applied left to right

struct degenerate_orbit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Report of the standing hypotheses: (a1)-(a3) always, (c1)-(c3) for
/// finite piecewise-affine systems.
struct HypothesisReport {
    bool a1 = false;
    bool a2 = false;
    Scalar rho;  // exact expansion-on-average bound, valid when a2
    bool a3 = false;
    bool c_applicable = false;
    bool c1 = false, c2 = false, c3 = false;
    // (c2) witness: a pair of cells whose averaged fixed points differ
    int c2_cell_i = -1, c2_cell_n = -1;

    bool all_a() const { return a1 && a2 && a3; }
};

/// Finite family of interval maps on a common domain with a positive
/// probability vector.
class RandomSystem {
public:
    RandomSystem(std::vector<MapPtr> maps, std::vector<Rational> probs);

    std::size_t n_maps() const { return maps_.size(); }
    const MapBase& map(std::size_t j) const { return *maps_[j]; }
    MapPtr map_ptr(std::size_t j) const { return maps_[j]; }
    const Rational& prob(std::size_t j) const { return probs_[j]; }
    const std::vector<Rational>& probs() const { return probs_; }

    const Scalar& lo() const { return lo_; }
    const Scalar& hi() const { return hi_; }

    /// True when every map has an explicit finite branch list.
    bool finite() const { return finite_; }
    bool affine() const;

    /// Common partition c_0 < ... < c_N (finite systems only).
    const std::vector<Scalar>& partition() const;
    /// Interior partition points (the critical set C).
    const std::vector<Scalar>& critical_points() const;

    bool is_critical(const Scalar& x) const;

    /// Owning cell index 0..N-1 of a sided point, by the side's half-open rule.
    std::size_t cell_of(const SidedPoint& p) const;

    Rational word_weight(const Word& w) const;

    /// T_w applied to x. `side` shapes the first step only; later steps
    /// evaluate at the landed point with its owning branch. Landing exactly
    /// on a critical point mid-word throws degenerate_orbit.
    Scalar apply_word(const Word& w, const Scalar& x, Side side = Side::At) const;

    /// T_w as an exact one-sided limit (side tracked through every step).
    SidedPoint apply_word_sided(const Word& w, const SidedPoint& p) const;

    HypothesisReport check_hypotheses() const;

    /// One-sided images of a critical point: a_j = T_j(c-), b_j = T_j(c+).
    std::vector<Scalar> left_images(const Scalar& c) const;
    std::vector<Scalar> right_images(const Scalar& c) const;

private:
    std::vector<MapPtr> maps_;
    std::vector<Rational> probs_;
    Scalar lo_, hi_;
    bool finite_ = false;
    std::vector<Scalar> partition_;
    std::vector<Scalar> critical_;
};

}  // namespace rmatch

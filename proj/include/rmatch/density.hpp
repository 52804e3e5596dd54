#pragma once

#include "rmatch/matching.hpp"

#include <optional>

namespace rmatch {

struct structural_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Piecewise-constant density: strictly increasing breakpoints spanning the
/// domain, one exact value per open cell. Cells are taken half-open
/// [b_i, b_{i+1}) with the final cell closed; breakpoint values carry no mass.
struct StepDensity {
    std::vector<Scalar> breakpoints;
    std::vector<Scalar> values;

    Scalar total_mass() const;
    Scalar integral_over(const Scalar& a, const Scalar& b) const;
    Scalar value_at(const Scalar& x) const;
    Scalar min_value() const;
    StepDensity mirrored() const;
    /// Equality as L^1 functions (compared on the common refinement).
    bool ae_equal(const StepDensity& other) const;
    /// Coarsen: merge adjacent cells with equal values.
    StepDensity simplified() const;
};

/// Accumulates terms coeff * 1_{[lo, r)} into a step density on [lo, hi].
class StepBuilder {
public:
    StepBuilder(Scalar lo, Scalar hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}
    void add_indicator(const Scalar& right_end, const Scalar& coeff);
    StepDensity build() const;

private:
    Scalar lo_, hi_;
    std::vector<std::pair<Scalar, Scalar>> terms_;
};

struct FundamentalMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<std::vector<Scalar>> a;  // rows of exact entries

    Scalar column_sum(std::size_t col) const;
};

/// K-sum differences D[n][i] = sum_j p_j (K_n(a_{i,j}) - K_n(b_{i,j})),
/// truncated at each certificate's matching depth. Requires strong
/// certificates for every critical point and maps of constant positive
/// slope magnitude per branch family (the weights use |T'_u|).
std::vector<std::vector<Scalar>> k_differences(const RandomSystem& sys,
                                               const std::vector<MatchingCertificate>& certs);

FundamentalMatrix build_A(const RandomSystem& sys, const std::vector<std::vector<Scalar>>& kdiffs);

/// Exact kernel vector by fraction-free elimination; requires a
/// one-dimensional null space.
std::vector<Scalar> null_vector(const FundamentalMatrix& A);

/// Forward closure of all one-sided critical images under every map,
/// tracked as sided points. Throws structural_error past the cap.
struct MarkovClosure {
    std::vector<SidedPoint> points;
    // per point, per map: (target index, signed slope at the point)
    std::vector<std::vector<std::pair<std::size_t, Scalar>>> steps;

    std::size_t index_of(const SidedPoint& p) const;
};

MarkovClosure markov_closure(const RandomSystem& sys, std::size_t cap = 4096);

/// Exact K_n values on the closure via the linear system
///   K_n(y) = w_n 1_{I_n}(y) + sum_j (p_j/|T_j'(y)|) K_n(T_j y).
std::vector<std::vector<Scalar>> solve_markov_K(const RandomSystem& sys,
                                                const MarkovClosure& closure);

struct DensityResult {
    StepDensity f;
    std::vector<Scalar> gamma;  // normalized kernel vector, one per critical point
    std::string route;          // "matching" or "markov"
};

/// Invariant density from strong matching certificates (one per critical point).
DensityResult density_via_matching(const RandomSystem& sys,
                                   const std::vector<MatchingCertificate>& certs);

/// Invariant density via the finite forward-closure linear system.
DensityResult density_via_markov(const RandomSystem& sys, std::size_t cap = 4096);

/// Exact max-norm residual of Pf - f for the random Perron-Frobenius
/// operator (affine branches only); zero iff f is an exact fixed point.
Scalar transfer_residual(const RandomSystem& sys, const StepDensity& f);

}  // namespace rmatch

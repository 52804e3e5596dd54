#pragma once

#include "rmatch/scalar.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rmatch {

struct domain_error_x : std::domain_error {
    using std::domain_error::domain_error;
};

/// Evaluation side: at the point, or as a one-sided limit.
enum class Side { At, Below, Above };  // Below = lim x up to c, Above = lim x down to c

struct AffineForm {
    Scalar k, d;  // x -> k x + d
};

struct MoebiusForm {
    Scalar a, b, c, e;  // x -> (a x + b)/(c x + e)
};

struct Branch {
    Scalar lo, hi;
    bool lo_closed = true, hi_closed = true;
    std::variant<AffineForm, MoebiusForm> form;

    bool is_affine() const { return std::holds_alternative<AffineForm>(form); }
    Scalar eval(const Scalar& x) const;
    Scalar deriv(const Scalar& x) const;
    bool contains(const Scalar& x) const;
};

Branch affine_branch(Scalar lo, bool lc, Scalar hi, bool hc, Scalar k, Scalar d);

/// A point approached from one side; `approach` is -1 (from below) or +1 (from above).
struct SidedPoint {
    Scalar value;
    int approach;

    friend bool operator==(const SidedPoint& x, const SidedPoint& y) {
        return x.approach == y.approach && x.value == y.value;
    }
};

/// Result of one map application to a sided point (exact limit semantics).
struct SidedStep {
    SidedPoint next;
    std::optional<Scalar> deriv;  // absent past the CF fixed point at 0
    bool through_critical = false;  // the source value sat exactly on a branch boundary
};

/// Interval map interface: finitely or countably many monotone C^1 branches.
class MapBase {
public:
    virtual ~MapBase() = default;

    virtual const Scalar& lo() const = 0;
    virtual const Scalar& hi() const = 0;

    /// The branch whose (half-)closure owns x from the given side.
    virtual Branch branch_at(const Scalar& x, Side side) const = 0;

    /// True when x is an interior discontinuity point of the map or its derivative.
    virtual bool is_critical(const Scalar& x) const = 0;

    virtual bool affine_only() const = 0;

    /// Maps with a conventional fixed point whose neighborhood holds
    /// accumulating branches (the CF maps at 0).
    virtual bool has_conventional_fixed_zero() const { return false; }

    Scalar eval(const Scalar& x, Side side = Side::At) const;
    Scalar deriv(const Scalar& x, Side side = Side::At) const;

    /// One exact orbit step of a one-sided limit point.
    SidedStep step(const SidedPoint& p) const;
};

/// Piecewise-monotone map with an explicit finite branch list tiling [lo, hi].
class PiecewiseMap final : public MapBase {
public:
    PiecewiseMap(Scalar lo, Scalar hi, std::vector<Branch> branches);

    const Scalar& lo() const override { return lo_; }
    const Scalar& hi() const override { return hi_; }
    const std::vector<Branch>& branches() const { return branches_; }

    Branch branch_at(const Scalar& x, Side side) const override;
    bool is_critical(const Scalar& x) const override;
    bool affine_only() const override;

    /// Interior branch endpoints (candidate critical points).
    std::vector<Scalar> interior_breakpoints() const;

    /// All exact solutions of T(x) = y, with owning-branch domain membership.
    /// Affine branches only.
    std::vector<std::pair<Scalar, std::size_t>> preimages(const Scalar& y) const;

private:
    Scalar lo_, hi_;
    std::vector<Branch> branches_;
    std::size_t owning_index(const Scalar& x, Side side) const;
};

using MapPtr = std::shared_ptr<const MapBase>;

}  // namespace rmatch

#include "rmatch/pwmap.hpp"

#include <algorithm>

namespace rmatch {

Scalar Branch::eval(const Scalar& x) const {
    if (const auto* a = std::get_if<AffineForm>(&form)) return a->k * x + a->d;
    const auto& m = std::get<MoebiusForm>(form);
    return (m.a * x + m.b) / (m.c * x + m.e);
}

Scalar Branch::deriv(const Scalar& x) const {
    if (const auto* a = std::get_if<AffineForm>(&form)) return a->k;
    const auto& m = std::get<MoebiusForm>(form);
    Scalar den = m.c * x + m.e;
    return (m.a * m.e - m.b * m.c) / (den * den);
}

bool Branch::contains(const Scalar& x) const {
    int cl = cmp(x, lo), ch = cmp(x, hi);
    if (cl < 0 || ch > 0) return false;
    if (cl == 0 && !lo_closed) return false;
    if (ch == 0 && !hi_closed) return false;
    return true;
}

Branch affine_branch(Scalar lo, bool lc, Scalar hi, bool hc, Scalar k, Scalar d) {
    Branch b;
    b.lo = std::move(lo);
    b.hi = std::move(hi);
    b.lo_closed = lc;
    b.hi_closed = hc;
    b.form = AffineForm{std::move(k), std::move(d)};
    return b;
}

Scalar MapBase::eval(const Scalar& x, Side side) const { return branch_at(x, side).eval(x); }

Scalar MapBase::deriv(const Scalar& x, Side side) const { return branch_at(x, side).deriv(x); }

SidedStep MapBase::step(const SidedPoint& p) const {
    SidedStep out;
    if (has_conventional_fixed_zero() && p.value.is_zero()) {
        // T(0) = 0 by convention; no branch, no derivative, side kept.
        out.next = p;
        out.deriv = std::nullopt;
        return out;
    }
    Side side = p.approach < 0 ? Side::Below : Side::Above;
    Branch br = branch_at(p.value, side);
    Scalar dv = br.deriv(p.value);
    out.next.value = br.eval(p.value);
    out.next.approach = dv.sign() > 0 ? p.approach : -p.approach;
    out.deriv = dv;
    out.through_critical = is_critical(p.value);
    return out;
}

PiecewiseMap::PiecewiseMap(Scalar lo, Scalar hi, std::vector<Branch> branches)
    : lo_(std::move(lo)), hi_(std::move(hi)), branches_(std::move(branches)) {
    if (branches_.empty()) throw std::invalid_argument("map needs at least one branch");
    if (cmp(lo_, hi_) >= 0) throw std::invalid_argument("empty ambient interval");
    if (!(branches_.front().lo == lo_) || !(branches_.back().hi == hi_))
        throw std::invalid_argument("branches must span the ambient interval");
    if (!branches_.front().lo_closed || !branches_.back().hi_closed)
        throw std::invalid_argument("ambient endpoints must be owned");
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const Branch& b = branches_[i];
        if (cmp(b.lo, b.hi) >= 0) throw std::invalid_argument("empty branch domain");
        if (i + 1 < branches_.size()) {
            const Branch& n = branches_[i + 1];
            if (!(b.hi == n.lo)) throw std::invalid_argument("branch domains must tile");
            if (b.hi_closed == n.lo_closed)
                throw std::invalid_argument("each breakpoint needs exactly one owner");
        }
        if (!b.is_affine()) {
            const auto& m = std::get<MoebiusForm>(b.form);
            if ((m.a * m.e - m.b * m.c).is_zero())
                throw std::invalid_argument("degenerate Moebius branch");
            if (!m.c.is_zero()) {
                Scalar pole = -(m.e / m.c);
                if (cmp(pole, b.lo) >= 0 && cmp(pole, b.hi) <= 0)
                    throw std::invalid_argument("Moebius pole inside branch domain");
            }
        }
    }
}

std::size_t PiecewiseMap::owning_index(const Scalar& x, Side side) const {
    if (cmp(x, lo_) < 0 || cmp(x, hi_) > 0)
        throw domain_error_x("point outside ambient interval: " + x.str());
    switch (side) {
        case Side::At:
            for (std::size_t i = 0; i < branches_.size(); ++i)
                if (branches_[i].contains(x)) return i;
            throw domain_error_x("no branch owns " + x.str());
        case Side::Below: {
            // branch owning (x - eps, x): lo < x <= hi
            for (std::size_t i = 0; i < branches_.size(); ++i)
                if (cmp(branches_[i].lo, x) < 0 && cmp(x, branches_[i].hi) <= 0) return i;
            throw domain_error_x("no left limit at " + x.str());
        }
        case Side::Above: {
            for (std::size_t i = 0; i < branches_.size(); ++i)
                if (cmp(branches_[i].lo, x) <= 0 && cmp(x, branches_[i].hi) < 0) return i;
            throw domain_error_x("no right limit at " + x.str());
        }
    }
    throw std::logic_error("unreachable");
}

Branch PiecewiseMap::branch_at(const Scalar& x, Side side) const {
    return branches_[owning_index(x, side)];
}

bool PiecewiseMap::is_critical(const Scalar& x) const {
    for (std::size_t i = 0; i + 1 < branches_.size(); ++i)
        if (branches_[i].hi == x) return true;
    return false;
}

bool PiecewiseMap::affine_only() const {
    return std::all_of(branches_.begin(), branches_.end(),
                       [](const Branch& b) { return b.is_affine(); });
}

std::vector<Scalar> PiecewiseMap::interior_breakpoints() const {
    std::vector<Scalar> out;
    for (std::size_t i = 0; i + 1 < branches_.size(); ++i) out.push_back(branches_[i].hi);
    return out;
}

std::vector<std::pair<Scalar, std::size_t>> PiecewiseMap::preimages(const Scalar& y) const {
    std::vector<std::pair<Scalar, std::size_t>> out;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const Branch& b = branches_[i];
        if (!b.is_affine()) throw domain_error_x("preimages need affine branches");
        const auto& f = std::get<AffineForm>(b.form);
        if (f.k.is_zero()) continue;
        Scalar x = (y - f.d) / f.k;
        if (b.contains(x)) out.emplace_back(std::move(x), i);
    }
    return out;
}

}  // namespace rmatch

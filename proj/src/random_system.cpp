#include "rmatch/random_system.hpp"

#include <algorithm>
#include <set>

namespace rmatch {

RandomSystem::RandomSystem(std::vector<MapPtr> maps, std::vector<Rational> probs)
    : maps_(std::move(maps)), probs_(std::move(probs)) {
    if (maps_.empty() || maps_.size() != probs_.size())
        throw std::invalid_argument("need one probability per map");
    Rational total;
    for (const auto& p : probs_) {
        if (p.sign() <= 0) throw std::invalid_argument("probabilities must be positive");
        total += p;
    }
    if (!(total == Rational(1))) throw std::invalid_argument("probabilities must sum to 1");

    lo_ = maps_[0]->lo();
    hi_ = maps_[0]->hi();
    for (const auto& m : maps_)
        if (!(m->lo() == lo_) || !(m->hi() == hi_))
            throw std::invalid_argument("maps must share one domain interval");

    finite_ = std::all_of(maps_.begin(), maps_.end(), [](const MapPtr& m) {
        return dynamic_cast<const PiecewiseMap*>(m.get()) != nullptr;
    });
    if (finite_) {
        // Coarsest common refinement of all branch endpoints.
        std::set<std::string> seen;
        std::vector<Scalar> pts;
        auto push = [&](const Scalar& s) {
            if (seen.insert(s.str()).second) pts.push_back(s);
        };
        push(lo_);
        push(hi_);
        for (const auto& m : maps_)
            for (const auto& c : static_cast<const PiecewiseMap&>(*m).interior_breakpoints())
                push(c);
        std::sort(pts.begin(), pts.end(), [](const Scalar& x, const Scalar& y) { return x < y; });
        partition_ = std::move(pts);
        for (std::size_t i = 1; i + 1 < partition_.size(); ++i) critical_.push_back(partition_[i]);
    }
}

bool RandomSystem::affine() const {
    return std::all_of(maps_.begin(), maps_.end(),
                       [](const MapPtr& m) { return m->affine_only(); });
}

const std::vector<Scalar>& RandomSystem::partition() const {
    if (!finite_) throw std::logic_error("partition unavailable for lazy-branch systems");
    return partition_;
}

const std::vector<Scalar>& RandomSystem::critical_points() const {
    if (!finite_) throw std::logic_error("critical set unavailable for lazy-branch systems");
    return critical_;
}

bool RandomSystem::is_critical(const Scalar& x) const {
    for (const auto& m : maps_)
        if (m->is_critical(x)) return true;
    return false;
}

std::size_t RandomSystem::cell_of(const SidedPoint& p) const {
    const auto& c = partition();
    if (cmp(p.value, lo_) < 0 || cmp(p.value, hi_) > 0)
        throw domain_error_x("point outside domain: " + p.value.str());
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        int rl = cmp(p.value, c[i]), rr = cmp(p.value, c[i + 1]);
        if (rl > 0 && rr < 0) return i;
        if (rl == 0 && (p.approach > 0 || i == 0)) return i;
        if (rr == 0 && (p.approach < 0 || i + 2 == c.size())) return i;
    }
    throw std::logic_error("cell lookup failed");
}

Rational RandomSystem::word_weight(const Word& w) const {
    Rational out(1);
    for (int j : w) out *= probs_.at(static_cast<std::size_t>(j));
    return out;
}

Scalar RandomSystem::apply_word(const Word& w, const Scalar& x, Side side) const {
    Scalar cur = x;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const MapBase& m = map(static_cast<std::size_t>(w[k]));
        Side s = (k == 0) ? side : Side::At;
        if (k > 0 && is_critical(cur))
            throw degenerate_orbit("orbit hit critical point " + cur.str() + " at step " +
                                   std::to_string(k));
        if (m.has_conventional_fixed_zero() && cur.is_zero()) continue;
        cur = m.eval(cur, s);
    }
    return cur;
}

SidedPoint RandomSystem::apply_word_sided(const Word& w, const SidedPoint& p) const {
    SidedPoint cur = p;
    for (int j : w) cur = map(static_cast<std::size_t>(j)).step(cur).next;
    return cur;
}

std::vector<Scalar> RandomSystem::left_images(const Scalar& c) const {
    std::vector<Scalar> out;
    for (const auto& m : maps_) out.push_back(m->eval(c, Side::Below));
    return out;
}

std::vector<Scalar> RandomSystem::right_images(const Scalar& c) const {
    std::vector<Scalar> out;
    for (const auto& m : maps_) out.push_back(m->eval(c, Side::Above));
    return out;
}

HypothesisReport RandomSystem::check_hypotheses() const {
    HypothesisReport rep;
    if (!finite_) {
        // Lazy families provide their own report (see the exemplars module).
        return rep;
    }
    rep.a1 = true;
    rep.a3 = true;  // both branch forms have bounded-variation p/|T'| on each cell

    // a2: rho = max over cells of sum_j p_j / inf_cell |T_j'|.
    bool first = true;
    for (std::size_t i = 0; i + 1 < partition_.size(); ++i) {
        Scalar mid = (partition_[i] + partition_[i + 1]) / Scalar(2);
        Scalar cell_sum(0);
        for (std::size_t j = 0; j < maps_.size(); ++j) {
            Branch br = maps_[j]->branch_at(mid, Side::At);
            Scalar inf_abs;
            if (br.is_affine()) {
                inf_abs = br.deriv(mid).abs();
            } else {
                // |T'| is monotone on a Moebius branch: the infimum over the
                // cell is at one of its endpoints.
                Scalar dl = br.deriv(partition_[i]).abs();
                Scalar dr = br.deriv(partition_[i + 1]).abs();
                inf_abs = cmp(dl, dr) < 0 ? dl : dr;
            }
            cell_sum += Scalar(probs_[j]) / inf_abs;
        }
        if (first || cmp(cell_sum, rep.rho) > 0) rep.rho = cell_sum;
        first = false;
    }
    rep.a2 = cmp(rep.rho, Scalar(1)) < 0;

    if (!affine()) return rep;
    rep.c_applicable = true;
    rep.c1 = true;

    std::size_t ncells = partition_.size() - 1;
    std::vector<Scalar> fixed(ncells);
    bool c3 = true;
    for (std::size_t i = 0; i < ncells; ++i) {
        Scalar mid = (partition_[i] + partition_[i + 1]) / Scalar(2);
        Scalar s(0), sd(0);
        for (std::size_t j = 0; j < maps_.size(); ++j) {
            const auto& f = std::get<AffineForm>(maps_[j]->branch_at(mid, Side::At).form);
            s += Scalar(probs_[j]) / f.k;
            sd += (Scalar(probs_[j]) / f.k) * f.d;
        }
        if (s.is_zero()) c3 = false;
        fixed[i] = sd / (Scalar(1) - s);
    }
    rep.c3 = c3;
    rep.c2 = false;
    for (std::size_t i = 0; i < ncells && !rep.c2; ++i)
        for (std::size_t n = 0; n < ncells; ++n)
            if (!(fixed[i] == fixed[n])) {
                rep.c2 = true;
                rep.c2_cell_i = static_cast<int>(i);
                rep.c2_cell_n = static_cast<int>(n);
                break;
            }
    return rep;
}

}  // namespace rmatch

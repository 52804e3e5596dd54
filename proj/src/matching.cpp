#include "rmatch/matching.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>

namespace rmatch {

void ClassAgg::add(const ClassAgg& o) {
    prob += o.prob;
    if (ok && o.ok) {
        sig += o.sig;
        mu += o.mu;
        tau += o.tau;
    } else {
        ok = ok && o.ok;
    }
}

OrbitTree::OrbitTree(const RandomSystem& sys, SidedPoint root) : sys_(&sys), root_(std::move(root)) {}

void OrbitTree::expand_to(std::size_t depth) {
    while (levels_.size() < depth) {
        TreeLevel next;
        std::map<std::string, std::size_t> index;  // key -> class id in `next`
        auto key_of = [](const SidedPoint& p, bool ok) {
            return p.value.str() + (p.approach < 0 ? "-" : "+") + (ok ? "" : "!");
        };
        std::size_t nparents = levels_.empty() ? 1 : levels_.back().classes.size();
        bool first_level = levels_.empty();
        for (std::size_t pi = 0; pi < nparents; ++pi) {
            const SidedPoint& from = first_level ? root_ : levels_.back().classes[pi].pt;
            bool parent_ok = first_level ? true : levels_.back().classes[pi].deriv_ok;
            for (std::size_t j = 0; j < sys_->n_maps(); ++j) {
                SidedStep st = sys_->map(j).step(from);
                // the root is a critical point by construction; only interior
                // hits later along the orbit are flagged
                if (!first_level) crossed_critical_ = crossed_critical_ || st.through_critical;
                bool ok = parent_ok && st.deriv.has_value();
                if (!ok) zero_absorbed_ = true;
                std::string key = key_of(st.next, ok);
                auto it = index.find(key);
                std::size_t ci;
                if (it == index.end()) {
                    ci = next.classes.size();
                    index.emplace(key, ci);
                    next.classes.push_back(TreeClassNode{st.next, ok});
                } else {
                    ci = it->second;
                }
                TreeLink link;
                link.parent = pi;
                link.child = ci;
                link.digit = static_cast<int>(j);
                link.pj = sys_->prob(j);
                link.ok = st.deriv.has_value();
                if (link.ok) {
                    Scalar pj(link.pj);
                    link.sig_f = pj / *st.deriv;
                    link.abs_f = pj / st.deriv->abs();
                    link.tau_f = first_level ? pj : link.abs_f;
                }
                next.in_links.push_back(std::move(link));
            }
        }
        levels_.push_back(std::move(next));
    }
}

std::map<std::string, std::pair<Scalar, std::size_t>> OrbitTree::value_occurrences(
    std::size_t max_depth) const {
    std::map<std::string, std::pair<Scalar, std::size_t>> out;
    for (std::size_t k = 0; k < max_depth && k < levels_.size(); ++k) {
        for (const auto& cl : levels_[k].classes) {
            auto key = cl.pt.value.str();
            auto it = out.find(key);
            if (it == out.end()) out.emplace(key, std::make_pair(cl.pt.value, k + 1));
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> OrbitTree::occurrences_of(
    const Scalar& v, std::size_t max_depth) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t k = 0; k < max_depth && k < levels_.size(); ++k)
        for (std::size_t c = 0; c < levels_[k].classes.size(); ++c)
            if (levels_[k].classes[c].pt.value == v) out.emplace_back(k + 1, c);
    return out;
}

StopRule StopRule::first_entry(const std::vector<Scalar>& ys, std::size_t M) {
    StopRule r;
    for (const auto& y : ys)
        for (std::size_t d = 1; d <= M; ++d) r.decisions.push_back(StopDecision{y, d, ~0u});
    return r;
}

TreeRun run_tree(const OrbitTree& tree, std::size_t M, const StopRule& rule) {
    TreeRun out;
    if (tree.depth() < M) throw std::logic_error("tree not expanded far enough");

    ClassAgg root_agg;
    root_agg.prob = Rational(1);
    root_agg.sig = Scalar(1);
    root_agg.mu = Scalar(1);
    root_agg.tau = Scalar(1);

    std::vector<ClassAgg> active;  // per class of previous level
    active.push_back(root_agg);

    for (std::size_t depth = 1; depth <= M; ++depth) {
        const TreeLevel& lvl = tree.level(depth - 1);
        std::size_t nc = lvl.classes.size(), nd = 0;
        for (const auto& l : lvl.in_links) nd = std::max<std::size_t>(nd, l.digit + 1);
        // pieces[class][digit]
        std::vector<std::vector<ClassAgg>> pieces(nc, std::vector<ClassAgg>(nd));
        for (const auto& l : lvl.in_links) {
            const ClassAgg& pa = active[l.parent];
            if (pa.zero()) continue;
            ClassAgg flow;
            flow.prob = pa.prob * l.pj;
            flow.ok = pa.ok && l.ok;
            if (flow.ok) {
                flow.sig = pa.sig * l.sig_f;
                flow.mu = pa.mu * l.abs_f;
                flow.tau = pa.tau * l.tau_f;
            }
            pieces[l.child][static_cast<std::size_t>(l.digit)].add(flow);
        }
        std::vector<ClassAgg> next_active(nc);
        for (std::size_t c = 0; c < nc; ++c) {
            std::uint32_t mask = 0;
            const Scalar& v = lvl.classes[c].pt.value;
            for (const auto& dec : rule.decisions)
                if (dec.depth == depth && dec.y == v) mask |= dec.digit_mask;
            for (std::size_t dg = 0; dg < nd; ++dg) {
                ClassAgg& pc = pieces[c][dg];
                if (pc.zero()) continue;
                if (mask & (1u << dg)) {
                    if (!pc.ok) out.valid = false;
                    auto key = v.str();
                    auto it = out.stopped.find(key);
                    if (it == out.stopped.end())
                        out.stopped.emplace(key, std::make_pair(v, pc));
                    else
                        it->second.second.add(pc);
                } else {
                    next_active[c].add(pc);
                }
            }
        }
        if (depth < M) {
            for (std::size_t c = 0; c < nc; ++c)
                if (!next_active[c].zero())
                    out.prestop.push_back(PreStopClass{lvl.classes[c].pt, depth, next_active[c]});
        } else {
            Rational rem;
            for (const auto& a : next_active) rem += a.prob;
            out.uncovered_mass = rem;
            out.covered = rem.is_zero();
        }
        active = std::move(next_active);
    }
    return out;
}

namespace {

std::vector<BalanceEntry> balance_of(const std::vector<Scalar>& ys, const TreeRun& rm,
                                     const TreeRun& rp) {
    std::vector<BalanceEntry> out;
    for (const auto& y : ys) {
        BalanceEntry e;
        e.y = y;
        e.sum_minus = Scalar(0);
        e.sum_plus = Scalar(0);
        bool ok = true;
        auto im = rm.stopped.find(y.str());
        if (im != rm.stopped.end()) {
            ok = ok && im->second.second.ok;
            if (im->second.second.ok) e.sum_minus = im->second.second.sig;
            e.mass_minus = im->second.second.prob;
        }
        auto ip = rp.stopped.find(y.str());
        if (ip != rp.stopped.end()) {
            ok = ok && ip->second.second.ok;
            if (ip->second.second.ok) e.sum_plus = ip->second.second.sig;
            e.mass_plus = ip->second.second.prob;
        }
        e.equal = ok && e.sum_minus == e.sum_plus;
        out.push_back(std::move(e));
    }
    return out;
}

bool all_equal(const std::vector<BalanceEntry>& b) {
    return std::all_of(b.begin(), b.end(), [](const BalanceEntry& e) { return e.equal; });
}

/// Stop-rule variant generator: one mask slot per occurrence of each y in
/// each tree; slot values are all-digits, none, or single-digit subsets.
struct VariantGen {
    struct Slot {
        int side;  // 0 = minus, 1 = plus
        Scalar y;
        std::size_t depth;
    };
    std::vector<Slot> slots;
    std::vector<std::uint32_t> mask_options;
    std::size_t max_variants;

    VariantGen(const OrbitTree& tm, const OrbitTree& tp, const std::vector<Scalar>& ys,
               std::size_t M, std::size_t n_digits, bool digit_splits, std::size_t cap)
        : max_variants(cap) {
        for (int side = 0; side < 2; ++side) {
            const OrbitTree& t = side == 0 ? tm : tp;
            for (const auto& y : ys)
                for (const auto& occ : t.occurrences_of(y, M))
                    slots.push_back(Slot{side, y, occ.first});
        }
        mask_options.push_back(~0u);
        mask_options.push_back(0u);
        if (digit_splits && n_digits <= 4)
            for (std::size_t d = 0; d < n_digits; ++d) mask_options.push_back(1u << d);
    }

    /// Invokes fn(rule_minus, rule_plus) for each variant, first-entry first.
    /// fn returns true to stop the enumeration.
    bool for_each(const std::function<bool(const StopRule&, const StopRule&)>& fn) const {
        std::size_t n = slots.size();
        std::vector<std::size_t> choice(n, 0);
        std::size_t count = 0;
        for (;;) {
            StopRule rm, rp;
            for (std::size_t i = 0; i < n; ++i) {
                std::uint32_t mask = mask_options[choice[i]];
                if (mask == 0) continue;
                StopDecision d{slots[i].y, slots[i].depth, mask};
                (slots[i].side == 0 ? rm : rp).decisions.push_back(std::move(d));
            }
            if (fn(rm, rp)) return true;
            if (++count >= max_variants) return false;
            // mixed-radix increment
            std::size_t i = 0;
            while (i < n && ++choice[i] == mask_options.size()) choice[i++] = 0;
            if (i == n) return false;
        }
    }
};

void enumerate_words(const RandomSystem& sys, const SidedPoint& root, std::size_t M,
                     const StopRule& rule, std::map<std::string, std::vector<Word>>& out) {
    std::function<void(const SidedPoint&, Word&)> rec = [&](const SidedPoint& p, Word& w) {
        if (w.size() >= M) return;
        for (std::size_t j = 0; j < sys.n_maps(); ++j) {
            SidedStep st = sys.map(j).step(p);
            w.push_back(static_cast<int>(j));
            bool stopped = false;
            for (const auto& dec : rule.decisions) {
                if (dec.depth == w.size() && dec.y == st.next.value &&
                    (dec.digit_mask & (1u << j))) {
                    out[st.next.value.str()].push_back(w);
                    stopped = true;
                    break;
                }
            }
            if (!stopped) rec(st.next, w);
            w.pop_back();
        }
    };
    Word w;
    rec(root, w);
}

MatchingCertificate build_certificate(const RandomSystem& sys, const Scalar& c, std::size_t M,
                                      const std::vector<Scalar>& ys, const StopRule& rm,
                                      const StopRule& rp, const OrbitTree& tm, const OrbitTree& tp,
                                      const TreeRun& runm, const TreeRun& runp, bool words) {
    MatchingCertificate cert;
    cert.c = c;
    cert.M = M;
    cert.y_set = ys;
    cert.rule_minus = rm;
    cert.rule_plus = rp;
    cert.run_minus = runm;
    cert.run_plus = runp;
    cert.balance = balance_of(ys, runm, runp);
    cert.strong = runm.valid && runp.valid && all_equal(cert.balance);
    cert.crossed_critical = tm.crossed_critical() || tp.crossed_critical();
    if (words && M <= 12 && sys.n_maps() <= 2) {
        enumerate_words(sys, {c, -1}, M, rm, cert.stop_words_minus);
        enumerate_words(sys, {c, +1}, M, rp, cert.stop_words_plus);
    }
    return cert;
}

}  // namespace

MatchOutcome find_matching(const RandomSystem& sys, const Scalar& c, const SearchOptions& opt) {
    OrbitTree tm(sys, {c, -1}), tp(sys, {c, +1});

    for (std::size_t M = 1; M <= opt.m_max; ++M) {
        tm.expand_to(M);
        tp.expand_to(M);

        auto occ_m = tm.value_occurrences(M);
        auto occ_p = tp.value_occurrences(M);
        // Common value classes, deepest first intersection preferred.
        std::vector<std::pair<std::size_t, Scalar>> commons;
        for (const auto& [key, vp] : occ_m) {
            auto it = occ_p.find(key);
            if (it != occ_p.end())
                commons.emplace_back(std::max(vp.second, it->second.second), vp.first);
        }
        std::sort(commons.begin(), commons.end(),
                  [](const auto& x, const auto& y) {
                      if (x.first != y.first) return x.first > y.first;
                      return x.second.str() < y.second.str();
                  });
        if (commons.empty()) continue;

        std::size_t n = commons.size();
        std::size_t tried = 0;
        std::optional<MatchingCertificate> found;

        auto evaluate = [&](const std::vector<std::size_t>& idx) -> bool {
            if (++tried > opt.max_candidates_per_m) return false;
            std::vector<Scalar> ys;
            for (auto i : idx) ys.push_back(commons[i].second);
            StopRule fe = StopRule::first_entry(ys, M);
            TreeRun runm = run_tree(tm, M, fe);
            TreeRun runp = run_tree(tp, M, fe);
            if (!(runm.covered && runp.covered)) return false;
            if (!opt.require_strong) {
                if (!(runm.valid && runp.valid)) return false;
                found = build_certificate(sys, c, M, ys, fe, fe, tm, tp, runm, runp,
                                          opt.enumerate_words_limit);
                return true;
            }
            VariantGen gen(tm, tp, ys, M, sys.n_maps(), opt.try_variants, opt.max_variants);
            return gen.for_each([&](const StopRule& rm, const StopRule& rp) {
                TreeRun a = run_tree(tm, M, rm);
                TreeRun b = run_tree(tp, M, rp);
                if (!(a.covered && b.covered && a.valid && b.valid)) return false;
                auto bal = balance_of(ys, a, b);
                if (!all_equal(bal)) return false;
                found = build_certificate(sys, c, M, ys, rm, rp, tm, tp, a, b,
                                          opt.enumerate_words_limit);
                return true;
            });
        };

        // Subsets of sizes 1..max_y, lexicographic over the depth-sorted list.
        std::vector<std::size_t> idx;
        std::function<bool(std::size_t, std::size_t)> combos = [&](std::size_t start,
                                                                   std::size_t k) -> bool {
            if (k == 0) return evaluate(idx);
            for (std::size_t i = start; i + (k - 1) < n; ++i) {
                idx.push_back(i);
                if (combos(i + 1, k - 1)) return true;
                idx.pop_back();
            }
            return false;
        };
        for (std::size_t size = 1; size <= opt.max_y && !found; ++size) {
            idx.clear();
            if (combos(0, size)) break;
        }
        if (found) return *found;
    }

    NoMatchingWithinDepth nm;
    nm.depth = opt.m_max;
    for (const auto& cl : tm.level(opt.m_max - 1).classes)
        nm.frontier_minus.push_back(cl.pt.value.str());
    for (const auto& cl : tp.level(opt.m_max - 1).classes)
        nm.frontier_plus.push_back(cl.pt.value.str());
    nm.degenerate = tm.has_zero_absorbed() || tp.has_zero_absorbed();
    nm.note = nm.degenerate ? "orbit reached the conventional fixed point; certification aborted"
                            : "no certificate within the depth cap";
    return nm;
}

MatchingCertificate verify_strong(const RandomSystem& sys, const MatchingCertificate& cert) {
    OrbitTree tm(sys, {cert.c, -1}), tp(sys, {cert.c, +1});
    tm.expand_to(cert.M);
    tp.expand_to(cert.M);
    TreeRun a = run_tree(tm, cert.M, cert.rule_minus);
    TreeRun b = run_tree(tp, cert.M, cert.rule_plus);
    return build_certificate(sys, cert.c, cert.M, cert.y_set, cert.rule_minus, cert.rule_plus, tm,
                             tp, a, b, true);
}

MatchingCertificate alternative_stopping(const RandomSystem& sys, const MatchingCertificate& cert,
                                         const std::vector<Scalar>& y_set) {
    OrbitTree tm(sys, {cert.c, -1}), tp(sys, {cert.c, +1});
    std::size_t M = cert.M;
    tm.expand_to(M);
    tp.expand_to(M);
    for (const auto& y : y_set)
        if (tm.occurrences_of(y, M).empty() || tp.occurrences_of(y, M).empty())
            throw std::invalid_argument("value " + y.str() +
                                        " is not a common orbit value within depth " +
                                        std::to_string(M));

    MatchingCertificate best;
    int best_rank = 99;  // 0: strong with every y used on both sides, 1: strong, 2: covered
    VariantGen gen(tm, tp, y_set, M, sys.n_maps(), true, 65536);
    gen.for_each([&](const StopRule& rm, const StopRule& rp) {
        TreeRun a = run_tree(tm, M, rm);
        TreeRun b = run_tree(tp, M, rp);
        if (!(a.covered && b.covered && a.valid && b.valid)) return false;
        auto cert2 = build_certificate(sys, cert.c, M, y_set, rm, rp, tm, tp, a, b, true);
        int rank = 2;
        if (cert2.strong) {
            rank = 0;
            for (const auto& e : cert2.balance)
                if (e.mass_minus.is_zero() || e.mass_plus.is_zero()) rank = 1;
        }
        if (rank < best_rank) {
            best = cert2;
            best_rank = rank;
        }
        return best_rank == 0;
    });
    if (best_rank > 2)
        throw std::invalid_argument("the supplied Y set cannot cover all rays within depth " +
                                    std::to_string(M));
    return best;
}

std::string MatchingCertificate::to_json(int indent) const {
    nlohmann::json j;
    j["c"] = c.str();
    j["M"] = M;
    nlohmann::json ys = nlohmann::json::array();
    for (const auto& y : y_set) ys.push_back(y.str());
    j["Y"] = ys;
    j["strong"] = strong;
    j["crossed_critical"] = crossed_critical;
    nlohmann::json bal = nlohmann::json::array();
    for (const auto& e : balance) {
        nlohmann::json b;
        b["y"] = e.y.str();
        b["sum_minus"] = e.sum_minus.str();
        b["sum_plus"] = e.sum_plus.str();
        b["cylinder_mass_minus"] = e.mass_minus.str();
        b["cylinder_mass_plus"] = e.mass_plus.str();
        b["equal"] = e.equal;
        bal.push_back(std::move(b));
    }
    j["balance"] = bal;
    auto words_json = [](const std::map<std::string, std::vector<Word>>& m) {
        nlohmann::json out;
        for (const auto& [y, words] : m) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& w : words) {
                std::string s;
                for (int d : w) s += std::to_string(d);
                arr.push_back(s);
            }
            out[y] = std::move(arr);
        }
        return out;
    };
    if (!stop_words_minus.empty()) j["stop_words_minus"] = words_json(stop_words_minus);
    if (!stop_words_plus.empty()) j["stop_words_plus"] = words_json(stop_words_plus);
    return j.dump(indent);
}

}  // namespace rmatch

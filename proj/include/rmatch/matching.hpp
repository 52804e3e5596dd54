#pragma once

#include "rmatch/random_system.hpp"

#include <map>
#include <optional>
#include <variant>

namespace rmatch {

/// Exact aggregates of a set of same-valued orbit-tree nodes:
///   prob = sum p_u,   sig = sum p_u / T'_u,   mu = sum p_u / |T'_u|,
///   tau = sum p_u |k_1| / |T'_u|   (k_1 = first-step slope).
/// sig/mu/tau are meaningless when ok == false (orbit ran past the
/// conventional fixed point of a CF map, where T' is undefined).
struct ClassAgg {
    Rational prob;
    Scalar sig, mu, tau;
    bool ok = true;

    void add(const ClassAgg& o);
    bool zero() const { return prob.is_zero(); }
};

struct TreeClassNode {
    SidedPoint pt;
    bool deriv_ok = true;
};

/// Mass-flow edge between consecutive levels, with cached exact factors.
struct TreeLink {
    std::size_t parent = 0, child = 0;
    int digit = 0;
    Rational pj;
    bool ok = true;       // false when the step derivative is undefined
    Scalar sig_f, abs_f;  // p_j/k and p_j/|k| of the applied branch
    Scalar tau_f;         // p_j/|k|, except p_j on first-level links
};

struct TreeLevel {
    std::vector<TreeClassNode> classes;
    std::vector<TreeLink> in_links;  // links from the previous level
};

/// Random orbit tree of a one-sided critical limit, collapsed into exact
/// value classes per depth (nodes with equal value and approach share all
/// future behaviour, so the collapse is lossless).
class OrbitTree {
public:
    OrbitTree(const RandomSystem& sys, SidedPoint root);

    const SidedPoint& root() const { return root_; }
    std::size_t depth() const { return levels_.size(); }
    const TreeLevel& level(std::size_t k) const { return levels_.at(k); }  // k = depth-1
    bool crossed_critical() const { return crossed_critical_; }
    bool has_zero_absorbed() const { return zero_absorbed_; }

    void expand_to(std::size_t depth);

    /// Values present at depths 1..max_depth, with their first depth.
    std::map<std::string, std::pair<Scalar, std::size_t>> value_occurrences(
        std::size_t max_depth) const;

    /// depth/class pairs where a given value occurs (depths 1..max_depth).
    std::vector<std::pair<std::size_t, std::size_t>> occurrences_of(const Scalar& v,
                                                                    std::size_t max_depth) const;

private:
    const RandomSystem* sys_;
    SidedPoint root_;
    std::vector<TreeLevel> levels_;
    bool crossed_critical_ = false;
    bool zero_absorbed_ = false;
};

/// One stopping decision: rays arriving at value y at this depth via a
/// digit in the mask stop there.
struct StopDecision {
    Scalar y;
    std::size_t depth = 1;
    std::uint32_t digit_mask = ~0u;
};

struct StopRule {
    std::vector<StopDecision> decisions;
    static StopRule first_entry(const std::vector<Scalar>& ys, std::size_t M);
};

/// Aggregates of one tree run under a stop rule.
struct PreStopClass {
    SidedPoint pt;
    std::size_t depth = 1;
    ClassAgg agg;
};

struct TreeRun {
    bool covered = false;
    bool valid = true;  // no stop with undefined derivative
    std::map<std::string, std::pair<Scalar, ClassAgg>> stopped;  // key = value text
    std::vector<PreStopClass> prestop;                           // active classes, depths 1..M-1
    Rational uncovered_mass;
};

TreeRun run_tree(const OrbitTree& tree, std::size_t M, const StopRule& rule);

struct BalanceEntry {
    Scalar y;
    Scalar sum_minus, sum_plus;  // sum p_u / T'_u(c-) vs (c+)
    Rational mass_minus, mass_plus;
    bool equal = false;
};

struct MatchingCertificate {
    Scalar c;
    std::size_t M = 0;
    std::vector<Scalar> y_set;
    StopRule rule_minus, rule_plus;
    std::vector<BalanceEntry> balance;
    bool strong = false;
    bool crossed_critical = false;
    TreeRun run_minus, run_plus;

    /// Explicit stop words per y (only when the word tree is small).
    std::map<std::string, std::vector<Word>> stop_words_minus, stop_words_plus;

    std::string to_json(int indent = 2) const;
};

struct NoMatchingWithinDepth {
    std::size_t depth = 0;
    std::vector<std::string> frontier_minus, frontier_plus;
    bool degenerate = false;
    std::string note;
};

using MatchOutcome = std::variant<MatchingCertificate, NoMatchingWithinDepth>;

struct SearchOptions {
    std::size_t m_max = 24;
    std::size_t max_y = 3;
    bool require_strong = true;   // minimal M admitting Definition 2.2
    bool try_variants = true;     // delayed / digit-split stopping variants
    std::size_t max_variants = 4096;
    std::size_t max_candidates_per_m = 50000;
    bool enumerate_words_limit = true;  // fill stop_words_* when 2^M small
};

/// Minimal-M certificate search for one critical point. With
/// require_strong the returned M is minimal for strong random matching;
/// otherwise minimal for random matching (coverage), with balance sums
/// reported as found.
MatchOutcome find_matching(const RandomSystem& sys, const Scalar& c, const SearchOptions& opt = {});

/// Re-checks the balance sums of a certificate's stop rules; returns a copy
/// with the strong flag and balance entries recomputed.
MatchingCertificate verify_strong(const RandomSystem& sys, const MatchingCertificate& cert);

/// Recomputes stop rules and balance for a user-supplied Y set at the
/// certificate's depth, searching stopping variants for a strong witness.
/// Throws std::invalid_argument when Y' cannot cover all rays.
MatchingCertificate alternative_stopping(const RandomSystem& sys, const MatchingCertificate& cert,
                                         const std::vector<Scalar>& y_set);

}  // namespace rmatch

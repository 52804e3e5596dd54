#include "rmatch/density.hpp"

#include <algorithm>
#include <set>

namespace rmatch {

namespace {

std::vector<Scalar> sorted_unique(std::vector<Scalar> v) {
    std::sort(v.begin(), v.end(), [](const Scalar& x, const Scalar& y) { return x < y; });
    v.erase(std::unique(v.begin(), v.end(), [](const Scalar& x, const Scalar& y) { return x == y; }),
            v.end());
    return v;
}

}  // namespace

Scalar StepDensity::total_mass() const {
    Scalar t(0);
    for (std::size_t i = 0; i < values.size(); ++i)
        t += values[i] * (breakpoints[i + 1] - breakpoints[i]);
    return t;
}

Scalar StepDensity::integral_over(const Scalar& a, const Scalar& b) const {
    if (cmp(a, b) >= 0) return Scalar(0);
    Scalar t(0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Scalar& lo = breakpoints[i];
        const Scalar& hi = breakpoints[i + 1];
        const Scalar& l = cmp(a, lo) > 0 ? a : lo;
        const Scalar& r = cmp(b, hi) < 0 ? b : hi;
        if (cmp(l, r) < 0) t += values[i] * (r - l);
    }
    return t;
}

Scalar StepDensity::value_at(const Scalar& x) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        bool last = (i + 1 == values.size());
        if (cmp(x, breakpoints[i]) >= 0 &&
            (last ? cmp(x, breakpoints[i + 1]) <= 0 : cmp(x, breakpoints[i + 1]) < 0))
            return values[i];
    }
    throw domain_error_x("point outside density support: " + x.str());
}

Scalar StepDensity::min_value() const {
    Scalar m = values.at(0);
    for (const auto& v : values)
        if (cmp(v, m) < 0) m = v;
    return m;
}

StepDensity StepDensity::mirrored() const {
    StepDensity out;
    for (auto it = breakpoints.rbegin(); it != breakpoints.rend(); ++it) out.breakpoints.push_back(-*it);
    for (auto it = values.rbegin(); it != values.rend(); ++it) out.values.push_back(*it);
    return out;
}

bool StepDensity::ae_equal(const StepDensity& other) const {
    if (!(breakpoints.front() == other.breakpoints.front()) ||
        !(breakpoints.back() == other.breakpoints.back()))
        return false;
    std::vector<Scalar> pts = breakpoints;
    pts.insert(pts.end(), other.breakpoints.begin(), other.breakpoints.end());
    pts = sorted_unique(std::move(pts));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Scalar mid = (pts[i] + pts[i + 1]) / Scalar(2);
        if (!(value_at(mid) == other.value_at(mid))) return false;
    }
    return true;
}

StepDensity StepDensity::simplified() const {
    StepDensity out;
    out.breakpoints.push_back(breakpoints.front());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!out.values.empty() && out.values.back() == values[i]) {
            out.breakpoints.back() = breakpoints[i + 1];
        } else {
            out.values.push_back(values[i]);
            out.breakpoints.push_back(breakpoints[i + 1]);
        }
    }
    return out;
}

void StepBuilder::add_indicator(const Scalar& right_end, const Scalar& coeff) {
    if (coeff.is_zero()) return;
    terms_.emplace_back(right_end, coeff);
}

StepDensity StepBuilder::build() const {
    std::vector<Scalar> pts{lo_, hi_};
    for (const auto& [r, c] : terms_) {
        if (cmp(r, lo_) > 0 && cmp(r, hi_) < 0) pts.push_back(r);
    }
    pts = sorted_unique(std::move(pts));
    StepDensity f;
    f.breakpoints = pts;
    f.values.assign(pts.size() - 1, Scalar(0));
    for (const auto& [r, c] : terms_) {
        if (cmp(r, lo_) <= 0) continue;  // empty indicator
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (cmp(pts[i + 1], r) <= 0)
                f.values[i] += c;  // cell entirely left of r
        }
    }
    return f;
}

Scalar FundamentalMatrix::column_sum(std::size_t col) const {
    Scalar s(0);
    for (std::size_t r = 0; r < rows; ++r) s += a[r][col];
    return s;
}

namespace {

/// w_n = sum_j p_j / |k_{n,j}| for every cell of the common partition.
std::vector<Scalar> cell_weights(const RandomSystem& sys) {
    const auto& part = sys.partition();
    std::vector<Scalar> w;
    for (std::size_t i = 0; i + 1 < part.size(); ++i) {
        Scalar mid = (part[i] + part[i + 1]) / Scalar(2);
        Scalar s(0);
        for (std::size_t j = 0; j < sys.n_maps(); ++j)
            s += Scalar(sys.prob(j)) / sys.map(j).deriv(mid).abs();
        w.push_back(std::move(s));
    }
    return w;
}

}  // namespace

std::vector<std::vector<Scalar>> k_differences(const RandomSystem& sys,
                                               const std::vector<MatchingCertificate>& certs) {
    const auto& crit = sys.critical_points();
    if (certs.size() != crit.size())
        throw std::invalid_argument("need one certificate per critical point");
    std::vector<Scalar> w = cell_weights(sys);
    std::size_t ncells = w.size();
    std::vector<std::vector<Scalar>> D(ncells, std::vector<Scalar>(crit.size(), Scalar(0)));
    for (std::size_t i = 0; i < crit.size(); ++i) {
        if (!(certs[i].c == crit[i]))
            throw std::invalid_argument("certificate order must follow the critical set");
        for (int side = 0; side < 2; ++side) {
            const TreeRun& run = side == 0 ? certs[i].run_minus : certs[i].run_plus;
            Scalar sgn = side == 0 ? Scalar(1) : Scalar(-1);
            for (const auto& cl : run.prestop) {
                if (!cl.agg.ok)
                    throw structural_error("K-sum undefined: orbit ran past a conventional point");
                std::size_t n = sys.cell_of(cl.pt);
                D[n][i] += sgn * w[n] * cl.agg.tau;
            }
        }
    }
    return D;
}

FundamentalMatrix build_A(const RandomSystem& sys, const std::vector<std::vector<Scalar>>& kdiffs) {
    std::size_t ncells = sys.partition().size() - 1;
    std::size_t ncrit = sys.critical_points().size();
    FundamentalMatrix A;
    A.rows = ncells;
    A.cols = ncrit;
    A.a.assign(ncells, std::vector<Scalar>(ncrit, Scalar(0)));
    for (std::size_t r = 0; r < ncells; ++r)
        for (std::size_t ci = 0; ci < ncrit; ++ci) {
            A.a[r][ci] = kdiffs[r][ci];
            if (r == ci) A.a[r][ci] += Scalar(1);
            if (r == ci + 1) A.a[r][ci] -= Scalar(1);
        }
    return A;
}

std::vector<Scalar> null_vector(const FundamentalMatrix& A) {
    std::size_t m = A.rows, n = A.cols;
    // Row-wise clearing of rational denominators keeps the null space; the
    // forward elimination below is fraction-free (Bareiss) on cleared rows.
    std::vector<std::vector<Scalar>> M = A.a;
    for (auto& row : M) {
        Int l = 1;
        for (const auto& e : row) {
            Int d = e.a().den() * e.b().den();
            Int g = gcd_int(l, d);
            l = l / g * d;
        }
        if (l != 1)
            for (auto& e : row) e = e * Scalar(Rational(l));
    }
    Scalar prev_pivot(1);
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_col;
    for (std::size_t col = 0; col < n && rank < m; ++col) {
        std::size_t best = m;
        for (std::size_t r = rank; r < m; ++r) {
            if (M[r][col].is_zero()) continue;
            if (best == m || cmp(M[r][col].abs(), M[best][col].abs()) > 0) best = r;
        }
        if (best == m) continue;
        std::swap(M[rank], M[best]);
        for (std::size_t r = rank + 1; r < m; ++r) {
            for (std::size_t c2 = col + 1; c2 < n; ++c2)
                M[r][c2] = (M[rank][col] * M[r][c2] - M[r][col] * M[rank][c2]) / prev_pivot;
            M[r][col] = Scalar(0);
        }
        prev_pivot = M[rank][col];
        pivot_col.push_back(col);
        ++rank;
    }
    if (n - rank != 1)
        throw structural_error("null space dimension is " + std::to_string(n - rank) +
                               ", expected 1");
    std::vector<bool> is_pivot(n, false);
    for (auto c : pivot_col) is_pivot[c] = true;
    std::size_t free_col = 0;
    while (free_col < n && is_pivot[free_col]) ++free_col;
    std::vector<Scalar> v(n, Scalar(0));
    v[free_col] = Scalar(1);
    for (std::size_t k = rank; k-- > 0;) {
        Scalar s(0);
        for (std::size_t c2 = pivot_col[k] + 1; c2 < n; ++c2) s += M[k][c2] * v[c2];
        v[pivot_col[k]] = -(s / M[k][pivot_col[k]]);
    }
    return v;
}

std::size_t MarkovClosure::index_of(const SidedPoint& p) const {
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i] == p) return i;
    throw std::logic_error("point not in closure");
}

MarkovClosure markov_closure(const RandomSystem& sys, std::size_t cap) {
    MarkovClosure cl;
    std::map<std::string, std::size_t> index;
    auto key_of = [](const SidedPoint& p) {
        return p.value.str() + (p.approach < 0 ? "-" : "+");
    };
    std::vector<SidedPoint> queue;
    auto push = [&](const SidedPoint& p) -> std::size_t {
        auto key = key_of(p);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        std::size_t id = cl.points.size();
        index.emplace(key, id);
        cl.points.push_back(p);
        queue.push_back(p);
        if (cl.points.size() > cap) throw structural_error("orbit closure exceeds cap");
        return id;
    };
    for (const auto& c : sys.critical_points()) {
        push(SidedPoint{c, -1});
        push(SidedPoint{c, +1});
    }
    cl.steps.resize(0);
    std::size_t processed = 0;
    while (processed < cl.points.size()) {
        SidedPoint p = cl.points[processed];
        std::vector<std::pair<std::size_t, Scalar>> row;
        for (std::size_t j = 0; j < sys.n_maps(); ++j) {
            SidedStep st = sys.map(j).step(p);
            if (!st.deriv)
                throw structural_error("closure ran past a conventional fixed point");
            std::size_t t = push(st.next);
            row.emplace_back(t, *st.deriv);
        }
        cl.steps.push_back(std::move(row));
        ++processed;
    }
    return cl;
}

namespace {

/// Dense exact linear solve A x = b (A square, invertible).
std::vector<Scalar> solve_linear(std::vector<std::vector<Scalar>> A, std::vector<Scalar> b) {
    std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t r = col; r < n; ++r)
            if (cmp(A[r][col].abs(), A[best][col].abs()) > 0) best = r;
        if (A[best][col].is_zero()) throw structural_error("singular linear system");
        std::swap(A[col], A[best]);
        std::swap(b[col], b[best]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col].is_zero()) continue;
            Scalar f = A[r][col] / A[col][col];
            for (std::size_t c2 = col; c2 < n; ++c2) A[r][c2] -= f * A[col][c2];
            b[r] -= f * b[col];
        }
    }
    std::vector<Scalar> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
    return x;
}

}  // namespace

std::vector<std::vector<Scalar>> solve_markov_K(const RandomSystem& sys,
                                                const MarkovClosure& cl) {
    std::vector<Scalar> w = cell_weights(sys);
    std::size_t n = cl.points.size(), ncells = w.size();
    // System matrix I - B with B[p][t] = sum_j p_j/|slope| over steps p -> t.
    std::vector<std::vector<Scalar>> M(n, std::vector<Scalar>(n, Scalar(0)));
    for (std::size_t p = 0; p < n; ++p) {
        M[p][p] += Scalar(1);
        for (std::size_t j = 0; j < sys.n_maps(); ++j) {
            const auto& [t, slope] = cl.steps[p][j];
            M[p][t] -= Scalar(sys.prob(j)) / slope.abs();
        }
    }
    std::vector<std::vector<Scalar>> K(ncells);
    for (std::size_t cell = 0; cell < ncells; ++cell) {
        std::vector<Scalar> rhs(n, Scalar(0));
        for (std::size_t p = 0; p < n; ++p)
            if (sys.cell_of(cl.points[p]) == cell) rhs[p] = w[cell];
        K[cell] = solve_linear(M, rhs);
    }
    return K;
}

namespace {

DensityResult assemble(const RandomSystem& sys, const std::vector<Scalar>& gamma_raw,
                       const std::vector<std::pair<Scalar, Scalar>>& indicator_terms,
                       const std::string& route) {
    StepBuilder builder(sys.lo(), sys.hi());
    for (const auto& [right, coeff] : indicator_terms) builder.add_indicator(right, coeff);
    StepDensity f = builder.build();
    Scalar total = f.total_mass();
    if (total.is_zero()) throw structural_error("assembled density has zero mass");
    DensityResult out;
    out.route = route;
    out.f = f;
    for (auto& v : out.f.values) v = v / total;
    out.gamma = gamma_raw;
    for (auto& g : out.gamma) g = g / total;
    if (out.f.min_value().sign() < 0)
        throw structural_error("assembled density has a negative cell value");
    out.f = out.f.simplified();
    return out;
}

}  // namespace

DensityResult density_via_matching(const RandomSystem& sys,
                                   const std::vector<MatchingCertificate>& certs) {
    for (const auto& c : certs)
        if (!c.strong)
            throw structural_error("matching-route density needs strong certificates");
    auto D = k_differences(sys, certs);
    FundamentalMatrix A = build_A(sys, D);
    std::vector<Scalar> gamma = null_vector(A);
    std::vector<std::pair<Scalar, Scalar>> terms;
    for (std::size_t i = 0; i < certs.size(); ++i) {
        for (int side = 0; side < 2; ++side) {
            const TreeRun& run = side == 0 ? certs[i].run_minus : certs[i].run_plus;
            Scalar sgn = side == 0 ? gamma[i] : -gamma[i];
            for (const auto& cl : run.prestop) terms.emplace_back(cl.pt.value, sgn * cl.agg.sig);
        }
    }
    return assemble(sys, gamma, terms, "matching");
}

DensityResult density_via_markov(const RandomSystem& sys, std::size_t cap) {
    MarkovClosure cl = markov_closure(sys, cap);
    auto K = solve_markov_K(sys, cl);
    const auto& crit = sys.critical_points();
    std::size_t ncells = sys.partition().size() - 1;

    std::vector<std::vector<Scalar>> D(ncells, std::vector<Scalar>(crit.size(), Scalar(0)));
    for (std::size_t i = 0; i < crit.size(); ++i) {
        for (std::size_t j = 0; j < sys.n_maps(); ++j) {
            std::size_t ai = cl.index_of(sys.map(j).step({crit[i], -1}).next);
            std::size_t bi = cl.index_of(sys.map(j).step({crit[i], +1}).next);
            for (std::size_t n = 0; n < ncells; ++n)
                D[n][i] += Scalar(sys.prob(j)) * (K[n][ai] - K[n][bi]);
        }
    }
    FundamentalMatrix A = build_A(sys, D);
    std::vector<Scalar> gamma = null_vector(A);

    // H(z) = 1_{[c_0, val z)} + sum_j (p_j / T_j'(z)) H(T_j z) over the closure.
    std::size_t n = cl.points.size();
    std::vector<std::vector<Scalar>> M(n, std::vector<Scalar>(n, Scalar(0)));
    for (std::size_t p = 0; p < n; ++p) {
        M[p][p] += Scalar(1);
        for (std::size_t j = 0; j < sys.n_maps(); ++j) {
            const auto& [t, slope] = cl.steps[p][j];
            M[p][t] -= Scalar(sys.prob(j)) / slope;
        }
    }
    // Solve (I - B) V = I column by column of the identity: V[p][z] gives
    // H(p) = sum_z V[p][z] 1_{[c_0, val(z))}.
    std::vector<std::vector<Scalar>> V(n);
    {
        // One shared elimination would be nicer; sizes stay small enough.
        for (std::size_t z = 0; z < n; ++z) {
            std::vector<Scalar> e(n, Scalar(0));
            e[z] = Scalar(1);
            std::vector<Scalar> col = solve_linear(M, e);
            for (std::size_t p = 0; p < n; ++p) {
                if (V[p].empty()) V[p].assign(n, Scalar(0));
                V[p][z] = col[p];
            }
        }
    }
    std::vector<std::pair<Scalar, Scalar>> terms;
    for (std::size_t i = 0; i < crit.size(); ++i) {
        for (std::size_t j = 0; j < sys.n_maps(); ++j) {
            SidedStep left = sys.map(j).step({crit[i], -1});
            SidedStep right = sys.map(j).step({crit[i], +1});
            std::size_t ai = cl.index_of(left.next);
            std::size_t bi = cl.index_of(right.next);
            Scalar ca = gamma[i] * Scalar(sys.prob(j)) / *left.deriv;
            Scalar cb = gamma[i] * Scalar(sys.prob(j)) / *right.deriv;
            for (std::size_t z = 0; z < n; ++z) {
                terms.emplace_back(cl.points[z].value, ca * V[ai][z]);
                terms.emplace_back(cl.points[z].value, -(cb * V[bi][z]));
            }
        }
    }
    return assemble(sys, gamma, terms, "markov");
}

Scalar transfer_residual(const RandomSystem& sys, const StepDensity& f) {
    if (!sys.affine() || !sys.finite())
        throw domain_error_x("transfer residual needs finite affine systems");
    std::vector<Scalar> pts = f.breakpoints;
    for (std::size_t j = 0; j < sys.n_maps(); ++j) {
        const auto& pm = static_cast<const PiecewiseMap&>(sys.map(j));
        for (const auto& br : pm.branches()) {
            pts.push_back(br.eval(br.lo));
            pts.push_back(br.eval(br.hi));
            for (const auto& b : f.breakpoints) {
                Scalar img = br.eval(b);
                if (cmp(img, sys.lo()) >= 0 && cmp(img, sys.hi()) <= 0) pts.push_back(img);
            }
        }
    }
    pts = sorted_unique(std::move(pts));
    Scalar worst(0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Scalar mid = (pts[i] + pts[i + 1]) / Scalar(2);
        Scalar pf(0);
        for (std::size_t j = 0; j < sys.n_maps(); ++j) {
            const auto& pm = static_cast<const PiecewiseMap&>(sys.map(j));
            for (const auto& [x, bi] : pm.preimages(mid))
                pf += Scalar(sys.prob(j)) * f.value_at(x) / pm.branches()[bi].deriv(x).abs();
        }
        Scalar r = (pf - f.value_at(mid)).abs();
        if (cmp(r, worst) > 0) worst = r;
    }
    return worst;
}

}  // namespace rmatch

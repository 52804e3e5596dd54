#include "rmatch/mcsim.hpp"

#include "rmatch/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace rmatch {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

void SimConfig::validate() const {
    if (burn_in >= n_iterations) throw std::invalid_argument("burn_in must be < n_iterations");
    if (n_bins < 10) throw std::invalid_argument("need at least 10 bins");
    if (n_points == 0) throw std::invalid_argument("need sample points");
}

namespace {

std::uint64_t stream_seed(std::uint64_t master, std::size_t i) {
    std::uint64_t s = static_cast<std::uint64_t>(i) + 1;
    return master ^ splitmix64(s);
}

int pick_map(const FloatSystem& sys, double u) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < sys.probs.size(); ++j) {
        acc += sys.probs[j];
        if (u < acc) return static_cast<int>(j);
    }
    return static_cast<int>(sys.probs.size() - 1);
}

}  // namespace

FloatSystem float_doubling(double alpha, double p) {
    FloatSystem sys;
    sys.lo = -1.0;
    sys.hi = 1.0;
    sys.probs = {p, 1.0 - p};
    double c2 = (1.0 - alpha) / 2.0, c3 = (alpha - 1.0) / 2.0;
    sys.digit = [alpha, c2, c3](int j, double x) {
        if (x < -0.5) return -1;
        if (x <= c2) return j == 0 ? -1 : 0;
        if (x < c3) return 0;
        if (x <= 0.5) return j == 0 ? 0 : 1;
        return 1;
    };
    auto digit = sys.digit;
    sys.step = [alpha, digit](int j, double x) {
        double y = 2.0 * x - digit(j, x) * alpha;
        if (y < -1.0) y = -1.0;
        if (y > 1.0) y = 1.0;
        return y;
    };
    return sys;
}

FloatSystem float_cf(double alpha, double p0) {
    FloatSystem sys;
    sys.lo = alpha - 1.0;
    sys.hi = alpha;
    sys.probs = {p0, 1.0 - p0};
    sys.step = [alpha](int j, double x) {
        if (x == 0.0) return 0.0;
        double r = (j == 0) ? 1.0 / std::fabs(x) : 1.0 / x;
        double y = r - std::floor(r + 1.0 - alpha);
        if (y < alpha - 1.0) y = alpha - 1.0;
        if (y > alpha) y = alpha;
        return y;
    };
    return sys;
}

Histogram simulate_density(const FloatSystem& sys, const SimConfig& cfg) {
    cfg.validate();
    std::size_t nb = cfg.n_bins;
    double width = (sys.hi - sys.lo) / static_cast<double>(nb);
    std::size_t per_point = cfg.samples_per_point();

    // Per-point bin fractions, merged in index order for determinism.
    std::vector<std::vector<float>> frac(cfg.n_points);
    parallel_for(cfg.n_points, [&](std::size_t i) {
        std::uint64_t st = stream_seed(cfg.seed, i);
        double x = sys.lo + uniform01(st) * (sys.hi - sys.lo);
        std::vector<std::uint32_t> counts(nb, 0);
        for (std::size_t k = 0; k < cfg.n_iterations; ++k) {
            int j = pick_map(sys, uniform01(st));
            x = sys.step(j, x);
            if (k >= cfg.burn_in) {
                auto b = static_cast<long>((x - sys.lo) / width);
                if (b < 0) b = 0;
                if (b >= static_cast<long>(nb)) b = static_cast<long>(nb) - 1;
                ++counts[static_cast<std::size_t>(b)];
            }
        }
        std::vector<float> f(nb);
        for (std::size_t b = 0; b < nb; ++b)
            f[b] = static_cast<float>(static_cast<double>(counts[b]) /
                                      static_cast<double>(per_point));
        frac[i] = std::move(f);
    });

    Histogram h;
    h.edges.resize(nb + 1);
    for (std::size_t b = 0; b <= nb; ++b)
        h.edges[b] = sys.lo + static_cast<double>(b) * width;
    h.mass.assign(nb, 0.0);
    h.mass_stderr.assign(nb, 0.0);
    std::vector<double> sq(nb, 0.0);
    for (std::size_t i = 0; i < cfg.n_points; ++i)
        for (std::size_t b = 0; b < nb; ++b) {
            double v = frac[i][b];
            h.mass[b] += v;
            sq[b] += v * v;
        }
    double n = static_cast<double>(cfg.n_points);
    for (std::size_t b = 0; b < nb; ++b) {
        double mean = h.mass[b] / n;
        double var = (sq[b] / n - mean * mean) * n / std::max(1.0, n - 1.0);
        h.mass[b] = mean;
        h.mass_stderr[b] = std::sqrt(std::max(0.0, var) / n);
    }
    h.density.resize(nb);
    h.density_stderr.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        h.density[b] = h.mass[b] / width;
        h.density_stderr[b] = h.mass_stderr[b] / width;
    }
    return h;
}

Pi0Estimate birkhoff_pi0(const FloatSystem& sys, const SimConfig& cfg) {
    cfg.validate();
    if (!sys.digit) throw std::invalid_argument("system has no digit function");
    std::size_t per_point = cfg.samples_per_point();
    std::vector<double> freq(cfg.n_points, 0.0);
    parallel_for(cfg.n_points, [&](std::size_t i) {
        std::uint64_t st = stream_seed(cfg.seed, i);
        double x = sys.lo + uniform01(st) * (sys.hi - sys.lo);
        std::size_t zeros = 0;
        for (std::size_t k = 0; k < cfg.n_iterations; ++k) {
            int j = pick_map(sys, uniform01(st));
            if (k >= cfg.burn_in && sys.digit(j, x) == 0) ++zeros;
            x = sys.step(j, x);
        }
        freq[i] = static_cast<double>(zeros) / static_cast<double>(per_point);
    });
    Pi0Estimate out;
    out.n_points = cfg.n_points;
    double sum = 0.0, sumsq = 0.0;
    for (double f : freq) {
        sum += f;
        sumsq += f * f;
    }
    double n = static_cast<double>(cfg.n_points);
    out.value = sum / n;
    double var = (sumsq / n - out.value * out.value) * n / std::max(1.0, n - 1.0);
    out.stderr_ = std::sqrt(std::max(0.0, var) / n);
    return out;
}

}  // namespace rmatch

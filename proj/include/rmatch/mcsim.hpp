#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rmatch {

/// splitmix64 step; the per-point stream i is seeded by seed ^ splitmix64(i+1).
std::uint64_t splitmix64(std::uint64_t& state);
double uniform01(std::uint64_t& state);

struct SimConfig {
    std::uint64_t seed = 1;
    std::size_t n_points = 2000;
    std::size_t n_iterations = 1500;
    std::size_t burn_in = 1000;
    std::size_t n_bins = 100;

    void validate() const;
    std::size_t samples_per_point() const { return n_iterations - burn_in; }
};

struct Histogram {
    std::vector<double> edges;           // n_bins + 1
    std::vector<double> mass;            // normalized, sums to 1 (+-1e-12)
    std::vector<double> density;         // mass / bin width
    std::vector<double> mass_stderr;     // across independent points
    std::vector<double> density_stderr;
};

/// Double-precision system driver for simulation.
struct FloatSystem {
    double lo = -1.0, hi = 1.0;
    std::size_t n_maps = 2;
    std::vector<double> probs;
    std::function<double(int, double)> step;
    std::function<int(int, double)> digit;  // signed binary digit; empty when n/a
};

FloatSystem float_doubling(double alpha, double p);
FloatSystem float_cf(double alpha, double p0);

Histogram simulate_density(const FloatSystem& sys, const SimConfig& cfg);

struct Pi0Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n_points = 0;
};

/// Empirical digit-0 frequency by per-point Birkhoff averages.
Pi0Estimate birkhoff_pi0(const FloatSystem& sys, const SimConfig& cfg);

}  // namespace rmatch

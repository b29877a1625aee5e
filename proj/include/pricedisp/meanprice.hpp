#pragma once

// Mean-price dynamics: Walras adjustment and its multiplicative-noise limit.

#include "pricedisp/dispersion.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace pdisp {

/// d mu / dt = (mu - floor) * gain * (demand_rate - supply_rate).
double walras_rhs(double mu, double floor, double gain, double demand_rate, double supply_rate);

struct SdeParams {
    double omega0 = 1.0;       // initial shifted mean price mu(0) - floor
    double noise_amp = 0.0;    // D, white-noise intensity of the relative rate
    double walras_gain = 1.0;  // H = 1 / x0; only D enters the dynamics
    double dt = 1e-3;
    double horizon = 1.0;
    std::uint64_t n_paths = 1;
    std::uint64_t seed = 0;
    /// Store every k-th step of each path (0 = terminal values only).
    std::uint64_t store_every = 0;
    unsigned threads = 1;

    void validate() const;
    std::uint64_t steps() const;
};

struct PathPoint {
    std::uint64_t path_id = 0;
    double time = 0.0;
    double omega = 0.0;
};

struct EnsembleResult {
    std::vector<double> terminal;  // omega(T) per path
    std::vector<PathPoint> paths;  // ordered by path, then time
    double log_mean = 0.0;         // sample mean of ln omega(T)
    double log_std = 0.0;          // sample standard deviation of ln omega(T)
};

/// Seed of path `index`'s private generator, derived from the master seed.
std::uint64_t path_seed(std::uint64_t master, std::uint64_t index);

/// Log-space walk ln w += sqrt(2 D dt) xi per step, one generator per path;
/// results do not depend on the thread count.
EnsembleResult simulate_mean_price(const SdeParams& params);

/// Gamma = omega0, Omega = sqrt(2 D T), shift = floor.
/// Throws InvalidParameter when D * T == 0.
LognormalParams implied_lognormal(const SdeParams& params, double floor = 0.0);

void write_terminal_samples(std::ostream& out, const EnsembleResult& result);
void write_paths(std::ostream& out, const EnsembleResult& result);

}  // namespace pdisp

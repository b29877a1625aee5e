#include "pricedisp/meanprice.hpp"

#include "pricedisp/errors.hpp"
#include "pricedisp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

namespace pdisp {

double walras_rhs(double mu, double floor, double gain, double demand_rate, double supply_rate) {
    if (!(mu >= floor)) throw InvalidParameter("mean price must not lie below the floor");
    if (!(gain >= 0.0)) throw InvalidParameter("Walras gain must be nonnegative");
    return (mu - floor) * gain * (demand_rate - supply_rate);
}

void SdeParams::validate() const {
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw InvalidParameter("omega0 must be positive");
    if (!(noise_amp >= 0.0)) throw InvalidParameter("noise amplitude must be nonnegative");
    if (!(walras_gain >= 0.0)) throw InvalidParameter("Walras gain must be nonnegative");
    if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
    if (!(horizon >= dt)) throw InvalidParameter("horizon must be at least dt");
    if (n_paths < 1) throw InvalidParameter("need at least one path");
    if (threads < 1) throw InvalidParameter("need at least one thread");
}

std::uint64_t SdeParams::steps() const {
    return static_cast<std::uint64_t>(std::llround(horizon / dt));
}

std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over (master, index)
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

void run_paths(const SdeParams& p, std::uint64_t begin, std::uint64_t end, std::vector<double>& terminal,
               std::vector<std::vector<PathPoint>>& stored) {
    const std::uint64_t steps = p.steps();
    const double kick = std::sqrt(2.0 * p.noise_amp * p.dt);
    const double log0 = std::log(p.omega0);
    for (std::uint64_t path = begin; path < end; ++path) {
        std::mt19937_64 rng(path_seed(p.seed, path));
        std::normal_distribution<double> normal(0.0, 1.0);
        double log_w = log0;
        auto& trace = stored[path];
        if (p.store_every > 0) trace.push_back({path, 0.0, p.omega0});
        for (std::uint64_t k = 1; k <= steps; ++k) {
            if (kick > 0.0) log_w += kick * normal(rng);
            if (p.store_every > 0 && (k % p.store_every == 0 || k == steps)) {
                trace.push_back({path, static_cast<double>(k) * p.dt, std::exp(log_w)});
            }
        }
        terminal[path] = kick > 0.0 ? std::exp(log_w) : p.omega0;
    }
}

}  // namespace

EnsembleResult simulate_mean_price(const SdeParams& params) {
    params.validate();
    const std::uint64_t n = params.n_paths;
    EnsembleResult out;
    out.terminal.assign(n, 0.0);
    std::vector<std::vector<PathPoint>> stored(n);

    const std::uint64_t workers = std::min<std::uint64_t>(params.threads, n);
    if (workers <= 1) {
        run_paths(params, 0, n, out.terminal, stored);
    } else {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (n + workers - 1) / workers;
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t b = w * chunk;
            const std::uint64_t e = std::min(n, b + chunk);
            if (b >= e) break;
            pool.emplace_back([&, b, e] { run_paths(params, b, e, out.terminal, stored); });
        }
    }

    for (auto& trace : stored) {
        out.paths.insert(out.paths.end(), trace.begin(), trace.end());
    }

    double sum = 0.0;
    for (double w : out.terminal) sum += std::log(w);
    out.log_mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double w : out.terminal) {
        const double d = std::log(w) - out.log_mean;
        ss += d * d;
    }
    out.log_std = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    return out;
}

LognormalParams implied_lognormal(const SdeParams& params, double floor) {
    params.validate();
    const double spread = 2.0 * params.noise_amp * params.horizon;
    if (!(spread > 0.0)) throw InvalidParameter("degenerate lognormal: noise_amp * horizon is zero");
    LognormalParams out{params.omega0, std::sqrt(spread), floor};
    out.validate();
    return out;
}

void write_terminal_samples(std::ostream& out, const EnsembleResult& result) {
    out << "omega\n";
    for (double w : result.terminal) out << format_number(w) << '\n';
}

void write_paths(std::ostream& out, const EnsembleResult& result) {
    out << "path_id,time,omega\n";
    for (const auto& pt : result.paths) {
        out << pt.path_id << ',' << format_number(pt.time) << ',' << format_number(pt.omega) << '\n';
    }
}

}  // namespace pdisp

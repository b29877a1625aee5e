#pragma once

// Kinetic price-grid market: demanded and supplied units meet bin by bin at
// rate eta, are replenished by inflows, and leave a record of sales prices.

#include "pricedisp/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pdisp {

struct MarketState {
    std::vector<double> grid;   // bin centres; grid.front() is the floor price
    std::vector<double> x_bins; // demanded units per bin
    std::vector<double> z_bins; // supplied units per bin
    double eta = 1.0;           // meeting rate
    /// Rate at which unmatched units leave the market (0 = pure conservation).
    double withdrawal_rate = 0.0;
    double clock = 0.0;
    std::vector<double> cumulative_sales;  // transacted units per bin
    std::uint64_t cap_binds = 0;           // steps where a bin hit the min(x, z) cap

    /// `initial_x` and `initial_z` units in every bin on a uniform grid.
    static MarketState uniform(std::vector<double> grid, double eta, double initial_x,
                               double initial_z, double withdrawal_rate = 0.0);

    double x_total() const;
    double z_total() const;
    void validate() const;
};

enum class InflowShape {
    /// demand ~ 1 - F_ref(p), supply ~ F_ref(p) with F_ref a Laplace cumulative
    /// (centre, scale); the mismatch between the two is exponential in price.
    ReferenceLaplace,
    /// demand ~ exp(-(p - p_min) / a), supply ~ exp((p - p_max) / b).
    Exponential,
    Uniform,
};

InflowShape parse_inflow_shape(const std::string& name);
std::string to_string(InflowShape shape);

struct InflowSpec {
    double demand_rate = 0.0;  // total demanded units per unit time
    double supply_rate = 0.0;  // total supplied units per unit time
    InflowShape shape = InflowShape::ReferenceLaplace;
    double shape_a = 1.0;  // ReferenceLaplace: centre; Exponential: demand decay length
    double shape_b = 0.1;  // ReferenceLaplace: scale;  Exponential: supply growth length
    /// Log-sd of the per-step multiplicative jitter on both rates (0 = none).
    double jitter = 0.0;

    void validate() const;
};

/// Per-bin inflow densities; each sums to 1 when multiplied by the bin width.
struct InflowProfile {
    std::vector<double> demand;
    std::vector<double> supply;
    double demand_rate = 0.0;
    double supply_rate = 0.0;
    double bin_width = 0.0;

    static InflowProfile build(const InflowSpec& spec, const std::vector<double>& grid);
};

/// What one step did, for bookkeeping.
struct StepReport {
    double transacted = 0.0;
    double demand_in = 0.0;
    double supply_in = 0.0;
    double demand_out = 0.0;  // withdrawn demanded units
    double supply_out = 0.0;
};

/// Advances the state in place by dt. `demand_factor` and `supply_factor`
/// scale this step's inflow rates (jitter).
StepReport advance(MarketState& state, const InflowProfile& inflow, double dt,
                   double demand_factor = 1.0, double supply_factor = 1.0);

MarketState step(MarketState state, const InflowSpec& inflow, double dt);

struct TimeSample {
    double time = 0.0;
    double x_total = 0.0;
    double z_total = 0.0;
    double sales_rate = 0.0;
    double mean_price = 0.0;  // sales-weighted mean price within the step
};

struct SimResult {
    GriddedDistribution sales_histogram;
    std::vector<TimeSample> series;
    double event_count = 0.0;  // transacted units over the run
    std::uint64_t cap_binds = 0;
    /// Time-averaged per-bin stocks over the run.
    std::vector<double> mean_x_bins;
    std::vector<double> mean_z_bins;
    MarketState final_state;
};

struct RunOptions {
    std::uint64_t sample_every = 100;  // steps between time-series samples
    double stability_bound = 0.1;
};

/// Runs the market to `horizon`. Throws StabilityViolation when
/// eta * max(x, z) * dt >= stability_bound at the start, and ZeroSalesVolume
/// when nothing is ever sold.
SimResult run(const MarketState& initial, const InflowSpec& inflow, double dt, double horizon,
              std::uint64_t seed, const RunOptions& options = {});

void write_time_series(std::ostream& out, const std::vector<TimeSample>& series);

struct FixedPointResult {
    GriddedDistribution density;
    std::size_t iterations = 0;
    double gap = 0.0;     // last scale-free sup-norm change
    double median = 0.0;  // p*
    double scale = 0.0;   // sigma of the last iterate
};

/// Iterates the self-consistency map P <- F / sigma below the median and
/// (1 - F) / sigma above it. Each iterate is compared with its predecessor
/// after both are standardized by median and scale; iteration stops when the
/// sup-norm gap drops below `tol`. Throws NonConvergence after `max_iter`.
FixedPointResult fixed_point_solve(const std::vector<double>& grid, const GriddedDistribution& init,
                                   double tol = 1e-4, std::size_t max_iter = 200);

/// One application of the map, exposed for tests.
GriddedDistribution fixed_point_map(const GriddedDistribution& current);

}  // namespace pdisp

#include "pricedisp/matching.hpp"

#include "pricedisp/dispersion.hpp"
#include "pricedisp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

namespace pdisp {

MarketState MarketState::uniform(std::vector<double> grid, double eta, double initial_x,
                                 double initial_z, double withdrawal_rate) {
    MarketState s;
    const std::size_t n = grid.size();
    s.grid = std::move(grid);
    s.x_bins.assign(n, initial_x);
    s.z_bins.assign(n, initial_z);
    s.eta = eta;
    s.withdrawal_rate = withdrawal_rate;
    s.cumulative_sales.assign(n, 0.0);
    s.validate();
    return s;
}

double MarketState::x_total() const { return std::accumulate(x_bins.begin(), x_bins.end(), 0.0); }
double MarketState::z_total() const { return std::accumulate(z_bins.begin(), z_bins.end(), 0.0); }

void MarketState::validate() const {
    grid_step(grid);
    if (x_bins.size() != grid.size() || z_bins.size() != grid.size() ||
        cumulative_sales.size() != grid.size()) {
        throw InvalidParameter("market bins must match the grid");
    }
    if (grid.front() < 0.0) throw InvalidParameter("floor price must be nonnegative");
    if (!(eta >= 0.0)) throw InvalidParameter("meeting rate must be nonnegative");
    if (!(withdrawal_rate >= 0.0)) throw InvalidParameter("withdrawal rate must be nonnegative");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(x_bins[i] >= 0.0) || !(z_bins[i] >= 0.0) || !(cumulative_sales[i] >= 0.0)) {
            throw InvalidParameter("bin values must be nonnegative");
        }
    }
}

InflowShape parse_inflow_shape(const std::string& name) {
    if (name == "reference-laplace") return InflowShape::ReferenceLaplace;
    if (name == "exponential") return InflowShape::Exponential;
    if (name == "uniform") return InflowShape::Uniform;
    throw InvalidParameter("unknown inflow shape '" + name + "'");
}

std::string to_string(InflowShape shape) {
    switch (shape) {
        case InflowShape::ReferenceLaplace: return "reference-laplace";
        case InflowShape::Exponential: return "exponential";
        case InflowShape::Uniform: return "uniform";
    }
    return "unknown";
}

void InflowSpec::validate() const {
    if (!(demand_rate >= 0.0) || !(supply_rate >= 0.0)) throw InvalidParameter("inflow rates must be nonnegative");
    if (!(jitter >= 0.0)) throw InvalidParameter("jitter must be nonnegative");
    if (shape == InflowShape::ReferenceLaplace && !(shape_b > 0.0)) {
        throw InvalidParameter("reference scale must be positive");
    }
    if (shape == InflowShape::Exponential && !(shape_a > 0.0 && shape_b > 0.0)) {
        throw InvalidParameter("exponential lengths must be positive");
    }
}

InflowProfile InflowProfile::build(const InflowSpec& spec, const std::vector<double>& grid) {
    spec.validate();
    const double h = grid_step(grid);
    const std::size_t n = grid.size();
    InflowProfile prof;
    prof.demand.resize(n);
    prof.supply.resize(n);
    prof.demand_rate = spec.demand_rate;
    prof.supply_rate = spec.supply_rate;
    prof.bin_width = h;

    for (std::size_t i = 0; i < n; ++i) {
        const double p = grid[i];
        switch (spec.shape) {
            case InflowShape::ReferenceLaplace: {
                const double f = laplace_eval(p, {spec.shape_a, spec.shape_b, 0.0}).cumulative;
                prof.demand[i] = 1.0 - f;
                prof.supply[i] = f;
                break;
            }
            case InflowShape::Exponential:
                prof.demand[i] = std::exp(-(p - grid.front()) / spec.shape_a);
                prof.supply[i] = std::exp((p - grid.back()) / spec.shape_b);
                break;
            case InflowShape::Uniform:
                prof.demand[i] = 1.0;
                prof.supply[i] = 1.0;
                break;
        }
    }
    for (auto* v : {&prof.demand, &prof.supply}) {
        const double mass = std::accumulate(v->begin(), v->end(), 0.0) * h;
        if (!(mass > 0.0)) throw InvalidParameter("inflow shape has no mass on the grid");
        for (double& d : *v) d /= mass;
    }
    return prof;
}

namespace {

constexpr double kMinTotal = 1e-12;

struct StepTotals {
    StepReport report;
    double price_weighted = 0.0;
};

StepTotals advance_impl(MarketState& s, const InflowProfile& inflow, double dt, double df, double sf) {
    StepTotals out;
    const std::size_t n = s.grid.size();
    const bool trading = s.eta > 0.0 && s.x_total() >= kMinTotal && s.z_total() >= kMinTotal;
    const double keep = 1.0 - s.withdrawal_rate * dt;
    const double d_scale = inflow.demand_rate * df * inflow.bin_width * dt;
    const double s_scale = inflow.supply_rate * sf * inflow.bin_width * dt;

    for (std::size_t i = 0; i < n; ++i) {
        double x = s.x_bins[i];
        double z = s.z_bins[i];
        if (trading) {
            const double wanted = s.eta * x * z * dt;
            const double cap = std::min(x, z);
            double u = wanted;
            if (wanted > cap) {
                u = cap;
                ++s.cap_binds;
            }
            // Exact zero for the exhausted side; avoids round-off going negative.
            x = (u == x) ? 0.0 : x - u;
            z = (u == z) ? 0.0 : z - u;
            s.cumulative_sales[i] += u;
            out.report.transacted += u;
            out.price_weighted += u * s.grid[i];
        }
        if (s.withdrawal_rate > 0.0) {
            out.report.demand_out += x * (1.0 - keep);
            out.report.supply_out += z * (1.0 - keep);
            x *= keep;
            z *= keep;
        }
        const double din = d_scale * inflow.demand[i];
        const double sin = s_scale * inflow.supply[i];
        out.report.demand_in += din;
        out.report.supply_in += sin;
        s.x_bins[i] = x + din;
        s.z_bins[i] = z + sin;
    }
    s.clock += dt;
    return out;
}

void check_step(const MarketState& s, const InflowProfile& inflow, double dt) {
    if (!(dt > 0.0)) throw InvalidParameter("time step must be positive");
    if (inflow.demand.size() != s.grid.size()) throw InvalidParameter("inflow profile does not match the grid");
    if (s.withdrawal_rate * dt >= 1.0) throw InvalidParameter("withdrawal_rate * dt must be < 1");
}

}  // namespace

StepReport advance(MarketState& state, const InflowProfile& inflow, double dt, double demand_factor,
                   double supply_factor) {
    check_step(state, inflow, dt);
    return advance_impl(state, inflow, dt, demand_factor, supply_factor).report;
}

MarketState step(MarketState state, const InflowSpec& inflow, double dt) {
    state.validate();
    advance(state, InflowProfile::build(inflow, state.grid), dt);
    return state;
}

SimResult run(const MarketState& initial, const InflowSpec& inflow, double dt, double horizon,
              std::uint64_t seed, const RunOptions& options) {
    initial.validate();
    const InflowProfile profile = InflowProfile::build(inflow, initial.grid);
    check_step(initial, profile, dt);
    if (!(horizon >= dt)) throw InvalidParameter("horizon must be at least one step");
    if (options.sample_every == 0) throw InvalidParameter("sample_every must be positive");

    const double peak = std::max(*std::max_element(initial.x_bins.begin(), initial.x_bins.end()),
                                 *std::max_element(initial.z_bins.begin(), initial.z_bins.end()));
    const double product = initial.eta * peak * dt;
    if (!(product < options.stability_bound)) throw StabilityViolation(product, options.stability_bound);

    const auto steps = static_cast<std::uint64_t>(std::llround(horizon / dt));
    const std::size_t n = initial.grid.size();

    SimResult result;
    result.final_state = initial;
    MarketState& s = result.final_state;
    result.mean_x_bins.assign(n, 0.0);
    result.mean_z_bins.assign(n, 0.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double j = inflow.jitter;

    for (std::uint64_t k = 0; k < steps; ++k) {
        double df = 1.0;
        double sf = 1.0;
        if (j > 0.0) {
            df = std::exp(j * normal(rng) - 0.5 * j * j);
            sf = std::exp(j * normal(rng) - 0.5 * j * j);
        }
        const StepTotals t = advance_impl(s, profile, dt, df, sf);
        result.event_count += t.report.transacted;
        for (std::size_t i = 0; i < n; ++i) {
            result.mean_x_bins[i] += s.x_bins[i];
            result.mean_z_bins[i] += s.z_bins[i];
        }
        if ((k + 1) % options.sample_every == 0 || k + 1 == steps) {
            TimeSample ts;
            ts.time = s.clock;
            ts.x_total = s.x_total();
            ts.z_total = s.z_total();
            ts.sales_rate = t.report.transacted / dt;
            ts.mean_price = t.report.transacted > 0.0 ? t.price_weighted / t.report.transacted : 0.0;
            result.series.push_back(ts);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        result.mean_x_bins[i] /= static_cast<double>(steps);
        result.mean_z_bins[i] /= static_cast<double>(steps);
    }
    result.cap_binds = s.cap_binds - initial.cap_binds;

    const double sold = std::accumulate(s.cumulative_sales.begin(), s.cumulative_sales.end(), 0.0);
    if (!(sold > 0.0)) throw ZeroSalesVolume();
    std::vector<double> density(n);
    const double h = profile.bin_width;
    for (std::size_t i = 0; i < n; ++i) density[i] = s.cumulative_sales[i] / h;
    result.sales_histogram = GriddedDistribution::from_density(s.grid, std::move(density));
    return result;
}

void write_time_series(std::ostream& out, const std::vector<TimeSample>& series) {
    out << "time,x_total,z_total,sales_rate\n";
    for (const auto& t : series) {
        out << format_number(t.time) << ',' << format_number(t.x_total) << ',' << format_number(t.z_total)
            << ',' << format_number(t.sales_rate) << '\n';
    }
}

}  // namespace pdisp

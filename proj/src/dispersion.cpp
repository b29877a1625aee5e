#include "pricedisp/dispersion.hpp"

#include "pricedisp/errors.hpp"

#include <cmath>
#include <numbers>

namespace pdisp {

void LaplaceParams::validate() const {
    if (!std::isfinite(mu) || !std::isfinite(sigma) || !std::isfinite(floor)) {
        throw InvalidParameter("Laplace parameters must be finite");
    }
    if (!(sigma > 0.0)) throw InvalidParameter("Laplace scale must be positive");
    if (floor < 0.0) throw InvalidParameter("floor price must be nonnegative");
    if (mu < floor) throw InvalidParameter("mean price must not lie below the floor");
}

void LognormalParams::validate() const {
    if (!std::isfinite(gamma) || !std::isfinite(omega_width) || !std::isfinite(shift)) {
        throw InvalidParameter("lognormal parameters must be finite");
    }
    if (!(gamma > 0.0)) throw InvalidParameter("lognormal gamma must be positive");
    if (!(omega_width > 0.0)) throw InvalidParameter("lognormal omega must be positive");
    if (shift < 0.0) throw InvalidParameter("lognormal shift must be nonnegative");
}

DensityCdf laplace_eval(double p, const LaplaceParams& params) {
    params.validate();
    const double z = (p - params.mu) / params.sigma;
    DensityCdf out;
    out.density = std::exp(-std::abs(z)) / (2.0 * params.sigma);
    out.cumulative = p <= params.mu ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
    return out;
}

DensityCdf laplace_eval_truncated(double p, const LaplaceParams& params) {
    if (p < params.floor) {
        params.validate();
        return {};
    }
    const DensityCdf base = laplace_eval(p, params);
    const double below = laplace_eval(params.floor, params).cumulative;
    const double kept = 1.0 - below;
    return {base.density / kept, (base.cumulative - below) / kept};
}

LaplaceMoments laplace_moments(const LaplaceParams& params) {
    params.validate();
    const double var = 2.0 * params.sigma * params.sigma;
    return {params.mu, var, std::sqrt(var)};
}

FloorScale sigma_from_mean(double mu, double floor) {
    if (!(mu >= floor)) throw InvalidParameter("mean price must not lie below the floor");
    const double sigma = mu - floor;
    return {sigma, sigma == 0.0};
}

double linearization_error(double gap, double sigma) {
    if (!(sigma > 0.0)) throw InvalidParameter("scale must be positive");
    const double r = gap / sigma;
    return std::exp(-r) - (1.0 - r);
}

DensityCdf lognormal_eval(double w, const LognormalParams& params) {
    params.validate();
    const double x = w - params.shift;
    if (!(x > 0.0)) return {};
    const double z = std::log(x / params.gamma) / params.omega_width;
    DensityCdf out;
    out.density = std::exp(-0.5 * z * z) /
                  (std::sqrt(2.0 * std::numbers::pi) * params.omega_width * x);
    out.cumulative = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    return out;
}

QuasiStatic quasi_static_density(std::span<const double> grid,
                                 std::span<const double> supply_cdf,
                                 std::span<const double> demand_cdf) {
    if (supply_cdf.size() != grid.size() || demand_cdf.size() != grid.size()) {
        throw InvalidParameter("cumulatives must share the grid");
    }
    std::vector<double> meet(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double fz = supply_cdf[i];
        const double fx = demand_cdf[i];
        if (!(fz >= 0.0 && fz <= 1.0 && fx >= 0.0 && fx <= 1.0)) {
            throw InvalidParameter("cumulative values must lie in [0, 1]");
        }
        meet[i] = fz * (1.0 - fx);
    }
    const double sigma = trapezoid(grid, meet);
    if (sigma < 1e-12) throw ZeroSalesVolume();

    QuasiStatic out;
    out.sigma_norm = sigma;
    out.density = GriddedDistribution::from_density({grid.begin(), grid.end()}, std::move(meet));
    return out;
}

QuasiStatic quasi_static_density(const GriddedDistribution& supply,
                                 const GriddedDistribution& demand) {
    if (supply.grid != demand.grid) throw InvalidParameter("cumulatives must share the grid");
    return quasi_static_density(supply.grid, supply.cumulative, demand.cumulative);
}

SupplyDemandCurves SupplyDemandCurves::from_cumulatives(std::vector<double> grid,
                                                        std::span<const double> demand_cdf,
                                                        std::span<const double> supply_cdf,
                                                        double x_total, double z_total) {
    if (demand_cdf.size() != grid.size() || supply_cdf.size() != grid.size()) {
        throw InvalidParameter("cumulatives must share the grid");
    }
    SupplyDemandCurves c;
    c.x_total = x_total;
    c.z_total = z_total;
    c.x_units.resize(grid.size());
    c.z_units.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        c.x_units[i] = x_total * (1.0 - demand_cdf[i]);
        c.z_units[i] = z_total * supply_cdf[i];
    }
    c.grid = std::move(grid);
    c.validate();
    return c;
}

void SupplyDemandCurves::validate() const {
    if (x_units.size() != grid.size() || z_units.size() != grid.size() || grid.size() < 2) {
        throw InvalidParameter("curves must share a grid of at least two points");
    }
    if (x_total < 0.0 || z_total < 0.0) throw InvalidParameter("unit totals must be nonnegative");
    const double slack = 1e-12 * std::max(1.0, std::max(x_total, z_total));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (x_units[i] < -slack || z_units[i] < -slack) throw InvalidParameter("unit counts must be nonnegative");
        if (i > 0) {
            if (x_units[i] > x_units[i - 1] + slack) throw InvalidParameter("demanded units must be nonincreasing");
            if (z_units[i] < z_units[i - 1] - slack) throw InvalidParameter("supplied units must be nondecreasing");
        }
    }
}

double intercept_price(const SupplyDemandCurves& curves) {
    curves.validate();
    const auto& g = curves.grid;
    // excess(p) = x(p) - z(p) is nonincreasing, so the first sign change is the only one.
    double prev = curves.x_units[0] - curves.z_units[0];
    if (prev == 0.0) return g[0];
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double cur = curves.x_units[i] - curves.z_units[i];
        if (cur == 0.0) return g[i];
        if ((prev > 0.0) != (cur > 0.0)) {
            const double t = prev / (prev - cur);
            return g[i - 1] + t * (g[i] - g[i - 1]);
        }
        prev = cur;
    }
    throw NoIntercept();
}

double total_sales_rate(double eta, double x0, double z0, double sigma_norm) {
    if (eta < 0.0 || x0 < 0.0 || z0 < 0.0 || sigma_norm < 0.0) {
        throw InvalidParameter("sales-rate inputs must be nonnegative");
    }
    return eta * x0 * z0 * sigma_norm;
}

}  // namespace pdisp

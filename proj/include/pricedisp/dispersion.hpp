#pragma once

// Closed-form price-dispersion laws and the static supply/demand relations.

#include "pricedisp/grid.hpp"

#include <span>
#include <vector>

namespace pdisp {

/// Laplace dispersion around the mean price with a floor price below it.
struct LaplaceParams {
    double mu = 1.0;     // mean price
    double sigma = 1.0;  // scale
    double floor = 0.0;  // floor price mu_m

    void validate() const;
    double gap() const { return mu - floor; }
};

/// Lognormal law of a (shifted) positive quantity: log-median ln(gamma),
/// log-standard-deviation omega_width, support (shift, inf).
struct LognormalParams {
    double gamma = 1.0;
    double omega_width = 1.0;
    double shift = 0.0;

    void validate() const;
};

struct DensityCdf {
    double density = 0.0;
    double cumulative = 0.0;
};

DensityCdf laplace_eval(double p, const LaplaceParams& params);

/// Laplace restricted to [floor, inf) and renormalized; zero below the floor.
DensityCdf laplace_eval_truncated(double p, const LaplaceParams& params);

struct LaplaceMoments {
    double mean = 0.0;
    double variance = 0.0;
    double std_dev = 0.0;
};

LaplaceMoments laplace_moments(const LaplaceParams& params);

struct FloorScale {
    double sigma = 0.0;
    bool degenerate = false;  // mu == floor: the dispersion collapses to a spike
};

/// Scale implied by the distance of the mean price from the floor.
FloorScale sigma_from_mean(double mu, double floor);

/// exp(-gap/sigma) - (1 - gap/sigma): error of linearizing the floor term.
double linearization_error(double gap, double sigma);

DensityCdf lognormal_eval(double w, const LognormalParams& params);

/// Density of sales under fixed supply and demand cumulatives,
/// F_z (1 - F_x) / sigma_norm, together with sigma_norm itself.
struct QuasiStatic {
    GriddedDistribution density;
    double sigma_norm = 0.0;
};

/// Both cumulatives are tabulated on `grid`. Throws ZeroSalesVolume when the
/// integral of F_z (1 - F_x) is below 1e-12.
QuasiStatic quasi_static_density(std::span<const double> grid,
                                 std::span<const double> supply_cdf,
                                 std::span<const double> demand_cdf);
QuasiStatic quasi_static_density(const GriddedDistribution& supply,
                                 const GriddedDistribution& demand);

/// Demanded units x(p) = x_total (1 - F_x) and supplied units z(p) = z_total F_z.
struct SupplyDemandCurves {
    std::vector<double> grid;
    std::vector<double> x_units;
    std::vector<double> z_units;
    double x_total = 0.0;
    double z_total = 0.0;

    static SupplyDemandCurves from_cumulatives(std::vector<double> grid,
                                               std::span<const double> demand_cdf,
                                               std::span<const double> supply_cdf,
                                               double x_total, double z_total);
    void validate() const;
};

/// Price where x(p) = z(p), by linear interpolation of x - z between the
/// bracketing grid points. Throws NoIntercept when x - z keeps its sign.
double intercept_price(const SupplyDemandCurves& curves);

/// eta * x0 * z0 * sigma_norm.
double total_sales_rate(double eta, double x0, double z0, double sigma_norm);

struct MixtureOptions {
    /// Conditional scale is conditional_scale * omega; 1 links the scale to the
    /// shifted mean price, values near 0 approach a point-mass conditional.
    double conditional_scale = 1.0;
    /// Half-width of the omega range in log-standard-deviations.
    double log_sd_span = 10.0;
    double rel_tol = 1e-6;
    unsigned max_depth = 20;
};

/// Unconditional price density: the Laplace conditional with mean
/// floor + omega and scale conditional_scale * omega, mixed over a lognormal
/// law of omega. Throws QuadratureError when the requested tolerance is missed.
double mixture_density(double p, const LognormalParams& mean_price_law, double floor,
                       const MixtureOptions& options = {});

}  // namespace pdisp

#include "pricedisp/dispersion.hpp"
#include "pricedisp/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace pdisp {

double mixture_density(double p, const LognormalParams& law, double floor,
                       const MixtureOptions& options) {
    law.validate();
    if (floor < 0.0) throw InvalidParameter("floor price must be nonnegative");
    if (!(options.conditional_scale > 0.0)) throw InvalidParameter("conditional scale must be positive");
    if (!(options.log_sd_span >= 8.0)) throw InvalidParameter("omega range must cover at least 8 log-sd");
    if (!(options.rel_tol > 0.0)) throw InvalidParameter("tolerance must be positive");

    const double c = options.conditional_scale;
    const double log_gamma = std::log(law.gamma);
    const double inv_norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * law.omega_width);

    // Integrate over t = ln(omega - shift); the lognormal weight becomes a Gaussian in t.
    auto integrand = [&](double t) {
        const double omega = law.shift + std::exp(t);
        const double z = (t - log_gamma) / law.omega_width;
        const double weight = inv_norm * std::exp(-0.5 * z * z);
        const double scale = c * omega;
        const double conditional = std::exp(-std::abs(p - floor - omega) / scale) / (2.0 * scale);
        return weight * conditional;
    };

    const double lo = log_gamma - options.log_sd_span * law.omega_width;
    const double hi = log_gamma + options.log_sd_span * law.omega_width;

    // Break at the conditional's cusp and around its width so each panel is smooth.
    std::vector<double> cuts{lo, hi};
    const double cusp_gap = p - floor - law.shift;
    if (cusp_gap > 0.0) {
        const double tk = std::log(cusp_gap);
        cuts.push_back(tk);
        for (double m : {1.0, 4.0, 16.0, 64.0}) {
            cuts.push_back(tk - m * c);
            cuts.push_back(tk + m * c);
        }
    }
    std::erase_if(cuts, [&](double x) { return x < lo || x > hi; });
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        double err = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            integrand, cuts[i - 1], cuts[i], options.max_depth, options.rel_tol * 1e-2, &err);
        total_err += err;
    }
    const double achieved = total > 0.0 ? total_err / total : total_err;
    if (total_err > options.rel_tol * total + 1e-300) {
        throw QuadratureError(achieved, options.rel_tol);
    }
    return std::max(total, 0.0);
}

}  // namespace pdisp

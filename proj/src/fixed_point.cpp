#include "pricedisp/errors.hpp"
#include "pricedisp/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdisp {

namespace {

// Mass beyond a grid end, assuming the density keeps decaying exponentially
// with the log-slope of its last two points. Zero when it is not decaying.
double tail_mass(double edge, double inner, double spacing, double max_length) {
    if (!(edge > 0.0) || !(inner > edge)) return 0.0;
    const double length = std::min(spacing / std::log(inner / edge), max_length);
    return edge * length;
}

struct Analysis {
    std::vector<double> lower;  // F on the full line
    std::vector<double> upper;  // 1 - F, accumulated from the right
    double median = 0.0;
    double scale = 0.0;
    std::vector<double> mapped;  // F below the median, 1 - F above
};

Analysis analyze(const std::vector<double>& grid, const std::vector<double>& density) {
    const std::size_t n = grid.size();
    const double span = grid.back() - grid.front();
    const double left = tail_mass(density[0], density[1], grid[1] - grid[0], span);
    const double right = tail_mass(density[n - 1], density[n - 2], grid[n - 1] - grid[n - 2], span);

    Analysis a;
    a.lower.assign(n, left);
    a.upper.assign(n, right);
    for (std::size_t i = 1; i < n; ++i) {
        a.lower[i] = a.lower[i - 1] + 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        a.upper[i] = a.upper[i + 1] + 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
    }
    const double total = a.lower.back() + right;
    for (std::size_t i = 0; i < n; ++i) {
        a.lower[i] /= total;
        a.upper[i] /= total;
    }

    // Median by linear interpolation of the cumulative.
    a.median = grid.back();
    for (std::size_t i = 0; i < n; ++i) {
        if (a.lower[i] >= 0.5) {
            if (i == 0) {
                a.median = grid[0];
            } else {
                const double t = (0.5 - a.lower[i - 1]) / (a.lower[i] - a.lower[i - 1]);
                a.median = grid[i - 1] + t * (grid[i] - grid[i - 1]);
            }
            break;
        }
    }

    a.mapped.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        a.mapped[i] = grid[i] <= a.median ? a.lower[i] : a.upper[i];
    }
    const double g_left = tail_mass(a.mapped[0], a.mapped[1], grid[1] - grid[0], span);
    const double g_right = tail_mass(a.mapped[n - 1], a.mapped[n - 2], grid[n - 1] - grid[n - 2], span);
    a.scale = trapezoid(grid, a.mapped) + g_left + g_right;
    return a;
}

// Sup-norm distance between two densities after each is standardized by its
// own median and scale, in units of the standardized density.
double standardized_gap(const std::vector<double>& grid, const std::vector<double>& prev,
                        const Analysis& pa, const std::vector<double>& next, const Analysis& na) {
    const double ratio = na.scale / pa.scale;
    double gap = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double at = na.median + (grid[i] - pa.median) * ratio;
        const double q = (at < grid.front() || at > grid.back()) ? 0.0 : interpolate(grid, next, at) * ratio;
        gap = std::max(gap, std::abs(q - prev[i]));
    }
    return gap * pa.scale;
}

}  // namespace

GriddedDistribution fixed_point_map(const GriddedDistribution& current) {
    const Analysis a = analyze(current.grid, current.density);
    return GriddedDistribution::from_density(current.grid, a.mapped);
}

FixedPointResult fixed_point_solve(const std::vector<double>& grid, const GriddedDistribution& init,
                                   double tol, std::size_t max_iter) {
    init.validate();
    if (init.grid != grid) throw InvalidParameter("initial density must live on the solver grid");
    if (grid.size() < 3) throw InvalidParameter("fixed-point grid needs at least three points");
    if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");
    if (max_iter == 0) throw NonConvergence(0, std::numeric_limits<double>::infinity());

    GriddedDistribution current = init;
    Analysis current_a = analyze(grid, current.density);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= max_iter; ++k) {
        GriddedDistribution next = GriddedDistribution::from_density(grid, current_a.mapped);
        Analysis next_a = analyze(grid, next.density);
        gap = standardized_gap(grid, current.density, current_a, next.density, next_a);
        current = std::move(next);
        current_a = std::move(next_a);
        if (gap < tol) {
            return {std::move(current), k, gap, current_a.median, current_a.scale};
        }
    }
    throw NonConvergence(max_iter, gap);
}

}  // namespace pdisp

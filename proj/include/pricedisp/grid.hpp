#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pdisp {

/// Uniformly spaced points from lo to hi inclusive (n >= 2).
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

/// Spacing of a uniform grid; throws if the grid is not uniform.
double grid_step(std::span<const double> grid);

double trapezoid(std::span<const double> grid, std::span<const double> values);

/// Running trapezoidal integral, starting at 0 at grid.front().
std::vector<double> cumulative_trapezoid(std::span<const double> grid,
                                         std::span<const double> values);

/// Linear interpolation; clamps to the end values outside the grid.
double interpolate(std::span<const double> grid, std::span<const double> values, double at);

/// A density tabulated on a price grid together with its running integral.
struct GriddedDistribution {
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<double> cumulative;

    /// Normalizes `density` to unit trapezoidal mass and fills `cumulative`.
    /// Throws InvalidParameter for negative or non-finite values, mismatched
    /// lengths, a non-increasing grid, or zero mass.
    static GriddedDistribution from_density(std::vector<double> grid, std::vector<double> density);

    /// Builds the distribution from a cumulative; the density is the
    /// centred finite difference (one-sided at the ends).
    static GriddedDistribution from_cumulative(std::vector<double> grid, std::vector<double> cumulative);

    std::size_t size() const { return grid.size(); }
    double mass() const;
    /// Throws InvalidParameter when an invariant is broken.
    void validate(double tol = 1e-9) const;
};

/// Two-column table "price,density" with a one-line header, 17 significant digits.
void write_distribution(std::ostream& out, const GriddedDistribution& dist);
GriddedDistribution read_distribution(std::istream& in);

/// Shortest round-trip decimal text for a double (17 significant digits).
std::string format_number(double value);

}  // namespace pdisp

#include "pricedisp/grid.hpp"

#include "pricedisp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace pdisp {

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw InvalidParameter("uniform_grid needs n >= 2 and finite lo < hi");
    }
    std::vector<double> grid(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = lo + step * static_cast<double>(i);
    }
    grid.back() = hi;
    return grid;
}

double grid_step(std::span<const double> grid) {
    if (grid.size() < 2) throw InvalidParameter("grid needs at least two points");
    const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (std::abs((grid[i] - grid[i - 1]) - step) > 1e-6 * step) {
            throw InvalidParameter("grid is not uniform");
        }
    }
    return step;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
    if (grid.size() != values.size()) throw InvalidParameter("grid/value length mismatch");
    double sum = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        sum += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    }
    return sum;
}

std::vector<double> cumulative_trapezoid(std::span<const double> grid,
                                         std::span<const double> values) {
    if (grid.size() != values.size()) throw InvalidParameter("grid/value length mismatch");
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    }
    return out;
}

double interpolate(std::span<const double> grid, std::span<const double> values, double at) {
    if (at <= grid.front()) return values.front();
    if (at >= grid.back()) return values.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), at);
    const auto hi = static_cast<std::size_t>(it - grid.begin());
    const auto lo = hi - 1;
    const double t = (at - grid[lo]) / (grid[hi] - grid[lo]);
    return values[lo] + t * (values[hi] - values[lo]);
}

namespace {

void check_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) throw InvalidParameter("grid needs at least two points");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw InvalidParameter("grid must be strictly increasing");
    }
}

}  // namespace

GriddedDistribution GriddedDistribution::from_density(std::vector<double> grid,
                                                      std::vector<double> density) {
    check_grid(grid);
    if (density.size() != grid.size()) throw InvalidParameter("grid/density length mismatch");
    for (double d : density) {
        if (!std::isfinite(d) || d < 0.0) throw InvalidParameter("density must be finite and nonnegative");
    }
    const double mass = trapezoid(grid, density);
    if (!(mass > 0.0)) throw InvalidParameter("density has zero mass");
    for (double& d : density) d /= mass;

    GriddedDistribution out;
    out.cumulative = cumulative_trapezoid(grid, density);
    // Pin the end value so the cumulative ends exactly at 1.
    const double end = out.cumulative.back();
    for (double& c : out.cumulative) c /= end;
    out.grid = std::move(grid);
    out.density = std::move(density);
    return out;
}

GriddedDistribution GriddedDistribution::from_cumulative(std::vector<double> grid,
                                                         std::vector<double> cumulative) {
    check_grid(grid);
    if (cumulative.size() != grid.size()) throw InvalidParameter("grid/cumulative length mismatch");
    const std::size_t n = grid.size();
    std::vector<double> density(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i + 1 == n ? n - 1 : i + 1;
        density[i] = std::max(0.0, (cumulative[b] - cumulative[a]) / (grid[b] - grid[a]));
    }
    return from_density(std::move(grid), std::move(density));
}

double GriddedDistribution::mass() const { return trapezoid(grid, density); }

void GriddedDistribution::validate(double tol) const {
    check_grid(grid);
    if (density.size() != grid.size() || cumulative.size() != grid.size()) {
        throw InvalidParameter("gridded distribution length mismatch");
    }
    for (double d : density) {
        if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidParameter("density must be finite and nonnegative");
    }
    if (std::abs(mass() - 1.0) > tol) throw InvalidParameter("density does not integrate to 1");
    if (std::abs(cumulative.front()) > tol || std::abs(cumulative.back() - 1.0) > tol) {
        throw InvalidParameter("cumulative must run from 0 to 1");
    }
    for (std::size_t i = 1; i < cumulative.size(); ++i) {
        if (cumulative[i] < cumulative[i - 1] - tol) throw InvalidParameter("cumulative must be nondecreasing");
    }
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_distribution(std::ostream& out, const GriddedDistribution& dist) {
    out << "price,density\n";
    for (std::size_t i = 0; i < dist.size(); ++i) {
        out << format_number(dist.grid[i]) << ',' << format_number(dist.density[i]) << '\n';
    }
}

GriddedDistribution read_distribution(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInput();
    std::vector<double> grid;
    std::vector<double> density;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw MalformedRow(row, "expected two columns");
        try {
            grid.push_back(std::stod(line.substr(0, comma)));
            density.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw MalformedRow(row, "non-numeric field");
        }
    }
    if (grid.empty()) throw EmptyInput();
    // Keep the density bit-exact as read; only the cumulative is rebuilt.
    GriddedDistribution out;
    out.cumulative = cumulative_trapezoid(grid, density);
    const double end = out.cumulative.back();
    if (!(end > 0.0)) throw InvalidParameter("density has zero mass");
    for (double& c : out.cumulative) c /= end;
    out.grid = std::move(grid);
    out.density = std::move(density);
    out.validate();
    return out;
}

}  // namespace pdisp

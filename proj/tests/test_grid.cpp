#include "doctest.h"

#include "pricedisp/errors.hpp"
#include "pricedisp/grid.hpp"

#include <cmath>
#include <sstream>

using namespace pdisp;

TEST_CASE("uniform grid endpoints and spacing") {
    const auto g = uniform_grid(0.0, 2.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 2.0);
    CHECK(grid_step(g) == doctest::Approx(0.5));
    CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 5), InvalidParameter);
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), InvalidParameter);
}

TEST_CASE("grid_step rejects uneven grids") {
    const std::vector<double> g{0.0, 0.1, 0.3};
    CHECK_THROWS_AS(grid_step(g), InvalidParameter);
}

TEST_CASE("trapezoid is exact for linear integrands") {
    const auto g = uniform_grid(0.0, 1.0, 11);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = 3.0 * g[i] + 1.0;
    CHECK(trapezoid(g, v) == doctest::Approx(2.5).epsilon(1e-14));
    const auto c = cumulative_trapezoid(g, v);
    CHECK(c.front() == 0.0);
    CHECK(c.back() == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(c[5] == doctest::Approx(1.5 * 0.25 + 0.5).epsilon(1e-14));
}

TEST_CASE("interpolate is linear inside and clamped outside") {
    const std::vector<double> g{0.0, 1.0, 2.0};
    const std::vector<double> v{0.0, 10.0, 30.0};
    CHECK(interpolate(g, v, 0.5) == doctest::Approx(5.0));
    CHECK(interpolate(g, v, 1.5) == doctest::Approx(20.0));
    CHECK(interpolate(g, v, -1.0) == 0.0);
    CHECK(interpolate(g, v, 9.0) == 30.0);
}

TEST_CASE("from_density normalizes and builds the cumulative") {
    auto g = uniform_grid(0.0, 1.0, 101);
    std::vector<double> d(g.size(), 5.0);
    const auto dist = GriddedDistribution::from_density(g, d);
    CHECK(dist.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist.cumulative.front() == 0.0);
    CHECK(dist.cumulative.back() == 1.0);
    CHECK(dist.density[50] == doctest::Approx(1.0));
    CHECK_NOTHROW(dist.validate());
}

TEST_CASE("from_density rejects invalid input") {
    auto g = uniform_grid(0.0, 1.0, 3);
    CHECK_THROWS_AS(GriddedDistribution::from_density(g, {1.0, -1.0, 1.0}), InvalidParameter);
    CHECK_THROWS_AS(GriddedDistribution::from_density(g, {0.0, 0.0, 0.0}), InvalidParameter);
    CHECK_THROWS_AS(GriddedDistribution::from_density(g, {1.0, 1.0}), InvalidParameter);
    CHECK_THROWS_AS(GriddedDistribution::from_density({0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}), InvalidParameter);
    CHECK_THROWS_AS(GriddedDistribution::from_density(g, {1.0, NAN, 1.0}), InvalidParameter);
}

TEST_CASE("from_cumulative recovers a linear density") {
    auto g = uniform_grid(0.0, 1.0, 11);
    std::vector<double> c(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) c[i] = g[i] * g[i];
    const auto dist = GriddedDistribution::from_cumulative(g, c);
    CHECK(dist.density[5] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distribution round-trips through text with identical densities") {
    auto g = uniform_grid(0.0, 2.0, 41);
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = std::exp(-std::abs(g[i] - 1.0) / 0.3);
    const auto dist = GriddedDistribution::from_density(g, d);
    std::stringstream ss;
    write_distribution(ss, dist);
    CHECK(ss.str().rfind("price,density\n", 0) == 0);
    const auto back = read_distribution(ss);
    CHECK(back.grid == dist.grid);
    CHECK(back.density == dist.density);
}

TEST_CASE("read_distribution rejects garbage") {
    std::stringstream empty;
    CHECK_THROWS(read_distribution(empty));
    std::stringstream bad("price,density\n0,1\nx,2\n");
    CHECK_THROWS(read_distribution(bad));
}

TEST_CASE("format_number round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5}) {
        CHECK(std::stod(format_number(x)) == x);
    }
}

#include "doctest.h"

#include "pricedisp/dispersion.hpp"
#include "pricedisp/errors.hpp"
#include "pricedisp/estimate.hpp"
#include "pricedisp/matching.hpp"

#include <cmath>

using namespace pdisp;

namespace {

GriddedDistribution laplace_on(const std::vector<double>& g, double mu, double sigma) {
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = laplace_eval(g[i], {mu, sigma, 0.0}).density;
    return GriddedDistribution::from_density(g, d);
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("laplace seed maps to itself") {
    const auto g = uniform_grid(0.0, 2.0, 4001);
    const auto init = laplace_on(g, 1.0, 0.1);
    const auto res = fixed_point_solve(g, init);
    CHECK(sup_diff(res.density.density, init.density) < 1e-3);
    CHECK(res.median == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.scale == doctest::Approx(0.1).epsilon(1e-3));

    // a single application of the map already agrees
    const auto once = fixed_point_map(init);
    CHECK(sup_diff(once.density, init.density) < 1e-3);
}

TEST_CASE("off-centre laplace seed keeps its centre") {
    const auto g = uniform_grid(0.0, 2.0, 2001);
    const auto init = laplace_on(g, 0.8, 0.15);
    const auto res = fixed_point_solve(g, init);
    CHECK(res.median == doctest::Approx(0.8).epsilon(1e-4));
    CHECK(sup_diff(res.density.density, init.density) < 1e-3);
}

TEST_CASE("uniform seed converges to a laplace shape") {
    const auto g = uniform_grid(0.0, 2.0, 4001);
    const auto init = GriddedDistribution::from_density(g, std::vector<double>(g.size(), 1.0));
    const auto res = fixed_point_solve(g, init, 1e-4, 200);
    CHECK(res.iterations <= 200);
    const auto fit = fit_laplace(res.density);
    CHECK(fit.ks < 0.02);
    CHECK(res.median == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("solver output is a fixed point of the solver") {
    const auto g = uniform_grid(0.0, 2.0, 2001);
    const auto init = GriddedDistribution::from_density(g, std::vector<double>(g.size(), 1.0));
    const double tol = 1e-4;
    const auto first = fixed_point_solve(g, init, tol, 200);
    const auto again = fixed_point_solve(g, first.density, tol, 200);
    CHECK(again.iterations == 1);
    CHECK(again.gap < tol);

    const auto lap = fixed_point_solve(g, laplace_on(g, 1.0, 0.2), tol, 200);
    const auto lap2 = fixed_point_solve(g, lap.density, tol, 200);
    CHECK(sup_diff(lap2.density.density, lap.density.density) < tol * 10.0);
}

TEST_CASE("iteration limits and bad input") {
    const auto g = uniform_grid(0.0, 2.0, 401);
    const auto init = GriddedDistribution::from_density(g, std::vector<double>(g.size(), 1.0));
    CHECK_THROWS_AS(fixed_point_solve(g, init, 1e-4, 0), NonConvergence);
    try {
        fixed_point_solve(g, init, 1e-12, 3);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.iterations() == 3);
        CHECK(e.gap() > 1e-12);
        CHECK(std::isfinite(e.gap()));
    }
    CHECK_THROWS_AS(fixed_point_solve(uniform_grid(0.0, 1.0, 401), init), InvalidParameter);
    CHECK_THROWS_AS(fixed_point_solve(g, init, 0.0), InvalidParameter);
}

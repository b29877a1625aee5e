#include "doctest.h"

#include "pricedisp/dispersion.hpp"
#include "pricedisp/errors.hpp"
#include "pricedisp/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace pdisp;

namespace {

double uniform01(std::mt19937_64& rng) {
    // (0, 1): never exactly 0, so logs stay finite
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> laplace_draws(std::size_t n, double mu, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) {
        const double u = uniform01(rng) - 0.5;
        v = mu - sigma * std::copysign(1.0, u) * std::log(1.0 - 2.0 * std::abs(u));
    }
    return out;
}

std::vector<double> lognormal_draws(std::size_t n, const LognormalParams& law, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = law.shift + law.gamma * std::exp(law.omega_width * normal(rng));
    return out;
}

}  // namespace

TEST_CASE("laplace fit of three values") {
    const auto fit = fit_laplace(Sample{{1.0, 2.0, 3.0}, {}});
    CHECK(fit.family == Family::Laplace);
    CHECK(fit.laplace().mu == 2.0);
    CHECK(fit.laplace().sigma == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(fit.n == 3);
    CHECK(fit.ks >= 0.0);
    CHECK(fit.ks <= 1.0);
    CHECK(fit.loglik == doctest::Approx(-3.0 * (std::log(4.0 / 3.0) + 1.0)));
}

TEST_CASE("laplace fit uses the lower median and weights") {
    CHECK(fit_laplace(Sample{{1.0, 2.0, 3.0, 4.0}, {}}).laplace().mu == 2.0);
    const auto w = fit_laplace(Sample{{1.0, 2.0, 3.0}, {1.0, 1.0, 5.0}});
    CHECK(w.laplace().mu == 3.0);
    CHECK(w.laplace().sigma == doctest::Approx(3.0 / 7.0));
}

TEST_CASE("laplace fit errors") {
    CHECK_THROWS_AS(fit_laplace(Sample{{2.0, 2.0, 2.0}, {}}), DegenerateSample);
    CHECK_THROWS_AS(fit_laplace(Sample{{2.0}, {}}), InvalidParameter);
    CHECK_THROWS_AS(fit_laplace(Sample{{}, {}}), InvalidParameter);
    CHECK_THROWS_AS(fit_laplace(Sample{{1.0, 2.0}, {1.0}}), InvalidParameter);
    CHECK_THROWS_AS(fit_laplace(Sample{{1.0, 2.0}, {1.0, 0.0}}), InvalidParameter);
    CHECK_THROWS_AS(fit_laplace(Sample{{1.0, NAN}, {}}), InvalidParameter);
}

TEST_CASE("laplace fit recovers the scale at n = 1e5") {
    const auto fit = fit_laplace(Sample{laplace_draws(100000, 1.0, 0.125, 17), {}});
    CHECK(fit.laplace().sigma >= 0.123);
    CHECK(fit.laplace().sigma <= 0.127);
    CHECK(fit.laplace().mu == doctest::Approx(1.0).epsilon(0.005));
    CHECK(fit.ks < 0.01);
}

TEST_CASE("laplace fit is equivariant under positive affine maps") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    const auto x = laplace_draws(1001, 2.0, 0.3, 4);
    const auto base = fit_laplace(Sample{x, {}});
    for (int k = 0; k < 20; ++k) {
        const double a = u(rng);
        const double b = u(rng);
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
        const auto fit = fit_laplace(Sample{y, {}});
        CHECK(fit.laplace().mu == doctest::Approx(a * base.laplace().mu + b).epsilon(1e-13));
        CHECK(fit.laplace().sigma == doctest::Approx(a * base.laplace().sigma).epsilon(1e-12));
        CHECK(fit.ks == doctest::Approx(base.ks).epsilon(1e-9));
    }
}

TEST_CASE("gridded laplace fit") {
    const auto g = uniform_grid(0.0, 2.0, 4001);
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = laplace_eval(g[i], {1.0, 0.1, 0.0}).density;
    const auto fit = fit_laplace(GriddedDistribution::from_density(g, d));
    CHECK(fit.laplace().mu == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.laplace().sigma == doctest::Approx(0.1).epsilon(1e-3));
    CHECK(fit.ks < 1e-3);
}

TEST_CASE("shifted lognormal with the shift pinned at zero is the plain lognormal fit") {
    const auto x = lognormal_draws(5000, {0.7, 0.4, 0.0}, 8);
    const auto fit = fit_shifted_lognormal(Sample{x, {}}, {0.0, 0.0});
    double m = 0.0;
    for (double v : x) m += std::log(v);
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (std::log(v) - m) * (std::log(v) - m);
    s = std::sqrt(s / static_cast<double>(x.size()));
    CHECK(fit.lognormal().shift == 0.0);
    CHECK(fit.lognormal().gamma == doctest::Approx(std::exp(m)).epsilon(1e-12));
    CHECK(fit.lognormal().omega_width == doctest::Approx(s).epsilon(1e-12));
    CHECK(fit.loglik == doctest::Approx(shifted_lognormal_profile(Sample{x, {}}, 0.0)));
}

TEST_CASE("shifted lognormal recovery at the dispersion-statistic parameters") {
    const LognormalParams truth{0.41, 0.245, 0.0245};
    const auto fit = fit_shifted_lognormal(Sample{lognormal_draws(100000, truth, 5), {}});
    CHECK(fit.family == Family::ShiftedLognormal);
    CHECK(fit.lognormal().gamma == doctest::Approx(0.41).epsilon(0.05));
    CHECK(fit.lognormal().omega_width == doctest::Approx(0.245).epsilon(0.05));
    // the shift is weakly identified: its sampling sd at n = 1e5 is about 0.005
    CHECK(std::abs(fit.lognormal().shift - 0.0245) < 0.02);
    CHECK(fit.ks < 0.01);
}

TEST_CASE("zero true shift is found in most runs") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = lognormal_draws(10000, {1.0, 1.0, 0.0}, 100 + seed);
        std::vector<double> sorted = x;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        const double median = sorted[sorted.size() / 2];
        const auto fit = fit_shifted_lognormal(Sample{x, {}});
        if (fit.lognormal().shift < 0.005 * median) ++hits;
    }
    CHECK(hits >= 18);
}

TEST_CASE("shift bounds") {
    const Sample s{{0.5, 0.7, 1.0, 1.3}, {}};
    CHECK_THROWS_AS(fit_shifted_lognormal(s, {0.5, 1.0}), EmptyFeasibleShift);
    CHECK_THROWS_AS(fit_shifted_lognormal(s, {0.2, 0.1}), EmptyFeasibleShift);
    const auto fit = fit_shifted_lognormal(s, {0.1, 10.0});
    CHECK(fit.lognormal().shift >= 0.1);
    CHECK(fit.lognormal().shift <= 0.1 + 0.99 * 0.4);
    CHECK_THROWS_AS(fit_shifted_lognormal(Sample{{1.0, 2.0}, {}}), InvalidParameter);
}

TEST_CASE("estimates tighten as the sample grows") {
    const LognormalParams truth{0.41, 0.245, 0.0245};
    double lap_small = 0.0, lap_big = 0.0;
    double g_small = 0.0, g_big = 0.0, o_small = 0.0, o_big = 0.0, s_small = 0.0, s_big = 0.0;
    auto sq = [](double a) { return a * a; };
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        lap_small += sq(fit_laplace(Sample{laplace_draws(10000, 1.0, 0.125, 500 + seed), {}}).laplace().sigma - 0.125);
        lap_big += sq(fit_laplace(Sample{laplace_draws(1000000, 1.0, 0.125, 600 + seed), {}}).laplace().sigma - 0.125);

        const auto a = fit_shifted_lognormal(Sample{lognormal_draws(10000, truth, 700 + seed), {}}).lognormal();
        const auto b = fit_shifted_lognormal(Sample{lognormal_draws(1000000, truth, 800 + seed), {}}).lognormal();
        g_small += sq(a.gamma - truth.gamma);
        g_big += sq(b.gamma - truth.gamma);
        o_small += sq(a.omega_width - truth.omega_width);
        o_big += sq(b.omega_width - truth.omega_width);
        s_small += sq(a.shift - truth.shift);
        s_big += sq(b.shift - truth.shift);
    }
    CHECK(std::sqrt(lap_big) < 0.5 * std::sqrt(lap_small));
    CHECK(std::sqrt(g_big) < 0.5 * std::sqrt(g_small));
    CHECK(std::sqrt(o_big) < 0.5 * std::sqrt(o_small));
    CHECK(std::sqrt(s_big) < 0.5 * std::sqrt(s_small));
}

TEST_CASE("ks distance of exact quantiles and of a single point") {
    const std::size_t n = 200;
    const LaplaceParams lp{1.0, 0.2, 0.0};
    Sample q;
    for (std::size_t i = 1; i <= n; ++i) {
        const double u = (static_cast<double>(i) - 0.5) / static_cast<double>(n);
        q.values.push_back(u < 0.5 ? lp.mu + lp.sigma * std::log(2.0 * u) : lp.mu - lp.sigma * std::log(2.0 - 2.0 * u));
    }
    auto cdf = [&](double x) { return laplace_eval(x, lp).cumulative; };
    CHECK(ks_statistic(q, cdf) == doctest::Approx(0.5 / n).epsilon(1e-9));
    CHECK(ks_statistic(Sample{{1.0}, {}}, cdf) == doctest::Approx(0.5));
    CHECK_THROWS_AS(ks_statistic(Sample{}, cdf), InvalidParameter);
}

TEST_CASE("ks distance below the asymptotic critical value in most repetitions") {
    const LaplaceParams lp{1.0, 0.125, 0.0};
    auto cdf = [&](double x) { return laplace_eval(x, lp).cumulative; };
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        if (ks_statistic(Sample{laplace_draws(10000, 1.0, 0.125, 9000 + seed), {}}, cdf) < 1.36 / 100.0) ++ok;
    }
    CHECK(ok >= 95);
}

TEST_CASE("ks distance is unchanged by increasing transforms") {
    const auto x = laplace_draws(3000, 1.0, 0.2, 12);
    const LaplaceParams lp{1.02, 0.19, 0.0};
    auto cdf = [&](double v) { return laplace_eval(v, lp).cumulative; };
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(3.0 * x[i]);
    const double a = ks_statistic(Sample{x, {}}, cdf);
    const double b = ks_statistic(Sample{y, {}}, [&](double v) { return cdf(std::log(v) / 3.0); });
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("histogram small cases") {
    const auto g = uniform_grid(0.0, 1.0, 11);
    const auto one = histogram(Sample{{0.5}, {}}, g);
    CHECK(one.distribution.density[5] == doctest::Approx(10.0));
    CHECK(one.clipped_fraction == 0.0);

    const auto two = histogram(Sample{{0.3, 0.7}, {}}, g);
    CHECK(two.distribution.density[3] == doctest::Approx(two.distribution.density[7]));
    CHECK(two.distribution.density[3] > 0.0);
    CHECK(two.distribution.mass() == doctest::Approx(1.0).epsilon(1e-9));

    const auto clipped = histogram(Sample{{0.5, 5.0, 7.0, 0.2}, {1.0, 1.0, 1.0, 1.0}}, g);
    CHECK(clipped.clipped_fraction == doctest::Approx(0.5));
    CHECK_THROWS_AS(histogram(Sample{{5.0}, {}}, g), InvalidParameter);
}

TEST_CASE("histogram of many laplace draws tracks the density") {
    const LaplaceParams lp{1.0, 0.25, 0.0};
    const auto g = uniform_grid(-2.0, 4.0, 601);
    const auto h = histogram(Sample{laplace_draws(1000000, 1.0, 0.25, 21), {}}, g);
    double gap = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        gap = std::max(gap, std::abs(h.distribution.density[i] - laplace_eval(g[i], lp).density));
    }
    CHECK(gap < 0.02 * 2.0);
    CHECK(h.distribution.mass() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit record round-trips") {
    FitResult a = fit_laplace(Sample{{1.0, 2.0, 3.5}, {}});
    std::stringstream ss;
    write_fit_result(ss, a);
    const auto b = read_fit_result(ss);
    CHECK(b.family == Family::Laplace);
    CHECK(b.laplace().mu == a.laplace().mu);
    CHECK(b.laplace().sigma == a.laplace().sigma);
    CHECK(b.loglik == a.loglik);
    CHECK(b.ks == a.ks);
    CHECK(b.n == a.n);

    FitResult c;
    c.family = Family::ShiftedLognormal;
    c.params = LognormalParams{0.41, 0.245, 0.0245};
    c.n = 7;
    std::stringstream s2;
    write_fit_result(s2, c);
    const auto d = read_fit_result(s2);
    CHECK(d.lognormal().gamma == 0.41);
    CHECK(d.lognormal().shift == 0.0245);
    CHECK(parse_family("shifted-lognormal") == Family::ShiftedLognormal);
    CHECK_THROWS_AS(parse_family("gamma"), InvalidParameter);
    std::stringstream broken("family=laplace\nmu=1\n");
    CHECK_THROWS_AS(read_fit_result(broken), InputError);
}

#include "pricedisp/estimate.hpp"

#include "pricedisp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>

namespace pdisp {

double Sample::total_weight() const {
    if (weights.empty()) return static_cast<double>(values.size());
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void Sample::validate() const {
    if (values.empty()) throw InvalidParameter("sample is empty");
    if (!weights.empty() && weights.size() != values.size()) {
        throw InvalidParameter("weights must match values");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw InvalidParameter("sample values must be finite");
        if (!weights.empty() && !(weights[i] > 0.0 && std::isfinite(weights[i]))) {
            throw InvalidParameter("weights must be positive");
        }
    }
}

std::string to_string(Family family) {
    return family == Family::Laplace ? "laplace" : "shifted-lognormal";
}

Family parse_family(const std::string& name) {
    if (name == "laplace") return Family::Laplace;
    if (name == "shifted-lognormal" || name == "lognormal") return Family::ShiftedLognormal;
    throw InvalidParameter("unknown fit family '" + name + "'");
}

double FitResult::cdf(double x) const {
    return family == Family::Laplace ? laplace_eval(x, laplace()).cumulative
                                     : lognormal_eval(x, lognormal()).cumulative;
}

double FitResult::pdf(double x) const {
    return family == Family::Laplace ? laplace_eval(x, laplace()).density
                                     : lognormal_eval(x, lognormal()).density;
}

void write_fit_result(std::ostream& out, const FitResult& fit) {
    out << "family=" << to_string(fit.family) << '\n';
    if (fit.family == Family::Laplace) {
        const auto& p = fit.laplace();
        out << "mu=" << format_number(p.mu) << '\n'
            << "sigma=" << format_number(p.sigma) << '\n'
            << "floor=" << format_number(p.floor) << '\n';
    } else {
        const auto& p = fit.lognormal();
        out << "gamma=" << format_number(p.gamma) << '\n'
            << "omega=" << format_number(p.omega_width) << '\n'
            << "shift=" << format_number(p.shift) << '\n';
    }
    out << "loglik=" << format_number(fit.loglik) << '\n'
        << "ks=" << format_number(fit.ks) << '\n'
        << "n=" << fit.n << '\n';
}

FitResult read_fit_result(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto num = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw InputError("fit record lacks '" + key + "'");
        return std::stod(it->second);
    };
    if (!kv.contains("family")) throw InputError("fit record lacks 'family'");
    FitResult fit;
    fit.family = parse_family(kv["family"]);
    if (fit.family == Family::Laplace) {
        fit.params = LaplaceParams{num("mu"), num("sigma"), num("floor")};
    } else {
        fit.params = LognormalParams{num("gamma"), num("omega"), num("shift")};
    }
    fit.loglik = num("loglik");
    fit.ks = num("ks");
    fit.n = static_cast<std::size_t>(num("n"));
    return fit;
}

double weighted_lower_median(const Sample& sample) {
    sample.validate();
    std::vector<std::size_t> order(sample.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sample.values[a] < sample.values[b]; });
    const double half = 0.5 * sample.total_weight();
    double acc = 0.0;
    for (std::size_t idx : order) {
        acc += sample.weight(idx);
        if (acc >= half) return sample.values[idx];
    }
    return sample.values[order.back()];
}

namespace {

void require_positive(const Sample& sample) {
    for (double v : sample.values) {
        if (!(v > 0.0)) throw InvalidParameter("sample values must be positive");
    }
}

}  // namespace

FitResult fit_laplace(const Sample& sample) {
    sample.validate();
    if (sample.size() < 2) throw InvalidParameter("Laplace fit needs at least two values");
    const double mu = weighted_lower_median(sample);
    const double w = sample.total_weight();
    double dev = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) dev += sample.weight(i) * std::abs(sample.values[i] - mu);
    const double sigma = dev / w;
    if (!(sigma > 0.0)) throw DegenerateSample();

    FitResult fit;
    fit.family = Family::Laplace;
    const LaplaceParams params{mu, sigma, 0.0};
    fit.params = params;
    fit.loglik = -w * (std::log(2.0 * sigma) + 1.0);
    fit.n = sample.size();
    fit.ks = ks_statistic(sample, [&](double x) { return laplace_eval(x, params).cumulative; });
    return fit;
}

FitResult fit_laplace(const GriddedDistribution& dist) {
    dist.validate();
    const auto& g = dist.grid;
    double mu = g.back();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (dist.cumulative[i] >= 0.5) {
            mu = i == 0 ? g[0]
                        : g[i - 1] + (0.5 - dist.cumulative[i - 1]) /
                                         (dist.cumulative[i] - dist.cumulative[i - 1]) * (g[i] - g[i - 1]);
            break;
        }
    }
    std::vector<double> dev(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) dev[i] = std::abs(g[i] - mu) * dist.density[i];
    const double sigma = trapezoid(g, dev);
    if (!(sigma > 0.0)) throw DegenerateSample();

    FitResult fit;
    fit.family = Family::Laplace;
    const LaplaceParams params{mu, sigma, std::max(0.0, std::min(mu, g.front()))};
    fit.params = params;
    std::vector<double> ll(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        ll[i] = dist.density[i] * (-std::log(2.0 * sigma) - std::abs(g[i] - mu) / sigma);
    }
    fit.loglik = trapezoid(g, ll);
    fit.n = g.size();
    fit.ks = ks_statistic(dist, [&](double x) { return laplace_eval(x, params).cumulative; });
    return fit;
}

namespace {

struct LogMoments {
    double mean = 0.0;
    double std_dev = 0.0;
    double sum_log = 0.0;  // weighted sum of ln(x - shift)
};

LogMoments log_moments(const Sample& s, double shift) {
    // One pass, accumulated about a reference point to limit cancellation.
    const double ref = std::log(s.values[0] - shift);
    double sw = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double wi = s.weight(i);
        const double d = std::log(s.values[i] - shift) - ref;
        sw += wi;
        s1 += wi * d;
        s2 += wi * d * d;
    }
    LogMoments m;
    const double mean_d = s1 / sw;
    m.mean = ref + mean_d;
    m.sum_log = sw * m.mean;
    m.std_dev = std::sqrt(std::max(0.0, s2 / sw - mean_d * mean_d));
    return m;
}

double profile_from(const LogMoments& m, double w) {
    if (!(m.std_dev > 0.0)) return -std::numeric_limits<double>::infinity();
    return -m.sum_log - w * std::log(m.std_dev) - 0.5 * w * std::log(2.0 * std::numbers::pi) - 0.5 * w;
}

}  // namespace

double shifted_lognormal_profile(const Sample& sample, double shift) {
    return profile_from(log_moments(sample, shift), sample.total_weight());
}

FitResult fit_shifted_lognormal(const Sample& sample, const ShiftBounds& bounds, const ShiftSearch& search) {
    sample.validate();
    require_positive(sample);
    if (sample.size() < 3) throw InvalidParameter("shifted-lognormal fit needs at least three values");
    if (!(bounds.lower >= 0.0)) throw InvalidParameter("shift lower bound must be nonnegative");
    if (search.candidates < 3) throw InvalidParameter("need at least three shift candidates");

    const double min_x = *std::min_element(sample.values.begin(), sample.values.end());
    if (bounds.lower >= min_x) throw EmptyFeasibleShift();
    const double lo = bounds.lower;
    const double hi = std::min(bounds.upper, lo + 0.99 * (min_x - lo));
    if (hi < lo) throw EmptyFeasibleShift();

    const double w = sample.total_weight();
    auto profile = [&](double c) { return profile_from(log_moments(sample, c), w); };

    double best = lo;
    if (hi > lo) {
        const std::size_t k = search.candidates;
        std::vector<double> cand(k);
        std::vector<double> ll(k);
        std::size_t arg = 0;
        for (std::size_t j = 0; j < k; ++j) {
            cand[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(k - 1);
            ll[j] = profile(cand[j]);
            if (ll[j] > ll[arg]) arg = j;
        }
        double a = cand[arg == 0 ? 0 : arg - 1];
        double b = cand[arg + 1 == k ? k - 1 : arg + 1];
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = profile(x1);
        double f2 = profile(x2);
        const double floor_tol = search.rel_tol * min_x;
        while (b - a > std::max(search.rel_tol * std::abs(0.5 * (a + b)), floor_tol)) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = profile(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = profile(x1);
            }
        }
        best = 0.5 * (a + b);
        // The grid winner can beat the refined interior point at a bracket edge.
        if (ll[arg] > profile(best)) best = cand[arg];
    }

    const LogMoments m = log_moments(sample, best);
    if (!(m.std_dev > 0.0)) throw DegenerateSample();

    FitResult fit;
    fit.family = Family::ShiftedLognormal;
    const LognormalParams params{std::exp(m.mean), m.std_dev, best};
    fit.params = params;
    fit.loglik = profile_from(m, w);
    fit.n = sample.size();
    fit.ks = ks_statistic(sample, [&](double x) { return lognormal_eval(x, params).cumulative; });
    return fit;
}

double ks_statistic(const Sample& sample, const std::function<double(double)>& cdf) {
    sample.validate();
    std::vector<std::size_t> order(sample.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sample.values[a] < sample.values[b]; });
    const double w = sample.total_weight();
    double acc = 0.0;
    double d = 0.0;
    for (std::size_t idx : order) {
        const double before = acc / w;
        acc += sample.weight(idx);
        const double after = acc / w;
        const double f = cdf(sample.values[idx]);
        d = std::max({d, std::abs(after - f), std::abs(before - f)});
    }
    return std::min(d, 1.0);
}

double ks_statistic(const GriddedDistribution& dist, const std::function<double(double)>& cdf) {
    double d = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        d = std::max(d, std::abs(dist.cumulative[i] - cdf(dist.grid[i])));
    }
    return std::min(d, 1.0);
}

Histogram histogram(const Sample& sample, const std::vector<double>& grid) {
    sample.validate();
    const double h = grid_step(grid);
    const std::size_t n = grid.size();
    std::vector<double> mass(n, 0.0);
    double clipped = 0.0;
    const double left_edge = grid.front() - 0.5 * h;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double pos = std::floor((sample.values[i] - left_edge) / h);
        if (pos < 0.0 || pos >= static_cast<double>(n)) {
            clipped += sample.weight(i);
            continue;
        }
        mass[static_cast<std::size_t>(pos)] += sample.weight(i);
    }
    const double w = sample.total_weight();
    if (clipped >= w) throw InvalidParameter("sample lies entirely outside the grid");
    for (double& m : mass) m /= h;
    return {GriddedDistribution::from_density(grid, std::move(mass)), clipped / w};
}

}  // namespace pdisp

#pragma once

// Maximum-likelihood fits of the dispersion laws and goodness-of-fit checks.

#include "pricedisp/dispersion.hpp"
#include "pricedisp/grid.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace pdisp {

/// Observed values with optional positive weights (empty = all ones).
struct Sample {
    std::vector<double> values;
    std::vector<double> weights;

    std::size_t size() const { return values.size(); }
    double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
    double total_weight() const;
    void validate() const;
};

enum class Family { Laplace, ShiftedLognormal };

std::string to_string(Family family);
Family parse_family(const std::string& name);

struct FitResult {
    Family family = Family::Laplace;
    std::variant<LaplaceParams, LognormalParams> params;
    double loglik = 0.0;
    double ks = 0.0;
    std::size_t n = 0;

    const LaplaceParams& laplace() const { return std::get<LaplaceParams>(params); }
    const LognormalParams& lognormal() const { return std::get<LognormalParams>(params); }
    double cdf(double x) const;
    double pdf(double x) const;
};

/// family, parameters, loglik, ks, n as `key=value` lines.
void write_fit_result(std::ostream& out, const FitResult& fit);
FitResult read_fit_result(std::istream& in);

/// Weighted lower median and mean absolute deviation about it.
/// Throws DegenerateSample when the deviation is zero.
FitResult fit_laplace(const Sample& sample);

/// Laplace fit to a tabulated density: median of its cumulative and the
/// mean absolute deviation about it; KS is measured on the grid.
FitResult fit_laplace(const GriddedDistribution& dist);

struct ShiftBounds {
    double lower = 0.0;
    /// Upper end of the search; clipped to lower + 0.99 (min(sample) - lower).
    double upper = std::numeric_limits<double>::infinity();
};

struct ShiftSearch {
    std::size_t candidates = 64;
    double rel_tol = 1e-6;
};

/// Profile likelihood over the shift: for each shift the log-space mean and
/// standard deviation are closed-form. Grid scan then golden-section.
FitResult fit_shifted_lognormal(const Sample& sample, const ShiftBounds& bounds = {},
                                const ShiftSearch& search = {});

/// Profile log-likelihood at a given shift (exposed for tests).
double shifted_lognormal_profile(const Sample& sample, double shift);

/// sup_i max(|F_i - F(x_i)|, |F_{i-1} - F(x_i)|) over the sorted (weighted)
/// empirical cumulative F_i.
double ks_statistic(const Sample& sample, const std::function<double(double)>& cdf);

/// max over the grid of |cumulative - cdf|.
double ks_statistic(const GriddedDistribution& dist, const std::function<double(double)>& cdf);

struct Histogram {
    GriddedDistribution distribution;
    double clipped_fraction = 0.0;  // weight that fell outside the grid's bins
};

/// Weighted histogram with one bin centred on each point of a uniform grid.
Histogram histogram(const Sample& sample, const std::vector<double>& grid);

double weighted_lower_median(const Sample& sample);

}  // namespace pdisp

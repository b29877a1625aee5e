#include "pricedisp/commands.hpp"

#include "pricedisp/dataio.hpp"
#include "pricedisp/dispersion.hpp"
#include "pricedisp/errors.hpp"
#include "pricedisp/estimate.hpp"
#include "pricedisp/grid.hpp"
#include "pricedisp/matching.hpp"
#include "pricedisp/meanprice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pdisp {

namespace fs = std::filesystem;

namespace {

using Artifacts = std::vector<std::pair<std::string, std::string>>;  // name, content

std::vector<double> config_grid(const Config& cfg, double lo, double hi, std::uint64_t n) {
    return uniform_grid(cfg.get_double("grid.min", lo), cfg.get_double("grid.max", hi),
                        cfg.get_uint("grid.points", n));
}

std::string kv(const std::string& key, double value) { return key + " = " + format_number(value) + "\n"; }
std::string kv(const std::string& key, std::uint64_t value) { return key + " = " + std::to_string(value) + "\n"; }
std::string kv(const std::string& key, const std::string& value) { return key + " = " + value + "\n"; }

std::ifstream open_input(const std::string& path) {
    if (path.empty()) throw InputError("no input file configured");
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file '" + path + "'");
    return in;
}

Artifacts simulate_kinetic(const Config& cfg, std::uint64_t seed) {
    auto grid = config_grid(cfg, 0.0, 2.0, 401);

    InflowSpec inflow;
    inflow.shape = parse_inflow_shape(cfg.get_string("inflow.shape", "reference-laplace"));
    inflow.demand_rate = cfg.get_double("inflow.demand_rate", 1e4);
    inflow.supply_rate = cfg.get_double("inflow.supply_rate", inflow.demand_rate);
    if (inflow.shape == InflowShape::Exponential) {
        inflow.shape_a = cfg.get_double("inflow.demand_decay", 0.25);
        inflow.shape_b = cfg.get_double("inflow.supply_growth", 0.25);
    } else {
        inflow.shape_a = cfg.get_double("inflow.center", 1.0);
        inflow.shape_b = cfg.get_double("inflow.scale", 0.125);
    }
    inflow.jitter = cfg.get_double("inflow.jitter", 0.0);
    inflow.validate();

    const double eta = cfg.get_double("kinetic.eta", 1.0);
    const double dt = cfg.get_double("kinetic.dt", 0.01);
    const double horizon = cfg.get_double("kinetic.horizon", 20.0);
    const double withdrawal = cfg.get_double("kinetic.withdrawal_rate", 0.0);
    const double x0 = cfg.get_double("kinetic.initial_demand", 1.0);
    const double z0 = cfg.get_double("kinetic.initial_supply", x0);
    RunOptions opts;
    opts.sample_every = cfg.get_uint("kinetic.sample_every", 100);
    opts.stability_bound = cfg.get_double("kinetic.stability_bound", 0.1);

    const MarketState initial = MarketState::uniform(grid, eta, x0, z0, withdrawal);
    const SimResult sim = run(initial, inflow, dt, horizon, seed, opts);
    const FitResult fit = fit_laplace(sim.sales_histogram);

    Artifacts out;
    std::ostringstream hist;
    write_distribution(hist, sim.sales_histogram);
    out.emplace_back("sales_histogram.csv", hist.str());
    std::ostringstream series;
    write_time_series(series, sim.series);
    out.emplace_back("time_series.csv", series.str());

    std::string summary;
    summary += kv("transacted", sim.event_count);
    summary += kv("cap_binds", sim.cap_binds);
    summary += kv("final_x_total", sim.final_state.x_total());
    summary += kv("final_z_total", sim.final_state.z_total());
    summary += kv("laplace_mu", fit.laplace().mu);
    summary += kv("laplace_sigma", fit.laplace().sigma);
    summary += kv("laplace_ks", fit.ks);
    out.emplace_back("summary.txt", summary);
    return out;
}

Artifacts simulate_meanprice(const Config& cfg, std::uint64_t seed) {
    SdeParams p;
    p.omega0 = cfg.get_double("sde.omega0", 1.0);
    p.noise_amp = cfg.get_double("sde.noise_amp", 0.03);
    p.walras_gain = cfg.get_double("sde.walras_gain", 1.0);
    p.dt = cfg.get_double("sde.dt", 1e-3);
    p.horizon = cfg.get_double("sde.horizon", 1.0);
    p.n_paths = cfg.get_uint("sde.paths", 1000);
    p.store_every = cfg.get_uint("sde.store_every", 0);
    p.threads = static_cast<unsigned>(cfg.get_uint("sde.threads", 1));
    p.seed = seed;
    const double floor = cfg.get_double("sde.floor", 0.0);

    const EnsembleResult ens = simulate_mean_price(p);

    Artifacts out;
    std::ostringstream terminal;
    write_terminal_samples(terminal, ens);
    out.emplace_back("terminal_samples.csv", terminal.str());
    if (p.store_every > 0) {
        std::ostringstream paths;
        write_paths(paths, ens);
        out.emplace_back("paths.csv", paths.str());
    }

    std::string summary;
    summary += kv("log_mean", ens.log_mean);
    summary += kv("log_std", ens.log_std);
    if (p.noise_amp > 0.0) {
        const LognormalParams law = implied_lognormal(p, floor);
        Sample s{ens.terminal, {}};
        const double ks = ks_statistic(s, [&](double w) { return lognormal_eval(w, {law.gamma, law.omega_width, 0.0}).cumulative; });
        summary += kv("implied_gamma", law.gamma);
        summary += kv("implied_omega", law.omega_width);
        summary += kv("implied_shift", law.shift);
        summary += kv("ks_vs_implied", ks);
    }
    out.emplace_back("summary.txt", summary);
    return out;
}

Artifacts fixed_point(const Config& cfg, std::uint64_t) {
    auto grid = config_grid(cfg, 0.0, 2.0, 4001);
    const std::string init_kind = cfg.get_string("fixed_point.init", "laplace");
    std::vector<double> init_density(grid.size());
    if (init_kind == "laplace") {
        LaplaceParams lp{cfg.get_double("fixed_point.init_mu", 1.0), cfg.get_double("fixed_point.init_sigma", 0.1), 0.0};
        lp.floor = std::min(0.0, lp.mu);
        lp.validate();
        for (std::size_t i = 0; i < grid.size(); ++i) init_density[i] = laplace_eval(grid[i], lp).density;
    } else if (init_kind == "uniform") {
        std::fill(init_density.begin(), init_density.end(), 1.0);
    } else {
        throw InvalidParameter("unknown fixed_point.init '" + init_kind + "'");
    }
    const double tol = cfg.get_double("fixed_point.tol", 1e-4);
    const std::uint64_t max_iter = cfg.get_uint("fixed_point.max_iter", 200);
    const auto init = GriddedDistribution::from_density(grid, std::move(init_density));
    const FixedPointResult res = fixed_point_solve(grid, init, tol, max_iter);
    const FitResult fit = fit_laplace(res.density);

    Artifacts out;
    std::ostringstream dist;
    write_distribution(dist, res.density);
    out.emplace_back("fixed_point.csv", dist.str());
    std::string summary;
    summary += kv("iterations", static_cast<std::uint64_t>(res.iterations));
    summary += kv("gap", res.gap);
    summary += kv("median", res.median);
    summary += kv("scale", res.scale);
    summary += kv("laplace_mu", fit.laplace().mu);
    summary += kv("laplace_sigma", fit.laplace().sigma);
    summary += kv("laplace_ks", fit.ks);
    out.emplace_back("summary.txt", summary);
    return out;
}

Artifacts mixture(const Config& cfg, std::uint64_t) {
    auto grid = config_grid(cfg, 0.0, 3.0, 301);
    LognormalParams law{cfg.get_double("mixture.gamma", 0.41), cfg.get_double("mixture.omega_width", 0.245),
                        cfg.get_double("mixture.shift", 0.0)};
    law.validate();
    const double floor = cfg.get_double("mixture.floor", 0.0);
    MixtureOptions opts;
    opts.conditional_scale = cfg.get_double("mixture.conditional_scale", 1.0);
    opts.rel_tol = cfg.get_double("mixture.rel_tol", 1e-6);

    std::string table = "price,mixture_density,lognormal_density\n";
    for (double p : grid) {
        const double m = mixture_density(p, law, floor, opts);
        const double ln = lognormal_eval(p - floor, law).density;
        table += format_number(p) + "," + format_number(m) + "," + format_number(ln) + "\n";
    }
    return {{"mixture.csv", table}};
}

Artifacts fit(const Config& cfg, std::uint64_t) {
    const std::string path = cfg.get_string("fit.input", "");
    const Family family = parse_family(cfg.get_string("fit.family", "laplace"));
    const std::uint64_t bins = cfg.get_uint("fit.bins", 201);
    const double shift_min = cfg.get_double("fit.shift_min", 0.0);
    const double shift_max = cfg.get_double("fit.shift_max", std::numeric_limits<double>::infinity());
    if (bins < 2) throw InvalidParameter("fit.bins must be at least 2");

    auto in = open_input(path);
    const Sample sample = read_sample_table(in);
    sample.validate();

    const FitResult result =
        family == Family::Laplace ? fit_laplace(sample) : fit_shifted_lognormal(sample, {shift_min, shift_max});

    const auto [lo_it, hi_it] = std::minmax_element(sample.values.begin(), sample.values.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (hi <= lo) hi = lo + 1.0;
    // pad by half a bin so the extreme values land inside the end bins
    const double pad = 0.5 * (hi - lo) / static_cast<double>(bins - 1);
    const auto grid = uniform_grid(lo - pad, hi + pad, bins);
    const Histogram h = histogram(sample, grid);

    std::string series = "price,empirical_density,fitted_density\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        series += format_number(grid[i]) + "," + format_number(h.distribution.density[i]) + "," +
                  format_number(result.pdf(grid[i])) + "\n";
    }
    std::ostringstream rec;
    write_fit_result(rec, result);
    return {{"fit_result.txt", rec.str()}, {"fit_series.csv", series}};
}

Artifacts normalize(const Config& cfg, std::uint64_t) {
    const std::string path = cfg.get_string("normalize.input", "");
    const Grouping grouping = parse_grouping(cfg.get_string("normalize.grouping", "good+market+quarter"));
    const bool weighted = cfg.get_bool("normalize.weighted", true);
    auto in = open_input(path);
    const TransactionTable table = load_transactions(in);
    const auto groups = normalize_prices(table, grouping, weighted);
    const StdDevPool pool = group_std_devs(groups);

    std::ostringstream norm;
    write_normalized(norm, groups);
    std::string stds = "group_key,std_dev\n";
    for (std::size_t i = 0; i < pool.keys.size(); ++i) {
        stds += pool.keys[i] + "," + format_number(pool.sample.values[i]) + "\n";
    }
    std::string summary;
    summary += kv("transactions", static_cast<std::uint64_t>(table.size()));
    summary += kv("groups", static_cast<std::uint64_t>(groups.size()));
    summary += kv("skipped_singletons", static_cast<std::uint64_t>(pool.skipped));
    summary += kv("grouping", to_string(grouping));
    return {{"normalized.csv", norm.str()}, {"group_std.csv", stds}, {"summary.txt", summary}};
}

using Handler = Artifacts (*)(const Config&, std::uint64_t);

Handler find_handler(const std::string& name) {
    if (name == "simulate-kinetic") return simulate_kinetic;
    if (name == "simulate-meanprice") return simulate_meanprice;
    if (name == "fixed-point") return fixed_point;
    if (name == "mixture") return mixture;
    if (name == "fit") return fit;
    if (name == "normalize") return normalize;
    throw InvalidParameter("unknown command '" + name + "'");
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"simulate-kinetic", "simulate-meanprice", "fixed-point",
                                                "mixture", "fit", "normalize"};
    return names;
}

void write_atomically(const fs::path& dir, const std::string& name, const std::string& content) {
    const fs::path target = dir / name;
    const fs::path tmp = dir / (name + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw InputError("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::vector<std::string> dispatch(const RunRequest& request) {
    const Handler handler = find_handler(request.command);
    const Config& cfg = request.config;
    const std::uint64_t config_seed = cfg.get_uint("seed", 0);
    const std::uint64_t seed = request.seed.value_or(config_seed);

    // Validate and compute everything before touching the output directory.
    const Artifacts artifacts = handler(cfg, seed);

    std::string manifest;
    manifest += kv("command", request.command);
    manifest += kv("version", std::string(kVersion));
    manifest += kv("seed", seed);
    manifest += "\n[config]\n";
    for (const auto& [k, v] : cfg.entries()) {
        if (k != "seed") manifest += k + " = " + v + "\n";
    }
    manifest += "\n[artifacts]\n";
    for (std::size_t i = 0; i < artifacts.size(); ++i) {
        manifest += "file" + std::to_string(i) + " = " + artifacts[i].first + "\n";
    }

    fs::create_directories(request.out_dir);
    std::vector<std::string> names;
    for (const auto& [name, content] : artifacts) {
        write_atomically(request.out_dir, name, content);
        names.push_back(name);
    }
    write_atomically(request.out_dir, "manifest.txt", manifest);
    names.emplace_back("manifest.txt");
    return names;
}

int execute(const RunRequest& request, std::ostream& err) {
    try {
        dispatch(request);
        for (const auto& key : request.config.unused_keys()) {
            err << "warning: config key '" << key << "' was not used by " << request.command << '\n';
        }
        return kExitOk;
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << '\n';
        return kExitModel;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitModel;
    }
}

}  // namespace pdisp

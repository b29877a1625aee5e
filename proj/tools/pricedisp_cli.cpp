#include "pricedisp/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Price dispersion experiments: kinetic market, mean-price noise, fits."};
    app.set_version_flag("--version", std::string(pdisp::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    for (const auto& name : pdisp::command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config,-c", config_path, "key = value configuration file");
        sub->add_option("--seed,-s", seed, "master seed (overrides the config)");
        sub->add_option("--out,-o", out_dir, "output directory")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return pdisp::kExitInput;
    }

    pdisp::RunRequest request;
    request.command = app.get_subcommands().front()->get_name();
    request.out_dir = out_dir;
    const auto* sub = app.get_subcommands().front();
    if (sub->count("--seed") > 0) request.seed = seed;
    try {
        if (!config_path.empty()) request.config = pdisp::Config::load(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return pdisp::kExitInput;
    }
    return pdisp::execute(request, std::cerr);
}

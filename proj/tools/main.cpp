#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    using namespace blochlab::cli;

    CLI::App app{"Bloch oscillations of wavepackets in a tilted lattice"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "JSON run configuration")->required();
        sub->add_option("-o,--out", out_dir, "Output directory (overrides output_dir)");
        sub->add_option("--override", overrides, "key.sub=value override, repeatable")->take_all();
    };

    auto* bands = app.add_subcommand("bands", "Solve and store the band structure");
    auto* trace = app.add_subcommand("trace", "Closed-form observables on the tau grid");
    auto* recon = app.add_subcommand("reconstruct", "Position-space snapshots of the wavepacket");
    auto* validate = app.add_subcommand("validate", "Run the internal consistency checks");
    for (auto* sub : {bands, trace, recon, validate}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    return guarded(
        [&]() -> int {
            RunConfig cfg = load_config(config_path, overrides);
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            std::filesystem::create_directories(cfg.output_dir);
            if (*bands) return cmd_bands(cfg, std::cout);
            if (*trace) return cmd_trace(cfg, std::cout);
            if (*recon) return cmd_reconstruct(cfg, std::cout);
            return cmd_validate(cfg, std::cout);
        },
        std::cerr);
}

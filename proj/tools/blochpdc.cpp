// Command-line front end. Every flag can also be set through the environment
// with the BLOCHPDC_ prefix (BLOCHPDC_CONFIG, BLOCHPDC_OUT, BLOCHPDC_THREADS,
// BLOCHPDC_WINDOW, BLOCHPDC_RESOLUTION, BLOCHPDC_PROCESS,
// BLOCHPDC_NO_CHI2_WEIGHTING); flags win over the environment, which wins over
// the config file.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <blochpdc/app.hpp>

int main(int argc, char** argv) {
    using namespace blochpdc;

    CLI::App app{"Bloch modes and down-conversion phase matching in 1-D photonic crystals"};
    app.require_subcommand(1, 1);

    std::string config;
    std::optional<std::string> out;
    std::optional<int> threads, window, resolution;
    std::optional<std::string> process;
    bool no_chi2 = false;

    app.add_option("--config", config, "run configuration (JSON with comments)")->envname("BLOCHPDC_CONFIG")->required();
    app.add_option("--out", out, "output directory")->envname("BLOCHPDC_OUT");
    app.add_option("--threads", threads, "worker threads, 0 = all cores")->envname("BLOCHPDC_THREADS")->check(CLI::NonNegativeNumber);
    app.add_option("--window", window, "Fourier window half-width")->envname("BLOCHPDC_WINDOW")->check(CLI::PositiveNumber);
    app.add_option("--resolution", resolution, "grid resolution for band and emission")
        ->envname("BLOCHPDC_RESOLUTION")
        ->check(CLI::Range(2, 100000));
    app.add_option("--process", process, "process type for emission maps")
        ->envname("BLOCHPDC_PROCESS")
        ->check(CLI::IsMember({"I", "II", "III"}));
    app.add_flag("--no-chi2-weighting", no_chi2, "leave out the chi2 tensor factor in emission maps")
        ->envname("BLOCHPDC_NO_CHI2_WEIGHTING");

    struct Cmd {
        const char* name;
        const char* help;
        Subcommand cmd;
    };
    const Cmd cmds[] = {
        {"band", "band classification grid", Subcommand::band},
        {"modes", "Bloch-mode Fourier coefficients", Subcommand::modes},
        {"surface", "dispersion surfaces K_z(k_par)", Subcommand::surface},
        {"emission", "down-conversion emission maps", Subcommand::emission},
        {"intersect", "TE/TM ring intersections (Type II)", Subcommand::intersect},
        {"efficiency", "efficiency relative to a reference crystal", Subcommand::efficiency},
    };
    for (const auto& c : cmds) app.add_subcommand(c.name, c.help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    std::string name = app.get_subcommands().front()->get_name();
    Subcommand cmd = Subcommand::band;
    for (const auto& c : cmds)
        if (name == c.name) cmd = c.cmd;

    try {
        RunConfig cfg = parse_config(config);
        if (out) cfg.output_dir = *out;
        if (threads) cfg.threads = static_cast<unsigned>(*threads);
        if (window) cfg.window = FourierWindow::symmetric(*window);
        if (resolution) {
            cfg.band.resolution = *resolution;
            cfg.emission.resolution = *resolution;
        }
        if (process) {
            const ProcessType t = *detail::parse_process(*process);
            cfg.emission.processes = {t};
            cfg.process.type = t;
        }
        if (no_chi2) cfg.emission.chi2_weighting = false;
        run(cmd, cfg);
    } catch (const ConfigError& e) {
        std::cerr << error_json(e, name).dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << error_json(e, name).dump() << '\n';
        return 1;
    }
    return 0;
}

// fluxfocus: batch front end for the aperture field engines
#include <cstdio>
#include <iostream>
#include <optional>
#include <regex>
#include <string>

#include <CLI11.hpp>

#include "fluxfocus/io/config.hpp"
#include "fluxfocus/io/output.hpp"
#include "fluxfocus/io/presets.hpp"
#include "fluxfocus/io/runner.hpp"
#include "fluxfocus/log.hpp"

namespace io = fluxfocus::io;

namespace {

struct Args {
    std::string preset;
    std::string config_path;
    std::string out_dir;
    std::string grid;
    std::optional<int> threads;
    bool quiet = false;
};

void add_common(CLI::App* sub, Args& a) {
    sub->add_option("--preset", a.preset, "named scenario (see 'fluxfocus presets')");
    sub->add_option("--config", a.config_path, "JSON scenario file or a previous manifest.json");
    sub->add_option("--out", a.out_dir, "output directory (overrides output.dir)");
    sub->add_option("--grid", a.grid, "grid size NxM (overrides grid.nx, grid.ny)");
    sub->add_option("--threads", a.threads, "worker threads (default: $FLUXFOCUS_THREADS or 1)");
    sub->add_flag("-q,--quiet", a.quiet, "no summary line, warnings only");
}

int usage_error(const std::string& msg) {
    std::cerr << "fluxfocus: " << msg << "\n";
    return io::exit_usage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fields of point dipoles in apertures of superconducting films"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("fluxfocus ") + FLUXFOCUS_VERSION);
    Args a;
    for (const char* name : {"analytic", "solve", "sweep", "compare", "coupling"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " command");
        add_common(sub, a);
    }
    app.add_subcommand("presets", "list the named scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return io::exit_usage;
    }

    auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "presets") {
        for (const auto& p : io::presets())
            std::printf("%-20s %-9s %s\n", p.name.c_str(), io::to_string(p.command), p.description.c_str());
        return io::exit_ok;
    }
    const auto command = *io::parse_command(sub->get_name());

    std::string diag;
    try {
        std::string text;
        if (!a.config_path.empty()) text = io::read_file(a.config_path);
        const bool empty = a.config_path.empty() || io::is_empty_config(text);
        if (a.preset.empty() && empty)
            return usage_error("nothing to run: give --preset NAME or --config FILE (see --help)");
        if (!a.preset.empty() && !io::find_preset(a.preset))
            return usage_error("unknown preset '" + a.preset + "' (see 'fluxfocus presets')");

        io::ScenarioConfig cfg;
        if (!empty) {
            cfg = io::parse_config(text, a.config_path);
            if (!a.preset.empty()) {
                // re-resolve so the preset sits underneath the file's values
                auto doc = io::Json::parse(text);
                if (doc.contains("manifest_version")) doc = doc.at("config");
                cfg = io::resolve_config(a.preset, doc, a.config_path);
            }
        } else {
            cfg = io::resolve_config(a.preset, nullptr, "--preset");
        }
        if (!a.grid.empty()) {
            std::smatch m;
            if (!std::regex_match(a.grid, m, std::regex(R"((\d+)[xX](\d+))")))
                return usage_error("--grid expects NxM, e.g. 60x60");
            const int nx = std::stoi(m[1]), ny = std::stoi(m[2]);
            if (nx < 16 || ny < 16 || nx > 400 || ny > 400) return usage_error("--grid sizes must lie in [16, 400]");
            cfg.grid.nx = nx;
            cfg.grid.ny = ny;
        }
        if (!a.out_dir.empty()) cfg.output.dir = a.out_dir;
        const int threads = io::resolve_threads(a.threads);

        if (a.quiet) fluxfocus::set_warning_sink([](const std::string& w) { std::cerr << "fluxfocus: warning: " << w << "\n"; });
        const auto rep = io::run(command, cfg, threads);
        if (!a.quiet) {
            std::cout << rep.summary << "\n";
            for (const auto& f : rep.outputs) std::cout << "  wrote " << cfg.output.dir << "/" << f << "\n";
        }
        return io::exit_ok;
    } catch (const std::exception& e) {
        const int code = io::exit_code_for(e, diag);
        std::cerr << "fluxfocus: " << diag << "\n";
        return code;
    }
}

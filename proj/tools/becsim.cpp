// Command-line front end: run a scenario config, sweep a parameter, or
// reproduce a named result set.
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "becsim/errors.hpp"
#include "becsim/scenario.hpp"

namespace {

std::string default_outdir() {
    const char* env = std::getenv("BECSIM_OUTDIR");
    return env ? env : ".";
}

nlohmann::json load_json_or_preset(const std::string& spec) {
    namespace sc = becsim::scenario;
    for (const auto& name : sc::preset_names()) {
        if (name == spec) return sc::preset_config(spec);
    }
    std::ifstream in(spec);
    if (!in) {
        throw becsim::ConfigError("no such config file or preset: " + spec);
    }
    nlohmann::json doc;
    in >> doc;
    return doc;
}

std::vector<std::string> split_values(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dimple-trap loading and evaporative-cooling simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // accept --outdir after the subcommand too

    std::string outdir = default_outdir();
    app.add_option("--outdir", outdir, "Output directory");

    std::string run_config;
    CLI::App* run = app.add_subcommand("run", "Run a scenario config or preset");
    run->add_option("config", run_config, "Config file or preset name")
        ->required();

    std::string sweep_config, sweep_param, sweep_values;
    CLI::App* sweep =
        app.add_subcommand("sweep", "Run a scenario per parameter value");
    sweep->add_option("config", sweep_config, "Config file or preset name")
        ->required();
    sweep->add_option("--param", sweep_param,
                      "Dot-separated config path, e.g. dimple.waist")
        ->required();
    sweep->add_option("--values", sweep_values,
                      "Comma-separated values (unit strings allowed)")
        ->required();

    std::string figure;
    CLI::App* rep = app.add_subcommand(
        "reproduce", "Emit the per-curve CSVs for a named figure");
    rep->add_option("figure", figure, "One of fig2 fig5 fig6 fig8 fig9 fig10")
        ->required();

    CLI::App* presets = app.add_subcommand("presets", "List preset names");

    CLI11_PARSE(app, argc, argv);

    namespace sc = becsim::scenario;
    try {
        if (presets->parsed()) {
            for (const auto& n : sc::preset_names()) std::cout << n << "\n";
            return 0;
        }
        if (run->parsed()) {
            const nlohmann::json doc = load_json_or_preset(run_config);
            const sc::ScenarioConfig cfg = sc::parse_config(doc);
            const sc::RunSummary summary = sc::run_scenario(cfg, outdir);
            std::cout << sc::summary_text(summary);
            return 0;
        }
        if (sweep->parsed()) {
            const nlohmann::json doc = load_json_or_preset(sweep_config);
            sc::sweep(doc, sweep_param, split_values(sweep_values), outdir);
            std::cout << "wrote " << outdir << "/sweep.csv\n";
            return 0;
        }
        if (rep->parsed()) {
            sc::reproduce(figure, outdir);
            std::cout << "wrote " << figure << " files to " << outdir << "\n";
            return 0;
        }
    } catch (const becsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const becsim::UnknownFigure& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const becsim::PhysicsError& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

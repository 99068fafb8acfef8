// lambda_dyn.cpp — Command-line entry point

#include <CLI11.hpp>

#include <iostream>

#include "lambda_dyn/commands.hpp"
#include "lambda_dyn/errors.hpp"

int main(int argc, char** argv) {
    using namespace lambda_dyn;
    CLI::App app{"Resonance dynamics of a three-level system coupled to a thermal reservoir"};
    app.require_subcommand(1);

    CommandOptions opt;
    std::string format, out, term;
    for (const char* name : {"resonances", "evolve", "reservoir", "validate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "scenario JSON (schema 1)")->required();
        sub->add_option("--out", out, "output directory (overrides run.out)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        if (std::string(name) == "evolve") {
            sub->add_option("--term", term, "emit the single (j,s) resonance contribution");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Error& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    if (!out.empty()) opt.out = out;
    if (!format.empty()) opt.format = format;
    if (!term.empty()) {
        try {
            opt.term = parse_term(term);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
    }
    return run_command(command, opt, std::cout, std::cerr);
}

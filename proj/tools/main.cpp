#include "commands.hpp"

#include "fluxnet/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

namespace {

using namespace fluxnet;

void emit(const config::Table& table, const std::string& format, std::ostream& out) {
    if (format == "json") {
        config::write_json(table, out);
    } else {
        config::write_csv(table, out);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fluxnet: resonator-coupled flux qubit networks"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_path;
    std::string format;
    unsigned threads = 1;
    std::uint64_t seed = 0;

    const char* names[][2] = {
        {"spectrum", "low-lying qubit levels, optionally swept"},
        {"couplings", "qubit-resonator couplings g_par, g_perp, g_z, g_x"},
        {"network", "effective Ising couplings of a resonator network"},
        {"verify", "check the transformed Hamiltonian and the ZZ oracle"},
        {"anneal", "hardware path or closed-system anneal of Ising problems"},
        {"embed", "choose coupler strengths for a target problem"},
    };
    for (const auto& entry : names) {
        CLI::App* sub = app.add_subcommand(entry[0], entry[1]);
        sub->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output file (default stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", threads, "worker threads, 0 for all cores");
        sub->add_option("--seed", seed, "random seed, overrides the config");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kConfig;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    try {
        cli::Context ctx;
        ctx.run = config::load_run_config(config_path);
        ctx.threads = threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : threads;
        if (chosen->count("--seed") > 0) ctx.seed = seed;
        if (format.empty()) format = ctx.run.format.value_or("csv");
        if (out_path.empty() && ctx.run.out_path) out_path = *ctx.run.out_path;

        const cli::Outcome outcome = cli::run_command(chosen->get_name(), ctx);
        if (out_path.empty()) {
            emit(outcome.table, format, std::cout);
        } else {
            std::ofstream file(out_path);
            if (!file) throw ConfigError("cannot open output file '" + out_path + "'");
            emit(outcome.table, format, file);
        }
        if (outcome.exit_code != 0) {
            std::cerr << "fluxnet: physics gate: " << outcome.message << '\n';
        }
        return outcome.exit_code;
    } catch (const std::exception& e) {
        const cli::ExitCode code = cli::exit_code_of(e);
        std::cerr << "fluxnet: " << cli::exit_code_name(code) << ": " << e.what() << '\n';
        return code;
    }
}

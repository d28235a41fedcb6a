#pragma once

#include "fluxnet/config.hpp"

#include <cstdint>
#include <exception>
#include <optional>
#include <string>

namespace fluxnet::cli {

struct Context {
    config::RunConfig run;
    unsigned threads = 1;
    std::optional<std::uint64_t> seed; // overrides run.seed
};

/// Result of a command: the table to emit and, when a gate failed after the
/// table was produced, the failure to report.
struct Outcome {
    config::Table table;
    int exit_code = 0;
    std::string message;
};

Outcome cmd_spectrum(const Context& ctx);
Outcome cmd_couplings(const Context& ctx);
Outcome cmd_network(const Context& ctx);
Outcome cmd_embed(const Context& ctx);
Outcome cmd_verify(const Context& ctx);
Outcome cmd_anneal(const Context& ctx);

/// Dispatches by name; throws ConfigError for an unknown command.
Outcome run_command(const std::string& name, const Context& ctx);

enum ExitCode : int {
    kOk = 0,
    kOther = 1,
    kConfig = 2,
    kConvergence = 3,
    kBudget = 4,
    kPhysicsGate = 5,
};

/// Failure class of an exception: ConfigError and std::invalid_argument map
/// to kConfig, the other fluxnet errors to their own codes, the rest to kOther.
ExitCode exit_code_of(const std::exception& e);

/// Short name of a failure class for diagnostics.
const char* exit_code_name(ExitCode code);

}  // namespace fluxnet::cli

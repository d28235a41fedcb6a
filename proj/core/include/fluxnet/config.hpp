#pragma once

// Run configuration (one JSON document per run) and tabular output.

#include "fluxnet/annealing.hpp"
#include "fluxnet/circuit_spectrum.hpp"
#include "fluxnet/hamiltonian_verify.hpp"
#include "fluxnet/ising.hpp"
#include "fluxnet/pair_coupling.hpp"
#include "fluxnet/resonator_network.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fluxnet::config {

struct Sweep {
    std::string parameter = "f_z"; // f_z, f_alpha or charge_cutoff
    double start = 0.5;
    double stop = 0.5;
    int samples = 1;

    std::vector<double> values() const;
};

struct RandomProblem {
    int count = 1;
    int n_min = 2;
    int n_max = 6;
};

struct ScheduleBlock {
    anneal::Schedule schedule{};
    double e_scale = 1.0;           // GHz
    std::vector<double> d_scale;    // GHz per spin; empty means all 1
    int steps = 64;
};

struct VerifyBlock {
    std::vector<double> epsilon; // empty means zeros
    int n_fock = 12;
    int n_keep = 4;
    bool oracle = true;
};

struct EmbedBlock {
    double scale = 0.5;
    network::EmbedOptions options{};
};

struct RunConfig {
    std::optional<std::uint64_t> seed;
    circuit::QubitCircuitParams qubit{};
    pair::ResonatorParams resonator{};
    std::optional<network::NetworkConfig> network;
    std::optional<IsingProblem> problem;
    std::optional<RandomProblem> random_problem;
    ScheduleBlock schedule{};
    std::optional<Sweep> sweep;
    int levels = 4;
    std::optional<anneal::HardwarePath> path;
    VerifyBlock verify{};
    EmbedBlock embed{};
    double temperature_mk = 10.0;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
};

/// Validates the schema (unknown keys, types, shapes) and the physical
/// invariants of every block. Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& document);

/// Reads and parses a file; JSON syntax errors are reported with their line.
RunConfig load_run_config(const std::string& path);

/// Random problem with coefficients uniform in [-1, 1].
IsingProblem random_problem(int n, std::uint64_t seed);

/// `request.count` instances: sizes drawn uniformly from [n_min, n_max] by a
/// generator seeded with `seed`, instance k built by random_problem with
/// its own derived seed.
std::vector<IsingProblem> random_instances(const RandomProblem& request, std::uint64_t seed);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

void write_csv(const Table& table, std::ostream& out);
/// Array of objects keyed by the header.
void write_json(const Table& table, std::ostream& out);

}  // namespace fluxnet::config

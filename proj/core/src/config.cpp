#include "fluxnet/config.hpp"

#include "fluxnet/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fluxnet::config {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

class Reader {
  public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail(path_, "expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_.contains(key);
    }

    std::string at(const std::string& key) const { return path_ + "." + key; }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return node_.at(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number()) fail(at(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(at(key), "must be finite");
        return d;
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number_integer()) fail(at(key), "expected an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_boolean()) fail(at(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> vector(const std::string& key) {
        std::vector<double> out;
        if (!has(key)) return out;
        const json& v = node_.at(key);
        if (!v.is_array()) fail(at(key), "expected an array of numbers");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    Eigen::MatrixXd matrix(const std::string& key, Eigen::Index n) {
        const json& v = raw(key);
        if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n) {
            fail(at(key), "expected an array of " + std::to_string(n) + " rows");
        }
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const json& row = v[static_cast<std::size_t>(i)];
            const std::string rp = at(key) + "[" + std::to_string(i) + "]";
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
                fail(rp, "expected " + std::to_string(n) + " numbers");
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                if (!row[static_cast<std::size_t>(j)].is_number()) fail(rp + "[" + std::to_string(j) + "]", "expected a number");
                m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
            }
        }
        return m;
    }

    Reader child(const std::string& key) { return Reader(raw(key), at(key)); }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (seen_.count(it.key()) == 0) fail(path_ + "." + it.key(), "unknown key");
        }
    }

  private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Runs a validator that throws std::invalid_argument and rewraps its message.
template <typename F>
void checked(const std::string& path, F&& validate) {
    try {
        validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

circuit::QubitCircuitParams parse_qubit(Reader r, const std::string& path) {
    circuit::QubitCircuitParams q;
    q.e_c = r.number("e_c", q.e_c);
    q.e_j = r.number("e_j", q.e_j);
    q.alpha = r.number("alpha", q.alpha);
    q.beta = r.number("beta", q.beta);
    q.f_z = r.number("f_z", q.f_z);
    q.f_alpha = r.number("f_alpha", q.f_alpha);
    q.charge_cutoff = r.integer("charge_cutoff", q.charge_cutoff);
    q.unit_beta_cosine = r.boolean("unit_beta_cosine", q.unit_beta_cosine);
    const std::string gauge = r.string("gauge", "symmetric");
    if (gauge == "symmetric") {
        q.gauge = circuit::AlphaLoopGauge::kSymmetric;
    } else if (gauge == "literal") {
        q.gauge = circuit::AlphaLoopGauge::kLiteral;
    } else {
        fail(r.at("gauge"), "expected \"symmetric\" or \"literal\"");
    }
    r.finish();
    checked(path, [&] { q.validate(); });
    return q;
}

pair::ResonatorParams parse_resonator(Reader r, const std::string& path) {
    pair::ResonatorParams p;
    p.omega_r = r.number("omega_r", p.omega_r);
    p.i_r = r.number("i_r", p.i_r);
    p.l_r = r.number("l_r", p.l_r);
    r.finish();
    checked(path, [&] { p.validate(); });
    return p;
}

network::NetworkConfig parse_network(Reader r, const std::string& path) {
    network::NetworkConfig net;
    const std::vector<double> omega = r.vector("omega_r");
    if (omega.empty()) fail(r.at("omega_r"), "required, at least one resonator");
    net.omega_r = to_vector(omega);
    const auto n = static_cast<Eigen::Index>(omega.size());
    const std::vector<double> g = r.vector("g_z");
    if (static_cast<Eigen::Index>(g.size()) != n) fail(r.at("g_z"), "needs one entry per resonator");
    net.g_z = to_vector(g);
    net.g_c = r.has("g_c") ? r.matrix("g_c", n) : Eigen::MatrixXd::Zero(n, n);
    r.finish();
    checked(path, [&] { net.validate(); });
    return net;
}

IsingProblem parse_problem(Reader r, const std::string& path) {
    IsingProblem p;
    const std::vector<double> eps = r.vector("eps_tilde");
    if (eps.empty()) fail(r.at("eps_tilde"), "required, at least one spin");
    p.eps_tilde = to_vector(eps);
    const auto n = static_cast<Eigen::Index>(eps.size());
    p.j_tilde = r.has("j_tilde") ? r.matrix("j_tilde", n) : Eigen::MatrixXd::Zero(n, n);
    r.finish();
    checked(path, [&] { p.validate(); });
    return p;
}

anneal::Envelope parse_envelope(const std::string& s, const std::string& path) {
    if (s == "linear") return anneal::Envelope::kLinear;
    if (s == "quadratic") return anneal::Envelope::kQuadratic;
    if (s == "sine") return anneal::Envelope::kSine;
    fail(path, "expected \"linear\", \"quadratic\" or \"sine\"");
}

}  // namespace

std::vector<double> Sweep::values() const {
    std::vector<double> out;
    for (int k = 0; k < samples; ++k) {
        out.push_back(samples == 1 ? start : start + (stop - start) * k / (samples - 1));
    }
    return out;
}

RunConfig parse_run_config(const json& document) {
    Reader root(document, "$");
    RunConfig cfg;
    if (root.has("seed")) {
        const json& s = root.raw("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
            fail("$.seed", "expected a non-negative integer");
        }
        cfg.seed = s.get<std::uint64_t>();
    }
    if (root.has("qubit")) cfg.qubit = parse_qubit(root.child("qubit"), "$.qubit");
    if (root.has("resonator")) cfg.resonator = parse_resonator(root.child("resonator"), "$.resonator");
    if (root.has("network")) cfg.network = parse_network(root.child("network"), "$.network");
    if (root.has("problem")) {
        const json& p = root.raw("problem");
        Reader pr(p, "$.problem");
        if (pr.has("random")) {
            Reader rr = pr.child("random");
            RandomProblem rp;
            rp.count = rr.integer("count", rp.count);
            rp.n_min = rr.integer("n_min", rp.n_min);
            rp.n_max = rr.integer("n_max", rp.n_max);
            rr.finish();
            pr.finish();
            if (rp.count < 0) fail("$.problem.random.count", "must be >= 0");
            if (rp.n_min < 1 || rp.n_max < rp.n_min || rp.n_max > anneal::kEvolveSpinLimit) {
                fail("$.problem.random", "need 1 <= n_min <= n_max <= " + std::to_string(anneal::kEvolveSpinLimit));
            }
            cfg.random_problem = rp;
        } else {
            cfg.problem = parse_problem(Reader(p, "$.problem"), "$.problem");
        }
    }
    if (root.has("schedule")) {
        Reader r = root.child("schedule");
        cfg.schedule.schedule.t_f = r.number("t_f", cfg.schedule.schedule.t_f);
        cfg.schedule.schedule.lambda_shape = parse_envelope(r.string("lambda", "linear"), "$.schedule.lambda");
        cfg.schedule.schedule.gamma_shape = parse_envelope(r.string("gamma", "linear"), "$.schedule.gamma");
        cfg.schedule.e_scale = r.number("e_scale", cfg.schedule.e_scale);
        cfg.schedule.d_scale = r.vector("d_scale");
        cfg.schedule.steps = r.integer("steps", cfg.schedule.steps);
        r.finish();
        checked("$.schedule", [&] { cfg.schedule.schedule.validate(); });
        if (!(cfg.schedule.e_scale > 0.0)) fail("$.schedule.e_scale", "must be > 0");
        if (cfg.schedule.steps < 2) fail("$.schedule.steps", "must be >= 2");
        for (double d : cfg.schedule.d_scale) {
            if (!(d >= 0.0)) fail("$.schedule.d_scale", "entries must be >= 0");
        }
    }
    if (root.has("sweep")) {
        Reader r = root.child("sweep");
        Sweep s;
        s.parameter = r.string("parameter", s.parameter);
        s.start = r.number("start", s.start);
        s.stop = r.number("stop", s.stop);
        s.samples = r.integer("samples", s.samples);
        r.finish();
        if (s.parameter != "f_z" && s.parameter != "f_alpha" && s.parameter != "charge_cutoff") {
            fail("$.sweep.parameter", "expected \"f_z\", \"f_alpha\" or \"charge_cutoff\"");
        }
        if (s.samples < 0) fail("$.sweep.samples", "must be >= 0");
        cfg.sweep = s;
    }
    cfg.levels = root.integer("levels", cfg.levels);
    if (cfg.levels < 1) fail("$.levels", "must be >= 1");
    if (root.has("path")) {
        Reader r = root.child("path");
        anneal::HardwarePath p;
        // Without an explicit qubit block the path uses its own defaults.
        if (root.has("qubit")) p.qubit = cfg.qubit;
        p.resonator = cfg.resonator;
        p.n = r.integer("n", p.n);
        p.f_z_start = r.number("f_z_start", p.f_z_start);
        p.f_z_end = r.number("f_z_end", p.f_z_end);
        p.f_alpha_start = r.number("f_alpha_start", p.f_alpha_start);
        p.f_alpha_end = r.number("f_alpha_end", p.f_alpha_end);
        p.g_c_end = r.number("g_c_end", p.g_c_end);
        p.samples = r.integer("samples", p.samples);
        if (p.n >= 1 && r.has("coupler_pattern")) p.coupler_pattern = r.matrix("coupler_pattern", p.n);
        r.finish();
        checked("$.path", [&] { p.validate(); });
        cfg.path = p;
    }
    if (root.has("verify")) {
        Reader r = root.child("verify");
        cfg.verify.epsilon = r.vector("epsilon");
        cfg.verify.n_fock = r.integer("n_fock", cfg.verify.n_fock);
        cfg.verify.n_keep = r.integer("n_keep", cfg.verify.n_keep);
        cfg.verify.oracle = r.boolean("oracle", cfg.verify.oracle);
        r.finish();
        if (cfg.verify.n_fock < 2) fail("$.verify.n_fock", "must be >= 2");
        if (cfg.verify.n_keep < 1 || cfg.verify.n_keep > cfg.verify.n_fock) {
            fail("$.verify.n_keep", "need 1 <= n_keep <= n_fock");
        }
    }
    if (root.has("embed")) {
        Reader r = root.child("embed");
        cfg.embed.scale = r.number("scale", cfg.embed.scale);
        cfg.embed.options.max_coupler = r.number("max_coupler", cfg.embed.options.max_coupler);
        cfg.embed.options.max_scale = r.number("max_scale", cfg.embed.options.max_scale);
        cfg.embed.options.max_iterations = r.integer("max_iterations", cfg.embed.options.max_iterations);
        r.finish();
        if (!(cfg.embed.scale >= 0.0)) fail("$.embed.scale", "must be >= 0");
    }
    cfg.temperature_mk = root.number("temperature_mk", cfg.temperature_mk);
    if (!(cfg.temperature_mk >= 0.0)) fail("$.temperature_mk", "must be >= 0");
    if (root.has("output")) {
        Reader r = root.child("output");
        if (r.has("path")) cfg.out_path = r.string("path", "");
        if (r.has("format")) cfg.format = r.string("format", "csv");
        r.finish();
        if (cfg.format && *cfg.format != "csv" && *cfg.format != "json") {
            fail("$.output.format", "expected \"csv\" or \"json\"");
        }
    }
    root.finish();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open configuration file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_run_config(doc);
}

IsingProblem random_problem(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    IsingProblem p = IsingProblem::zeros(n);
    for (int i = 0; i < n; ++i) {
        p.eps_tilde(i) = coeff(rng);
        for (int j = i + 1; j < n; ++j) {
            const double v = coeff(rng);
            p.j_tilde(i, j) = v;
            p.j_tilde(j, i) = v;
        }
    }
    return p;
}

std::vector<IsingProblem> random_instances(const RandomProblem& request, std::uint64_t seed) {
    std::mt19937_64 sizes(seed);
    std::uniform_int_distribution<int> size_dist(request.n_min, request.n_max);
    std::vector<IsingProblem> out;
    for (int k = 0; k < request.count; ++k) {
        const int n = size_dist(sizes);
        out.push_back(random_problem(n, seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1)));
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

namespace {

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

void write_csv(const Table& table, std::ostream& out) {
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << csv_escape(table.header[i]);
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(cell_text(row[i]));
        out << '\n';
    }
}

void write_json(const Table& table, std::ostream& out) {
    // Numbers are written with the same %.17g text as CSV so both formats
    // are bit-stable across runs.
    out << "[";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << (r ? ",\n " : "\n ") << "{";
        const auto& row = table.rows[r];
        for (std::size_t i = 0; i < row.size() && i < table.header.size(); ++i) {
            out << (i ? ", " : "") << json(table.header[i]).dump() << ": ";
            if (const auto* d = std::get_if<double>(&row[i])) {
                out << (std::isfinite(*d) ? format_double(*d) : "null");
            } else if (const auto* n = std::get_if<std::int64_t>(&row[i])) {
                out << *n;
            } else {
                out << json(std::get<std::string>(row[i])).dump();
            }
        }
        out << "}";
    }
    out << (table.rows.empty() ? "]\n" : "\n]\n");
}

}  // namespace fluxnet::config

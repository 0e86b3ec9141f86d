#include "qsg/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsg/analysis.hpp"
#include "qsg/encoding.hpp"
#include "qsg/error.hpp"
#include "qsg/minfinder.hpp"

namespace qsg {

namespace {

// Brute-force verification of minfind results up to this many edges.
constexpr std::size_t kVerifyEdgeLimit = 12;

struct RunConfig {
    std::string graph_path;
    std::string gen;
    std::size_t x = 1;
    std::vector<std::uint64_t> shots{1000000};
    std::uint64_t seed = 0;
    std::size_t seeds = 1;
    std::size_t a_eps = 6;
    std::size_t cap = kDefaultQubitCap;
    std::string mode;
    std::string out;
    std::string format = "csv";
    std::optional<std::uint64_t> budget;
    std::string log_path;
    std::string config_bits;
    std::string vector_path;
    std::vector<std::size_t> xs{1, 2, 3};
    std::size_t n_lo = 10;
    std::size_t n_hi = 100000;
    std::size_t per_decade = 10;
    double eps = 1.0;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

WeightedGraph load_graph(const RunConfig& cfg) {
    if (!cfg.graph_path.empty() && !cfg.gen.empty()) {
        throw InvalidArgument("--graph and --gen are mutually exclusive");
    }
    if (!cfg.graph_path.empty()) {
        return read_graph_file(cfg.graph_path);
    }
    if (!cfg.gen.empty()) {
        return generate_graph(cfg.gen);
    }
    throw InvalidArgument("one of --graph or --gen is required");
}

void check_x(const WeightedGraph& g, std::size_t x) {
    if (x > g.edge_count()) {
        throw CardinalityError("--x " + std::to_string(x) + " exceeds the " +
                               std::to_string(g.edge_count()) + " edges of the graph");
    }
}

double alpha_of(const WeightedGraph& g) {
    return std::ldexp(1.0, static_cast<int>(register_dims(g).k));
}

// "# key: value" lines for CSV, a "provenance" object for JSON.
struct Provenance {
    std::uint64_t seed = 0;
    std::optional<double> alpha;
    std::string layout;

    void csv(std::ostream& o, const std::string& command) const {
        o << "# qsg " << kVersion << ' ' << command << '\n';
        o << "# seed: " << seed << '\n';
        o << "# alpha: " << (alpha ? num(*alpha) : "n/a") << '\n';
        o << "# layout: " << (layout.empty() ? "n/a" : layout) << '\n';
    }
    nlohmann::json json(const std::string& command) const {
        nlohmann::json j;
        j["version"] = kVersion;
        j["command"] = command;
        j["seed"] = seed;
        j["alpha"] = alpha ? nlohmann::json(*alpha) : nlohmann::json(nullptr);
        j["layout"] = layout;
        return j;
    }
};

Provenance graph_provenance(const WeightedGraph& g, std::uint64_t seed, std::size_t phase_bits = 0) {
    const RegisterDims dims = register_dims(g);
    RegisterLayout layout = psi_layout(dims);
    if (phase_bits > 0) {
        layout.add("label", phase_bits - 1).add("sign", 1);
    }
    return {seed, alpha_of(g), layout.describe()};
}

void check_format(const RunConfig& cfg) {
    if (cfg.format != "csv" && cfg.format != "json") {
        throw InvalidArgument("--format must be csv or json");
    }
}

// ---------------------------------------------------------------------------

void cmd_enumerate(const RunConfig& cfg, std::ostream& o) {
    const WeightedGraph g = load_graph(cfg);
    check_x(g, cfg.x);
    check_format(cfg);
    struct Row {
        Configuration d;
        double D;
    };
    std::vector<Row> rows;
    for (const auto& d : enumerate_configurations(g.edge_count(), cfg.x)) {
        rows.push_back({d, frobenius_distance_sparse(g, d)});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.D < b.D; });
    const Provenance prov = graph_provenance(g, cfg.seed);
    if (cfg.format == "json") {
        nlohmann::json j;
        j["provenance"] = prov.json("enumerate");
        j["x"] = cfg.x;
        j["rows"] = nlohmann::json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            j["rows"].push_back({{"config_bits", rows[i].d.to_string()},
                                 {"d_tilde", rows[i].d.to_tilde_string()},
                                 {"D_classical", rows[i].D},
                                 {"argmin", i == 0}});
        }
        o << j.dump(2) << '\n';
        return;
    }
    prov.csv(o, "enumerate");
    o << "config_bits,d_tilde,D_classical,argmin\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        o << rows[i].d.to_string() << ',' << rows[i].d.to_tilde_string() << ',' << num(rows[i].D)
          << ',' << (i == 0 ? 1 : 0) << '\n';
    }
}

void write_report(std::ostream& o, const DistanceReport& r, const Provenance& prov,
                  const std::string& format, const std::string& mode) {
    if (format == "json") {
        nlohmann::json j;
        j["provenance"] = prov.json("sample");
        j["mode"] = mode;
        j["shots"] = r.shots;
        j["delta"] = r.delta;
        j["S"] = r.norm.S;
        j["W"] = r.norm.W;
        j["rows"] = nlohmann::json::array();
        for (const auto& e : r.entries) {
            j["rows"].push_back({{"config_bits", e.config.to_string()},
                                 {"D_quantum", e.quantum},
                                 {"D_classical", e.classical},
                                 {"abs_err", e.abs_err}});
        }
        o << j.dump(2) << '\n';
        return;
    }
    prov.csv(o, "sample");
    o << "# mode: " << mode << '\n';
    o << "# shots: " << r.shots << '\n';
    o << "# delta: " << num(r.delta) << '\n';
    o << "config_bits,D_quantum,D_classical,abs_err\n";
    for (const auto& e : r.entries) {
        o << e.config.to_string() << ',' << num(e.quantum) << ',' << num(e.classical) << ','
          << num(e.abs_err) << '\n';
    }
}

void cmd_sample(const RunConfig& cfg, std::ostream& o) {
    const WeightedGraph g = load_graph(cfg);
    check_x(g, cfg.x);
    check_format(cfg);
    const std::string mode = cfg.mode.empty() ? "sample" : cfg.mode;
    if (mode != "sample" && mode != "infinite-shot") {
        throw InvalidArgument("sample accepts --mode sample or infinite-shot");
    }
    for (const auto s : cfg.shots) {
        if (s == 0) {
            throw InvalidArgument("--shots must be positive");
        }
    }
    PrepareOptions opt;
    opt.cap = cfg.cap;
    const PreparedState prepared = prepare_psi_f(g, cfg.x, opt);
    const Provenance prov = graph_provenance(g, cfg.seed);

    if (mode == "infinite-shot") {
        write_report(o, reconstruct_distances_exact(prepared, g), prov, cfg.format, mode);
        return;
    }
    if (cfg.shots.size() == 1 && cfg.seeds == 1) {
        write_report(o, sample_distances(prepared, g, cfg.shots.front(), cfg.seed), prov, cfg.format,
                     mode);
        return;
    }
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < cfg.seeds; ++i) {
        seeds.push_back(cfg.seed + i);
    }
    if (cfg.shots.size() == 1) {
        // One shot count, several seeds: one report per seed.
        for (const auto s : seeds) {
            Provenance p = prov;
            p.seed = s;
            write_report(o, sample_distances(prepared, g, cfg.shots.front(), s), p, cfg.format, mode);
        }
        return;
    }
    const ConvergenceStudy study = convergence_study(prepared, g, cfg.shots, seeds);
    if (cfg.format == "json") {
        nlohmann::json j;
        j["provenance"] = prov.json("sample");
        j["seeds"] = study.seeds;
        j["slope"] = study.slope;
        j["intercept"] = study.intercept;
        j["rows"] = nlohmann::json::array();
        for (const auto& r : study.rows) {
            j["rows"].push_back({{"shots", r.shots},
                                 {"mean", r.mean},
                                 {"p25", r.p25},
                                 {"p50", r.p50},
                                 {"p75", r.p75},
                                 {"deltas", r.deltas}});
        }
        o << j.dump(2) << '\n';
        return;
    }
    prov.csv(o, "sample");
    o << "# seeds: " << seeds.size() << " starting at " << cfg.seed << '\n';
    o << "# slope: " << num(study.slope) << '\n';
    o << "shots,mean_delta,p25,p50,p75\n";
    for (const auto& r : study.rows) {
        o << r.shots << ',' << num(r.mean) << ',' << num(r.p25) << ',' << num(r.p50) << ','
          << num(r.p75) << '\n';
    }
}

void cmd_minfind(const RunConfig& cfg, std::ostream& o, std::ostream& err) {
    const WeightedGraph g = load_graph(cfg);
    check_x(g, cfg.x);
    check_format(cfg);
    MinFinderOptions opt;
    opt.mode = parse_mode(cfg.mode.empty() ? "full" : cfg.mode);
    opt.a_eps = cfg.a_eps;
    opt.cap = cfg.cap;
    opt.budget = cfg.budget;
    std::optional<MinFinder> finder;
    try {
        finder.emplace(g, cfg.x, opt);
    } catch (const ResourceCapError& e) {
        if (opt.mode == MinFinderMode::Full) {
            throw ResourceCapError(e.required(), e.available(),
                                   std::string("full mode (try --mode hybrid)"));
        }
        throw;
    }
    const MinFinderResult r = finder->run(cfg.seed);
    if (r.run.reduced_budget) {
        err << "warning: budget " << r.run.budget << " is below the standard bound "
            << static_cast<std::uint64_t>(std::floor(minfinder_budget(r.run.S)))
            << "; returning the best configuration found so far\n";
    }
    std::optional<bool> verified;
    if (g.edge_count() <= kVerifyEdgeLimit) {
        verified = std::abs(argmin_bruteforce(g, cfg.x).distance - r.distance) <= 1e-12;
    }
    if (!cfg.log_path.empty()) {
        std::ofstream log(cfg.log_path);
        if (!log) {
            throw InvalidArgument("cannot write run log '" + cfg.log_path + "'");
        }
        log << run_log_json_lines(r.run);
    }
    const Provenance prov =
        graph_provenance(g, cfg.seed, opt.mode == MinFinderMode::Full ? opt.a_eps : 0);
    const std::string ver = verified ? (*verified ? "true" : "false") : "skipped";
    if (cfg.format == "json") {
        nlohmann::json j;
        j["provenance"] = prov.json("minfind");
        j["mode"] = to_string(opt.mode);
        j["d"] = r.config.to_string();
        j["d_tilde"] = r.config.to_tilde_string();
        j["D"] = r.distance;
        j["verified"] = verified ? nlohmann::json(*verified) : nlohmann::json(nullptr);
        j["S"] = r.run.S;
        j["budget"] = r.run.budget;
        j["steps_used"] = r.run.steps_used;
        o << j.dump(2) << '\n';
        return;
    }
    prov.csv(o, "minfind");
    o << "# mode: " << to_string(opt.mode) << '\n';
    o << "# S: " << r.run.S << ", budget: " << r.run.budget << ", steps used: " << r.run.steps_used
      << '\n';
    o << "d=" << r.config.to_string() << " d_tilde=" << r.config.to_tilde_string()
      << " D=" << num(r.distance) << " verified=" << ver << '\n';
}

void cmd_costmodel(const RunConfig& cfg, std::ostream& o) {
    check_format(cfg);
    const auto Ns = log_grid(cfg.n_lo, cfg.n_hi, cfg.per_decade);
    const CostSweep sweep = cost_model_sweep(cfg.xs, Ns, cfg.eps);
    const Provenance prov{cfg.seed, std::nullopt, ""};
    if (cfg.format == "json") {
        nlohmann::json j;
        j["provenance"] = prov.json("costmodel");
        j["eps"] = cfg.eps;
        j["constants"] = "unit (O-notation placeholders)";
        j["rows"] = nlohmann::json::array();
        for (const auto& c : sweep.rows) {
            j["rows"].push_back({{"x", c.x},
                                 {"N", c.N},
                                 {"S", c.S},
                                 {"t_min", c.t_min},
                                 {"t_cla", c.t_cla},
                                 {"n_min", c.n_min},
                                 {"t_AE", c.t_AE},
                                 {"t_cQ", c.t_cQ}});
        }
        j["thresholds"] = nlohmann::json::array();
        for (const auto& [x, n] : sweep.thresholds) {
            j["thresholds"].push_back({{"x", x}, {"N", n}});
        }
        if (!sweep.rows.empty()) {
            j["notes"] = sweep.rows.front().notes;
        }
        o << j.dump(2) << '\n';
        return;
    }
    prov.csv(o, "costmodel");
    o << "# constants: unit (O-notation placeholders), eps = " << num(cfg.eps) << ", M = N\n";
    for (const auto& [x, n] : sweep.thresholds) {
        o << "# crossover x=" << x << ": t_min < t_cla for all grid N >= " << n << '\n';
    }
    o << "x,N,S,t_min,t_cla,n_min\n";
    for (const auto& c : sweep.rows) {
        o << c.x << ',' << c.N << ',' << num(c.S) << ',' << num(c.t_min) << ',' << num(c.t_cla) << ','
          << c.n_min << '\n';
    }
}

std::vector<double> read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MalformedInput("cannot open vector file '" + path + "'");
    }
    std::vector<double> v;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        std::string token;
        while (fields >> token) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size() || !std::isfinite(value)) {
                throw MalformedInput("not a number: '" + token + "'", line_number);
            }
            v.push_back(value);
        }
    }
    return v;
}

void cmd_quadform(const RunConfig& cfg, std::ostream& o) {
    const WeightedGraph g = load_graph(cfg);
    check_format(cfg);
    if (cfg.vector_path.empty()) {
        throw InvalidArgument("--vector is required");
    }
    const std::vector<double> a = read_vector_file(cfg.vector_path);
    if (a.size() != g.vertex_count()) {
        throw MalformedInput("vector file holds " + std::to_string(a.size()) + " entries, graph has " +
                             std::to_string(g.vertex_count()) + " vertices");
    }
    const Configuration d = cfg.config_bits.empty() ? Configuration::none_removed(g.edge_count())
                                                    : Configuration::from_string(cfg.config_bits);
    if (d.size() != g.edge_count()) {
        throw InvalidArgument("--config must have one bit per edge");
    }
    const double quantum = quadratic_form_quantum(g, d, a, cfg.cap);
    const double classical = quadratic_form_classical(g, d, a);
    const Provenance prov = graph_provenance(g, cfg.seed);
    if (cfg.format == "json") {
        nlohmann::json j;
        j["provenance"] = prov.json("quadform");
        j["config_bits"] = d.to_string();
        j["quantum"] = quantum;
        j["classical"] = classical;
        j["abs_err"] = std::abs(quantum - classical);
        o << j.dump(2) << '\n';
        return;
    }
    prov.csv(o, "quadform");
    o << "config_bits,quantum,classical,abs_err\n";
    o << d.to_string() << ',' << num(quantum) << ',' << num(classical) << ','
      << num(std::abs(quantum - classical)) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Most-similar subgraph search under fixed edge removal (statevector simulation)"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_graph = [&](CLI::App* c) {
        c->add_option("--graph", cfg.graph_path, "graph file: 'M N' then N lines 'r s b'");
        c->add_option("--gen", cfg.gen, "generator: path:M, cycle:M, star:M or rand:M,N,seed");
        c->add_option("--cap", cfg.cap, "qubit cap")->capture_default_str();
        c->add_option("--seed", cfg.seed, "seed for all randomness")->capture_default_str();
        c->add_option("--out", cfg.out, "output file (default stdout)");
        c->add_option("--format", cfg.format, "csv or json")->capture_default_str();
    };

    auto* enumerate = app.add_subcommand("enumerate", "classical distances of all configurations");
    add_graph(enumerate);
    enumerate->add_option("--x", cfg.x, "removed edges")->required();

    auto* sample = app.add_subcommand("sample", "sample psi_f and reconstruct distances");
    add_graph(sample);
    sample->add_option("--x", cfg.x, "removed edges")->required();
    sample->add_option("--shots", cfg.shots, "shot count; a list runs a convergence study")
        ->delimiter(',')
        ->capture_default_str();
    sample->add_option("--seeds", cfg.seeds, "number of consecutive seeds")->capture_default_str();
    sample->add_option("--mode", cfg.mode, "sample or infinite-shot");

    auto* minfind = app.add_subcommand("minfind", "quantum minimum finding");
    add_graph(minfind);
    minfind->add_option("--x", cfg.x, "removed edges")->required();
    minfind->add_option("--mode", cfg.mode, "full or hybrid");
    minfind->add_option("--aeps", cfg.a_eps, "phase register qubits")->capture_default_str();
    minfind->add_option("--budget", cfg.budget, "override the step budget");
    minfind->add_option("--log", cfg.log_path, "write the run log as JSON lines");

    auto* costmodel = app.add_subcommand("costmodel", "asymptotic runtime sweep with unit constants");
    costmodel->add_option("--x", cfg.xs, "removed edges (list)")->delimiter(',')->capture_default_str();
    costmodel->add_option("--nmin", cfg.n_lo, "smallest N")->capture_default_str();
    costmodel->add_option("--nmax", cfg.n_hi, "largest N")->capture_default_str();
    costmodel->add_option("--per-decade", cfg.per_decade, "grid points per decade")->capture_default_str();
    costmodel->add_option("--eps", cfg.eps, "precision")->capture_default_str();
    costmodel->add_option("--seed", cfg.seed, "recorded in the header")->capture_default_str();
    costmodel->add_option("--out", cfg.out, "output file (default stdout)");
    costmodel->add_option("--format", cfg.format, "csv or json")->capture_default_str();

    auto* quadform = app.add_subcommand("quadform", "a^T B a through a state overlap");
    add_graph(quadform);
    quadform->add_option("--vector", cfg.vector_path, "file of M numbers");
    quadform->add_option("--config", cfg.config_bits, "removal pattern d_0 d_1 ... (default none)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        std::ostringstream buffer;
        if (enumerate->parsed()) {
            cmd_enumerate(cfg, buffer);
        } else if (sample->parsed()) {
            cmd_sample(cfg, buffer);
        } else if (minfind->parsed()) {
            cmd_minfind(cfg, buffer, err);
        } else if (costmodel->parsed()) {
            cmd_costmodel(cfg, buffer);
        } else if (quadform->parsed()) {
            cmd_quadform(cfg, buffer);
        }
        if (cfg.out.empty()) {
            out << buffer.str();
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) {
                throw InvalidArgument("cannot write '" + cfg.out + "'");
            }
            file << buffer.str();
        }
    } catch (const ResourceCapError& e) {
        err << "error: " << e.what() << '\n';
        return kExitResourceCap;
    } catch (const MalformedInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitMalformed;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}

}  // namespace qsg

// graphon-cheeger: command-line driver for spectra, k-way partitions, the
// brute-force oracle, theorem verification and single-function sweep cuts.
//
// Exit codes: 0 success, 1 domain error, 2 usage error, 3 theorem check failed.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "graphon_cheeger/graphon_cheeger.hpp"

namespace gc = graphon_cheeger;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTheorem = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GraphonOptions {
    std::string preset;
    std::string input;
    std::string format = "dense-text";
    std::size_t n = 0;
    std::size_t subsample = 8;
    bool require_connected = true;
};

struct OutputOptions {
    std::string out;
    std::string csv;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("GRAPHON_CHEEGER_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("GRAPHON_CHEEGER_SEED is not an unsigned integer: ") + env);
        }
    }
    return 0;
}

void add_graphon_options(CLI::App* cmd, GraphonOptions& g) {
    auto* preset = cmd->add_option("--preset", g.preset, "kernel preset: constant:p | sbm:blocks,p,q | product | mean | min");
    auto* input = cmd->add_option("--input", g.input, "kernel file")->check(CLI::ExistingFile);
    preset->excludes(input);
    cmd->add_option("--format", g.format, "kernel file format: dense-text | csv | json")
        ->check(CLI::IsMember({"dense-text", "csv", "json"}));
    cmd->add_option("--n", g.n, "cells for preset discretization")->check(CLI::PositiveNumber);
    cmd->add_option("--subsample", g.subsample, "sub-points per cell axis for presets")->check(CLI::PositiveNumber);
    cmd->add_flag("--require-connected,!--no-require-connected", g.require_connected,
                  "reject disconnected kernels (default on)");
}

void add_output_options(CLI::App* cmd, OutputOptions& o) {
    cmd->add_option("--out", o.out, "write the JSON report here instead of stdout");
    cmd->add_option("--csv", o.csv, "also write a CSV table here");
}

gc::Json input_json(const GraphonOptions& g) {
    gc::Json j;
    if (!g.preset.empty()) {
        j["preset"] = gc::parse_preset(g.preset).to_string();
        j["n"] = g.n;
        j["subsample"] = g.subsample;
    } else {
        j["input"] = g.input;
        j["format"] = g.format;
    }
    j["require_connected"] = g.require_connected;
    return j;
}

gc::StepGraphon load(const GraphonOptions& g) {
    if (g.preset.empty() == g.input.empty()) throw UsageError("exactly one of --preset or --input is required");
    if (!g.preset.empty()) {
        if (g.n == 0) throw UsageError("--n is required with --preset");
        return gc::discretize_preset(gc::parse_preset(g.preset), g.n, g.subsample, g.require_connected);
    }
    return gc::load_graphon(g.input, gc::parse_kernel_format(g.format), g.require_connected);
}

GraphonOptions graphon_options_from_json(const gc::Json& in) {
    GraphonOptions g;
    if (in.contains("preset")) {
        g.preset = in.at("preset").get<std::string>();
        g.n = in.at("n").get<std::size_t>();
        g.subsample = in.value("subsample", std::size_t{8});
    } else {
        g.input = in.at("input").get<std::string>();
        g.format = in.value("format", std::string("dense-text"));
    }
    g.require_connected = in.value("require_connected", true);
    return g;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gc::Error(gc::ErrorCode::ParseError, "cannot write '" + path + "'");
    out << text;
}

gc::Json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gc::Error(gc::ErrorCode::ParseError, "cannot open '" + path + "'");
    try {
        return gc::Json::parse(in);
    } catch (const gc::Json::exception& e) {
        throw gc::Error(gc::ErrorCode::ParseError, path + ": " + e.what());
    }
}

std::optional<gc::OracleResult> maybe_oracle(const gc::StepGraphon& w, std::size_t k, std::uint64_t limit) {
    if (gc::oracle_work(w.n(), k) > limit) return std::nullopt;
    return gc::brute_force_hk(w, k, limit);
}

/// Rebuilds a PartitionResult from its sets, recomputing every derived value.
gc::PartitionResult recompute(const gc::StepGraphon& w, const gc::Json& part) {
    gc::PartitionResult r;
    r.k = part.at("k").get<std::size_t>();
    r.sets = gc::cellsets_from_json(part.at("sets"), w.n());
    if (r.sets.size() != r.k) throw gc::Error(gc::ErrorCode::DimensionMismatch, "sets do not match k");
    for (std::size_t i = 0; i < r.sets.size(); ++i) {
        for (std::size_t j = i + 1; j < r.sets.size(); ++j) {
            if (r.sets[i].intersects(r.sets[j])) throw gc::Error(gc::ErrorCode::OverlappingSets, "partition sets overlap");
        }
    }
    for (const gc::CellSet& a : r.sets) {
        r.expansions.push_back(gc::expansion(w, a));
        r.h_alg = std::max(r.h_alg, r.expansions.back());
    }
    const gc::SpectralBasis basis = gc::eigen_k(w, r.k);
    r.eigenvalues = basis.eigenvalues;
    r.lambda_discrete = basis.eigenvalues.back();
    r.lambda_graphon = gc::graphon_lambda_from_discrete(r.lambda_discrete);
    r.upper_bound = gc::upper_bound(r.k, r.lambda_discrete);
    r.seed = part.value("seed", std::uint64_t{0});
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Higher-order Cheeger partitions of step graphons"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "graphon-cheeger 1.0.0");

    GraphonOptions graph;
    OutputOptions output;
    std::size_t k = 2;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t max_tries = 64;
    double slack = 0.0;
    std::uint64_t oracle_limit = gc::kDefaultOracleLimit;
    bool verify = false;
    std::string result_path;
    std::string function_path;
    std::size_t eigenvector = 0;

    const auto add_k = [&](CLI::App* cmd) { cmd->add_option("--k", k, "number of parts")->check(CLI::PositiveNumber); };
    const auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "base seed for grid shifts (default: $GRAPHON_CHEEGER_SEED or 0)")
            ->each([&](const std::string&) { seed_given = true; });
    };

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues λ_1..λ_k, discrete and graphon");
    add_graphon_options(spectrum, graph);
    add_output_options(spectrum, output);
    add_k(spectrum);

    auto* partition = app.add_subcommand("partition", "run the k-way partitioning pipeline");
    add_graphon_options(partition, graph);
    add_output_options(partition, output);
    add_k(partition);
    add_seed(partition);
    partition->add_option("--max-tries", max_tries, "grid shifts to try");
    partition->add_option("--slack", slack, "accepted shortfall below total mass k - 1/4")->check(CLI::NonNegativeNumber);
    partition->add_option("--oracle-limit", oracle_limit, "largest (k+1)^n enumerated by the oracle");
    partition->add_flag("--verify", verify, "append the theorem report (and oracle when small enough)");

    auto* oracle = app.add_subcommand("oracle", "exhaustive cell-granularity h_W(k)");
    add_graphon_options(oracle, graph);
    add_output_options(oracle, output);
    add_k(oracle);
    oracle->add_option("--oracle-limit", oracle_limit, "largest (k+1)^n to enumerate");

    auto* verify_cmd = app.add_subcommand("verify", "check λ_k/2 <= h <= √8000 k^3.5 √λ_k for a partition");
    add_graphon_options(verify_cmd, graph);
    add_output_options(verify_cmd, output);
    add_k(verify_cmd);
    add_seed(verify_cmd);
    verify_cmd->add_option("--result", result_path, "partition report to re-verify")->check(CLI::ExistingFile);
    verify_cmd->add_option("--max-tries", max_tries, "grid shifts to try when partitioning");
    verify_cmd->add_option("--slack", slack, "accepted mass shortfall when partitioning")->check(CLI::NonNegativeNumber);
    verify_cmd->add_option("--oracle-limit", oracle_limit, "largest (k+1)^n enumerated by the oracle");

    auto* sweep = app.add_subcommand("sweep", "sweep cut of a single vertex function");
    add_graphon_options(sweep, graph);
    add_output_options(sweep, output);
    auto* fn_opt = sweep->add_option("--function", function_path, "file of n whitespace-separated reals")
                       ->check(CLI::ExistingFile);
    auto* ev_opt = sweep->add_option("--eigenvector", eigenvector, "use eigenfunction f_j (1-based)")
                       ->check(CLI::PositiveNumber);
    fn_opt->excludes(ev_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (!seed_given) seed = default_seed();
        gc::Json report;

        if (verify_cmd->parsed() && !result_path.empty()) {
            const gc::Json prior = read_json(result_path);
            if (graph.preset.empty() && graph.input.empty()) graph = graphon_options_from_json(prior.at("input"));
            const gc::StepGraphon w = load(graph);
            const gc::PartitionResult r = recompute(w, prior.at("partition"));
            const auto orc = maybe_oracle(w, r.k, oracle_limit);
            gc::TheoremReport rep = gc::verify_theorem(w, r.k, r, orc);
            const double recorded = gc::real_from_json(prior.at("partition").at("h_alg"));
            rep.checks.push_back(gc::make_check("recorded h_alg matches recomputation", std::abs(recorded - r.h_alg), 1e-12));
            report["input"] = input_json(graph);
            report["spectrum"] = gc::spectrum_to_json(r.eigenvalues);
            report["partition"] = {{"k", r.k},
                                   {"sets", gc::cellsets_to_json(r.sets)},
                                   {"expansions", gc::reals_to_json(r.expansions)},
                                   {"h_alg", gc::real_to_json(r.h_alg)},
                                   {"bound", gc::real_to_json(r.upper_bound)}};
            if (orc) report["oracle"] = gc::oracle_to_json(*orc);
            report["verify"] = gc::verify_to_json(rep);
            write_text(output.out, gc::canonical_dump(report));
            return rep.passed() ? 0 : kExitTheorem;
        }

        const gc::StepGraphon w = load(graph);
        report["input"] = input_json(graph);

        if (spectrum->parsed()) {
            if (k > w.n()) throw gc::Error(gc::ErrorCode::KTooLarge, "k exceeds n");
            report["input"]["k"] = k;
            const gc::SpectralBasis basis = gc::eigen_k(w, k);
            report["spectrum"] = gc::spectrum_to_json(basis.eigenvalues);
            write_text(output.out, gc::canonical_dump(report));
            if (!output.csv.empty()) write_text(output.csv, gc::spectrum_csv(basis.eigenvalues));
            return 0;
        }

        if (partition->parsed() || verify_cmd->parsed()) {
            report["input"]["k"] = k;
            report["input"]["seed"] = seed;
            report["input"]["max_tries"] = max_tries;
            report["input"]["slack"] = slack;
            gc::PartitionConfig cfg;
            cfg.max_tries = max_tries;
            cfg.slack = slack;
            const gc::PartitionResult r = gc::k_way_partition(w, k, seed, cfg);
            report["spectrum"] = gc::spectrum_to_json(r.eigenvalues);
            report["partition"] = gc::partition_to_json(r);
            int code = 0;
            if (verify || verify_cmd->parsed()) {
                const auto orc = maybe_oracle(w, k, oracle_limit);
                const gc::TheoremReport rep = gc::verify_theorem(w, k, r, orc);
                if (orc) report["oracle"] = gc::oracle_to_json(*orc);
                report["verify"] = gc::verify_to_json(rep);
                if (!rep.passed()) code = kExitTheorem;
            }
            write_text(output.out, gc::canonical_dump(report));
            if (!output.csv.empty()) write_text(output.csv, gc::partition_csv(r));
            return code;
        }

        if (oracle->parsed()) {
            report["input"]["k"] = k;
            report["oracle"] = gc::oracle_to_json(gc::brute_force_hk(w, k, oracle_limit));
            write_text(output.out, gc::canonical_dump(report));
            return 0;
        }

        if (sweep->parsed()) {
            gc::VertexFunction g;
            if (!function_path.empty()) {
                std::ifstream in(function_path);
                std::vector<double> vals;
                std::string tok;
                std::size_t pos = 0;
                while (in >> tok) vals.push_back(gc::detail::parse_real(tok, 1, ++pos));
                if (vals.size() != w.n()) {
                    throw gc::Error(gc::ErrorCode::DimensionMismatch, "function has " + std::to_string(vals.size()) +
                                                                          " values, graphon has " + std::to_string(w.n()));
                }
                g = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
                report["input"]["function"] = function_path;
            } else if (eigenvector > 0) {
                const gc::SpectralBasis basis = gc::eigen_k(w, eigenvector);
                g = basis.functions.back();
                report["input"]["eigenvector"] = eigenvector;
            } else {
                throw UsageError("sweep needs --function or --eigenvector");
            }
            const gc::SweepResult s = gc::sweep_cut(w, g);
            report["sweep"] = gc::sweep_to_json(s);
            write_text(output.out, gc::canonical_dump(report));
            if (!output.csv.empty()) write_text(output.csv, gc::sweep_csv(s));
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const gc::Error& e) {
        std::cerr << gc::Json{{"error", std::string(gc::to_string(e.code()))}, {"message", e.what()}}.dump() << "\n";
        return kExitDomain;
    } catch (const gc::Json::exception& e) {
        std::cerr << gc::Json{{"error", "ParseError"}, {"message", e.what()}}.dump() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}

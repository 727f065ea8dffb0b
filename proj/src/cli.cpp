#include "admg/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "admg/bench.hpp"
#include "admg/discovery.hpp"
#include "admg/errors.hpp"
#include "admg/graph.hpp"
#include "admg/graph_io.hpp"
#include "admg/io_util.hpp"
#include "admg/linsem.hpp"
#include "admg/penalty.hpp"
#include "admg/ricf.hpp"
#include "admg/scoring.hpp"
#include "admg/sem_io.hpp"

namespace admg::cli {

namespace {

using nlohmann::json;

// Rounds every number to 12 significant digits so printed JSON is stable.
json rounded(const json& j) {
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) return nullptr;
        return parse_double(format_fixed12(v));
    }
    if (j.is_array() || j.is_object()) {
        json out = j;
        for (auto it = out.begin(); it != out.end(); ++it) *it = rounded(*it);
        return out;
    }
    return j;
}

std::string dump(const json& j) { return rounded(j).dump(2) + "\n"; }

json number_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

struct PenaltyFlags {
    std::string mode = "power";
    double c_directed = 1.0;
    double c_bidirected = 2.0;
    double tanh_scale = std::log(5000.0);
    int exp_terms = 20;

    void add(CLI::App* app) {
        app->add_option("--penalty-mode", mode, "Constraint form: power ((I + cA)^d) or exp (truncated series)")
            ->check(CLI::IsMember({"power", "exp"}))
            ->capture_default_str();
        app->add_option("--c-directed", c_directed, "Power-form constant for directed parts")->capture_default_str();
        app->add_option("--c-bidirected", c_bidirected, "Power-form constant for bidirected parts")
            ->capture_default_str();
        app->add_option("--tanh-scale", tanh_scale, "Greenery tanh sharpness")->capture_default_str();
        app->add_option("--exp-terms", exp_terms, "Series terms in exp mode")->capture_default_str();
    }

    PenaltyConfig config() const {
        PenaltyConfig cfg;
        cfg.mode = mode == "exp" ? PenaltyMode::MatrixExponential : PenaltyMode::MatrixPower;
        cfg.c_directed = c_directed;
        cfg.c_bidirected = c_bidirected;
        cfg.tanh_scale = tanh_scale;
        cfg.exp_series_terms = exp_terms;
        return cfg;
    }
};

struct DiscoveryFlags {
    Hyperparams hp;
    std::string cls = "bowfree";
    PenaltyFlags penalty;

    void add(CLI::App* app, bool class_required) {
        auto* c = app->add_option("--class", cls, "Graph class: ancestral, arid or bowfree")
                      ->check(CLI::IsMember({"ancestral", "arid", "bowfree"}));
        if (class_required) {
            c->required();
        } else {
            c->capture_default_str();
        }
        app->add_option("--lambda", hp.lambda, "Regularization strength")->capture_default_str();
        app->add_option("--omega", hp.omega, "Edge threshold")->capture_default_str();
        app->add_option("--restarts", hp.restarts, "Random restarts")->capture_default_str();
        app->add_option("--seed", hp.seed, "Random seed")->capture_default_str();
        app->add_option("--h-tol", hp.h_tol, "Constraint tolerance")->capture_default_str();
        app->add_option("--ricf-tol", hp.ricf_tol, "RICF step tolerance")->capture_default_str();
        app->add_option("--max-dual-iterations", hp.max_dual_iterations, "Dual ascent iterations")
            ->capture_default_str();
        app->add_option("--ricf-increment", hp.ricf_increment, "RICF budget increment per dual iteration")
            ->capture_default_str();
        app->add_option("--ricf-cap", hp.ricf_budget_cap, "Largest RICF budget")->capture_default_str();
        app->add_option("--progress-rate", hp.progress_rate, "Required constraint decrease factor r")
            ->capture_default_str();
        app->add_option("--rho-init", hp.rho_init, "Initial penalty weight")->capture_default_str();
        app->add_option("--rho-factor", hp.rho_factor, "Penalty weight growth factor")->capture_default_str();
        app->add_option("--rho-max", hp.rho_max, "Largest penalty weight")->capture_default_str();
        app->add_option("--init-range", hp.init_range, "Half-width of random restart initialization")
            ->capture_default_str();
        penalty.add(app);
    }

    Hyperparams get() const {
        Hyperparams out = hp;
        out.cls = parse_graph_class(cls);
        out.penalty = penalty.config();
        return out;
    }
};

std::vector<std::size_t> parse_size_list(const std::string& text, const char* flag) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double v = parse_double(item);
        if (!(v >= 1.0) || v != std::floor(v)) {
            throw ArgumentError(std::string(flag) + ": '" + item + "' is not a positive integer");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw ArgumentError(std::string(flag) + " must list at least one value");
    return out;
}

void check_names_match(const std::vector<std::string>& data_names, const Admg& g, const char* what) {
    if (data_names != g.names()) {
        throw ArgumentError(std::string(what) + " vertices do not match the data columns (order matters)");
    }
}

json properties_json(const Admg& g, const PenaltyConfig& cfg) {
    const GraphProperties props = check_properties(g);
    const Matrix d = g.directed_matrix().cast<double>();
    const Matrix b = g.bidirected_matrix().cast<double>();
    json penalties = {{"acyclicity", acyclicity_penalty(d, cfg)},
                      {"ancestral", structure_penalty(GraphClass::Ancestral, d, b, cfg)},
                      {"arid", structure_penalty(GraphClass::Arid, d, b, cfg)},
                      {"bow_free", structure_penalty(GraphClass::BowFree, d, b, cfg)}};
    json c_trees = json::array();
    if (props.acyclic) {
        for (std::size_t v = 0; v < g.size(); ++v) {
            const Reachability r = reachable(g, v);
            if (r.reachable || !r.c_tree_vertices) continue;
            json verts = json::array();
            for (std::size_t u : *r.c_tree_vertices) verts.push_back(g.names()[u]);
            c_trees.push_back({{"root", g.names()[v]}, {"vertices", verts}});
        }
    }
    return {{"acyclic", props.acyclic},
            {"ancestral", props.ancestral},
            {"arid", props.arid},
            {"bow_free", props.bow_free},
            {"penalties", penalties},
            {"c_trees", c_trees}};
}

json params_summary(const Dataset& data, const SemParams& p, const ScoreConfig& cfg) {
    const double fit = gaussian_neg2_loglik(data, p);
    return {{"neg2loglik", fit},
            {"bic", bic(data, p, cfg)},
            {"abic", abic(data, p, cfg)},
            {"nonzero_parameters", nonzero_parameter_count(p, cfg.zero_tol)}};
}

struct Commands {
    CLI::App app{"Structure learning for acyclic directed mixed graphs", "admg"};

    // simulate
    std::string sim_graph, sim_out, sim_params_in, sim_params_out;
    std::size_t sim_n = 1000;
    std::uint64_t sim_seed = 0;
    // discover
    DiscoveryFlags disc;
    std::string disc_data, disc_out, disc_trace, disc_params_out;
    // check
    std::string check_graph;
    PenaltyFlags check_penalty;
    // score
    std::string score_data, score_params, score_graph, score_params_out;
    bool score_fit = false;
    double score_lambda = 0.05;
    double score_zero_tol = 0.05;
    double score_tol = 1e-8;
    int score_max_iter = 500;
    // evaluate
    std::string eval_pred, eval_true;
    // project
    std::string proj_graph, proj_out;
    // generate
    std::size_t gen_d = 10;
    std::string gen_class = "bowfree", gen_out;
    double gen_p_dir = 0.4, gen_p_bi = 0.3;
    std::uint64_t gen_seed = 0;
    // bench
    DiscoveryFlags bench_disc;
    std::string bench_n = "500,1000,1500,2000", bench_out;
    std::size_t bench_seeds = 100;
    std::uint64_t bench_seed = 0;
    RandomGraphConfig bench_random;

    CLI::App* simulate = nullptr;
    CLI::App* discover = nullptr;
    CLI::App* check = nullptr;
    CLI::App* score = nullptr;
    CLI::App* evaluate = nullptr;
    CLI::App* project = nullptr;
    CLI::App* generate = nullptr;
    CLI::App* bench = nullptr;
    CLI::App* bench_verma = nullptr;
    CLI::App* bench_rand = nullptr;

    Commands() {
        app.require_subcommand(1);

        simulate = app.add_subcommand("simulate", "Sample data from a linear SEM on a graph");
        simulate->add_option("--graph", sim_graph, "Graph file (.json or edge list)")->required();
        simulate->add_option("--n", sim_n, "Number of samples")->capture_default_str();
        simulate->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
        simulate->add_option("--params", sim_params_in, "Use these parameters instead of drawing them");
        simulate->add_option("--out", sim_out, "Output CSV")->required();
        simulate->add_option("--params-out", sim_params_out, "Write the generating parameters as JSON");

        discover = app.add_subcommand("discover", "Learn a graph from data");
        discover->add_option("--data", disc_data, "Input CSV")->required();
        discover->add_option("--out", disc_out, "Output graph JSON")->required();
        discover->add_option("--trace", disc_trace, "Write the dual-ascent trace as CSV");
        discover->add_option("--params-out", disc_params_out, "Write fitted parameters as JSON");
        disc.add(discover, true);

        check = app.add_subcommand("check", "Report graph-class properties and penalty values");
        check->add_option("--graph", check_graph, "Graph file")->required();
        check_penalty.add(check);

        score = app.add_subcommand("score", "Score parameters, or a graph fitted by RICF, on data");
        score->add_option("--data", score_data, "Input CSV")->required();
        auto* sp = score->add_option("--params", score_params, "Parameter JSON to score");
        auto* sg = score->add_option("--graph", score_graph, "Graph whose support is fitted (with --fit)");
        sp->excludes(sg);
        score->add_flag("--fit", score_fit, "Fit the --graph support by RICF before scoring");
        score->add_option("--lambda", score_lambda, "ABIC regularization strength")->capture_default_str();
        score->add_option("--zero-tol", score_zero_tol, "Threshold for counting parameters")->capture_default_str();
        score->add_option("--tol", score_tol, "RICF step tolerance for --fit")->capture_default_str();
        score->add_option("--max-iterations", score_max_iter, "RICF iterations for --fit")->capture_default_str();
        score->add_option("--params-out", score_params_out, "Write fitted parameters as JSON");

        evaluate = app.add_subcommand("evaluate", "Compare a predicted graph against the truth");
        evaluate->add_option("--pred", eval_pred, "Predicted graph")->required();
        evaluate->add_option("--true", eval_true, "True graph")->required();

        project = app.add_subcommand("project", "Maximal ancestral projection of a graph");
        project->add_option("--graph", proj_graph, "Graph file")->required();
        project->add_option("--out", proj_out, "Output graph file")->required();

        generate = app.add_subcommand("generate", "Draw a random graph");
        generate->add_option("--d", gen_d, "Number of vertices")->capture_default_str();
        generate->add_option("--class", gen_class, "Graph class")
            ->check(CLI::IsMember({"ancestral", "arid", "bowfree"}))
            ->capture_default_str();
        generate->add_option("--p-directed", gen_p_dir, "Directed edge probability")->capture_default_str();
        generate->add_option("--p-bidirected", gen_p_bi, "Bidirected edge probability")->capture_default_str();
        generate->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
        generate->add_option("--out", gen_out, "Output graph file")->required();

        bench = app.add_subcommand("bench", "Run recovery experiments");
        bench->require_subcommand(1);
        bench_verma = bench->add_subcommand("verma", "Recovery of graphs with a Verma constraint");
        bench_verma->add_option("--n", bench_n, "Comma-separated sample sizes")->capture_default_str();
        bench_verma->add_option("--seeds", bench_seeds, "Runs per sample size")->capture_default_str();
        bench_verma->add_option("--bench-seed", bench_seed, "Seed for data generation")->capture_default_str();
        bench_verma->add_option("--out", bench_out, "Report CSV")->required();
        bench_disc.add(bench_verma, false);

        bench_rand = bench->add_subcommand("random", "Skeleton and endpoint recovery on random graphs");
        bench_rand->add_option("--d", bench_random.d, "Number of vertices")->capture_default_str();
        bench_rand->add_option("--graphs", bench_random.graphs, "Number of graphs")->capture_default_str();
        bench_rand->add_option("--n", bench_random.n, "Samples per graph")->capture_default_str();
        bench_rand->add_option("--p-directed", bench_random.p_directed, "Directed edge probability")
            ->capture_default_str();
        bench_rand->add_option("--p-bidirected", bench_random.p_bidirected, "Bidirected edge probability")
            ->capture_default_str();
        bench_rand->add_option("--bench-seed", bench_random.seed, "Seed for graph and data generation")
            ->capture_default_str();
        bench_rand->add_option("--out", bench_out, "Report CSV")->required();
        // The random bench shares the discovery flags object with verma; only one runs per call.
        bench_disc.add(bench_rand, false);
    }

    int dispatch(std::ostream& out, std::ostream& err) {
        if (simulate->parsed()) return do_simulate(out);
        if (discover->parsed()) return do_discover(out, err);
        if (check->parsed()) return do_check(out);
        if (score->parsed()) return do_score(out);
        if (evaluate->parsed()) return do_evaluate(out);
        if (project->parsed()) return do_project(out);
        if (generate->parsed()) return do_generate(out);
        if (bench_verma->parsed()) return do_bench_verma(out);
        if (bench_rand->parsed()) return do_bench_random(out);
        throw ArgumentError("no subcommand given");
    }

    int do_simulate(std::ostream& out) {
        const Admg g = load_graph(sim_graph);
        std::mt19937_64 rng(sim_seed);
        SemParams p;
        if (!sim_params_in.empty()) {
            p = load_params(sim_params_in);
            if (p.names != g.names()) throw ArgumentError("--params names do not match the graph vertices");
        } else {
            p = random_parameters(g, rng);
        }
        const Dataset data = sample_data(p, sim_n, rng);
        save_dataset(data, sim_out);
        if (!sim_params_out.empty()) save_params(p, sim_params_out);
        out << dump({{"rows", data.rows()}, {"columns", data.names()}, {"out", sim_out}});
        return kSuccess;
    }

    int do_discover(std::ostream& out, std::ostream& err) {
        const Dataset data = load_dataset(disc_data);
        const DiscoveryResult res = admg::discover(data, disc.get());
        save_graph(res.graph, disc_out);
        if (!disc_trace.empty()) write_file_atomic(disc_trace, trace_to_csv(res.trace));
        if (!disc_params_out.empty()) save_params(res.params, disc_params_out);
        for (const auto& w : res.warnings) err << "warning: " << w << "\n";
        out << dump({{"converged", res.converged},
                     {"h", res.h},
                     {"bic", number_or_null(res.score)},
                     {"abic", number_or_null(res.abic)},
                     {"selected_restart", res.selected_restart},
                     {"dual_iterations", res.trace.size()},
                     {"graph", graph_to_json(res.graph)}});
        return kSuccess;
    }

    int do_check(std::ostream& out) {
        const Admg g = load_graph(check_graph);
        out << dump(properties_json(g, check_penalty.config()));
        return kSuccess;
    }

    int do_score(std::ostream& out) {
        const Dataset data = load_dataset(score_data);
        ScoreConfig cfg;
        cfg.lambda = score_lambda;
        cfg.zero_tol = score_zero_tol;
        SemParams p;
        json extra = json::object();
        if (!score_params.empty()) {
            if (score_fit) throw ArgumentError("--fit needs --graph, not --params");
            p = load_params(score_params);
            if (p.names != data.names()) throw ArgumentError("--params names do not match the data columns");
        } else if (!score_graph.empty()) {
            if (!score_fit) throw ArgumentError("--graph needs --fit");
            const Admg g = load_graph(score_graph);
            check_names_match(data.names(), g, "--graph");
            RicfOptions opts;
            opts.support = g;
            opts.tol = score_tol;
            opts.max_iterations = score_max_iter;
            SemParams init;
            init.names = data.names();
            const auto d = static_cast<Eigen::Index>(data.cols());
            init.delta = Matrix::Zero(d, d);
            init.beta = Matrix::Zero(d, d);
            init.beta.diagonal() = data.covariance().diagonal();
            const RicfResult fit = regularized_ricf(data, init, opts);
            p = fit.params;
            extra = {{"ricf_iterations", fit.iterations}, {"ricf_converged", fit.converged}};
        } else {
            throw ArgumentError("score needs --params or --graph with --fit");
        }
        if (!score_params_out.empty()) save_params(p, score_params_out);
        json result = params_summary(data, p, cfg);
        result.update(extra);
        out << dump(result);
        return kSuccess;
    }

    int do_evaluate(std::ostream& out) {
        const Admg pred = load_graph(eval_pred);
        const Admg truth = load_graph(eval_true);
        out << dump(metrics_to_json(evaluate_graphs(pred, truth)));
        return kSuccess;
    }

    int do_project(std::ostream& out) {
        const Admg g = mag_projection(load_graph(proj_graph));
        save_graph(g, proj_out);
        out << dump(graph_to_json(g));
        return kSuccess;
    }

    int do_generate(std::ostream& out) {
        std::mt19937_64 rng(gen_seed);
        RandomGraphConfig cfg;
        cfg.d = gen_d;
        cfg.p_directed = gen_p_dir;
        cfg.p_bidirected = gen_p_bi;
        const Admg g = random_target(cfg, parse_graph_class(gen_class), rng);
        save_graph(g, gen_out);
        out << dump(graph_to_json(g));
        return kSuccess;
    }

    int do_bench_verma(std::ostream& out) {
        const auto ns = parse_size_list(bench_n, "--n");
        const VermaReport report = verma_recovery_experiment(ns, bench_seeds, bench_disc.get(), bench_seed);
        write_file_atomic(bench_out, verma_report_csv(report));
        json rows = json::array();
        for (const auto& s : report.summaries) {
            rows.push_back({{"n", s.n},
                            {"runs", s.runs},
                            {"true", s.true_rate},
                            {"super", s.super_rate},
                            {"wrong", s.wrong_rate},
                            {"convergence_failures", s.convergence_failures}});
        }
        out << dump(rows);
        return kSuccess;
    }

    int do_bench_random(std::ostream& out) {
        const RandomReport report = random_graph_experiment(bench_random, bench_disc.get());
        write_file_atomic(bench_out, random_report_csv(report));
        auto opt = [](const std::optional<double>& v) -> json {
            if (!v) return nullptr;
            return *v;
        };
        const auto& m = report.mean;
        out << dump({{"graphs", report.runs.size()},
                     {"convergence_failures", report.convergence_failures},
                     {"skeleton_tpr", opt(m.skeleton_tpr)},
                     {"skeleton_fdr", opt(m.skeleton_fdr)},
                     {"arrowhead_tpr", opt(m.arrowhead_tpr)},
                     {"arrowhead_fdr", opt(m.arrowhead_fdr)},
                     {"tail_tpr", opt(m.tail_tpr)},
                     {"tail_fdr", opt(m.tail_fdr)}});
        return kSuccess;
    }
};

void report_error(std::ostream& err, const char* kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Commands cmd;
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        cmd.app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = cmd.app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }
    try {
        return cmd.dispatch(out, err);
    } catch (const NumericError& e) {
        report_error(err, "numeric", e.what());
        return kNumericError;
    } catch (const GenerationError& e) {
        report_error(err, "generation", e.what());
        return kNumericError;
    } catch (const Error& e) {
        report_error(err, "usage", e.what());
        return kUsageError;
    } catch (const std::filesystem::filesystem_error& e) {
        report_error(err, "usage", e.what());
        return kUsageError;
    } catch (const nlohmann::json::exception& e) {
        report_error(err, "usage", e.what());
        return kUsageError;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace admg::cli

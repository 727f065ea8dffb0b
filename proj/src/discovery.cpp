#include "admg/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "admg/io_util.hpp"
#include "admg/parallel.hpp"
#include "admg/scoring.hpp"

namespace admg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double safe_neg2_loglik(const Dataset& data, const SemParams& p) {
    try {
        return gaussian_neg2_loglik(data, p);
    } catch (const NumericError&) {
        return kNaN;
    }
}

double safe_abic(const Dataset& data, const SemParams& p, const Hyperparams& hp) {
    try {
        return abic(data, p, ScoreConfig{hp.lambda, std::nullopt, hp.omega});
    } catch (const NumericError&) {
        return kInf;
    }
}

bool in_class(const SemParams& p, const Hyperparams& hp) {
    return check_properties(threshold_to_graph(p, hp.omega)).satisfies(hp.cls);
}

}  // namespace

void Hyperparams::validate(std::size_t d) const {
    if (!(lambda >= 0.0)) throw ArgumentError("lambda must be non-negative");
    if (!(omega >= 0.0)) throw ArgumentError("omega must be non-negative");
    if (!(h_tol > 0.0)) throw ArgumentError("h_tol must be positive");
    if (!(ricf_tol > 0.0)) throw ArgumentError("ricf_tol must be positive");
    if (max_dual_iterations < 1) throw ArgumentError("max_dual_iterations must be at least 1");
    if (ricf_increment < 0) throw ArgumentError("ricf_increment must be non-negative");
    if (ricf_budget_cap < 1) throw ArgumentError("ricf_budget_cap must be at least 1");
    if (!(progress_rate > 0.0 && progress_rate < 1.0)) throw ArgumentError("progress_rate must lie in (0, 1)");
    if (!(rho_init > 0.0)) throw ArgumentError("rho_init must be positive");
    if (!(rho_factor > 1.0)) throw ArgumentError("rho_factor must exceed 1");
    if (!(rho_max >= rho_init)) throw ArgumentError("rho_max must be at least rho_init");
    if (restarts < 1) throw ArgumentError("restarts must be at least 1");
    if (!(init_range >= 0.0)) throw ArgumentError("init_range must be non-negative");
    penalty.validate(d);
}

SemParams initial_params(const Dataset& data, const Hyperparams& hp, std::size_t restart) {
    const auto d = static_cast<Eigen::Index>(data.cols());
    SemParams p;
    p.names = data.names();
    p.delta = Matrix::Zero(d, d);
    p.beta = Matrix::Zero(d, d);
    if (restart > 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(hp.seed), static_cast<std::uint32_t>(hp.seed >> 32),
                          static_cast<std::uint32_t>(restart)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> unif(-hp.init_range, hp.init_range);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                if (i != j) p.delta(i, j) = unif(rng);
            }
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = i + 1; j < d; ++j) {
                p.beta(i, j) = p.beta(j, i) = unif(rng);
            }
        }
    }
    p.beta.diagonal() = data.covariance().diagonal();
    return p;
}

RestartRun dual_ascent(const Dataset& data, const Hyperparams& hp, const SemParams& init) {
    hp.validate(data.cols());
    RestartRun run;
    run.params = init;

    RicfOptions opts;
    opts.tol = hp.ricf_tol;
    opts.cls = hp.cls;
    opts.penalty = hp.penalty;
    opts.lambda = hp.lambda;
    opts.inner = hp.inner;
    opts.alpha = 1.0;
    double rho = hp.rho_init;
    int budget = 1;
    double h = class_penalty(run.params, hp.cls, hp.penalty);

    try {
        int iteration = 0;
        do {
            ++iteration;
            RicfResult fit;
            double h_new = 0.0;
            while (true) {
                opts.rho = rho;
                opts.max_iterations = budget;
                fit = regularized_ricf(data, run.params, opts);
                h_new = class_penalty(fit.params, hp.cls, hp.penalty);
                if (h <= hp.h_tol || h_new < hp.progress_rate * h || rho >= hp.rho_max) break;
                rho = std::min(rho * hp.rho_factor, hp.rho_max);
            }
            for (auto& w : fit.warnings) run.warnings.push_back(std::move(w));

            DualIteration rec;
            rec.iteration = iteration;
            rec.rho = rho;
            rec.alpha = opts.alpha;
            rec.h = h_new;
            rec.ricf_iterations = fit.iterations;
            rec.step_norm = fit.last_step_norm;

            run.params = std::move(fit.params);
            h = h_new;
            opts.alpha += rho * h;
            budget = std::min(budget + hp.ricf_increment, hp.ricf_budget_cap);

            rec.neg2loglik = safe_neg2_loglik(data, run.params);
            rec.abic = safe_abic(data, run.params, hp);
            run.trace.push_back(rec);
        } while (h > hp.h_tol && iteration < hp.max_dual_iterations);
    } catch (const RicfError& e) {
        run.params = e.last_state.params;
        run.diverged = true;
        run.error = e.what();
        h = class_penalty(run.params, hp.cls, hp.penalty);
    }

    run.h = h;
    run.abic = safe_abic(data, run.params, hp);
    run.converged = !run.diverged && std::isfinite(h) && h <= hp.h_tol && in_class(run.params, hp);
    return run;
}

DiscoveryResult discover(const Dataset& data, const Hyperparams& hp) {
    hp.validate(data.cols());
    DiscoveryResult result;
    if (data.rows() < data.cols() + 1) {
        result.warnings.push_back("fewer samples than variables + 1; estimates may be unreliable");
    }

    const auto restarts = static_cast<std::size_t>(hp.restarts);
    result.runs.resize(restarts);
    parallel_for(restarts, [&](std::size_t r) {
        result.runs[r] = dual_ascent(data, hp, initial_params(data, hp, r));
    }, hp.threads == 0 ? thread_count() : hp.threads);

    std::size_t best = restarts;
    for (std::size_t r = 0; r < restarts; ++r) {
        const RestartRun& run = result.runs[r];
        if (run.converged && (best == restarts || run.abic < result.runs[best].abic)) best = r;
    }
    if (best == restarts) {
        for (std::size_t r = 0; r < restarts; ++r) {
            const RestartRun& run = result.runs[r];
            if (run.diverged || !std::isfinite(run.h)) continue;
            if (best == restarts || run.h < result.runs[best].h) best = r;
        }
    }
    if (best == restarts) throw DiscoveryError("every restart diverged", std::move(result.runs));

    const RestartRun& chosen = result.runs[best];
    result.selected_restart = best;
    result.params = chosen.params;
    result.graph = threshold_to_graph(chosen.params, hp.omega);
    result.trace = chosen.trace;
    result.converged = chosen.converged;
    result.h = chosen.h;
    result.abic = chosen.abic;
    try {
        result.score = bic(data, chosen.params, ScoreConfig{hp.lambda, std::nullopt, hp.omega});
    } catch (const NumericError&) {
        result.score = kNaN;
    }
    for (const auto& run : result.runs) {
        for (const auto& w : run.warnings) result.warnings.push_back(w);
    }
    return result;
}

Admg threshold_to_graph(const SemParams& p, double omega) {
    if (!(omega >= 0.0)) throw ArgumentError("omega must be non-negative");
    return p.support(omega);
}

std::string trace_to_csv(const std::vector<DualIteration>& trace) {
    std::string out = "iteration,rho,alpha,h,neg2loglik,abic,ricf_iters,step_norm\n";
    for (const auto& t : trace) {
        out += std::to_string(t.iteration) + ',' + format_fixed12(t.rho) + ',' + format_fixed12(t.alpha) + ',' +
               format_fixed12(t.h) + ',' + format_fixed12(t.neg2loglik) + ',' + format_fixed12(t.abic) + ',' +
               std::to_string(t.ricf_iterations) + ',' + format_fixed12(t.step_norm) + '\n';
    }
    return out;
}

}  // namespace admg

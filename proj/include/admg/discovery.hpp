#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "admg/errors.hpp"
#include "admg/graph.hpp"
#include "admg/linsem.hpp"
#include "admg/penalty.hpp"
#include "admg/ricf.hpp"
#include "admg/sem_params.hpp"

namespace admg {

struct Hyperparams {
    double lambda = 0.05;
    double omega = 0.05;
    double h_tol = 1e-8;
    double ricf_tol = 1e-4;
    int max_dual_iterations = 100;
    /// RICF iteration budget grows by this much per dual iteration.
    int ricf_increment = 1;
    int ricf_budget_cap = 500;
    double progress_rate = 0.25;
    double rho_init = 1.0;
    double rho_factor = 10.0;
    double rho_max = 1e16;
    int restarts = 5;
    /// Random restarts draw free entries uniformly from [-init_range, init_range].
    double init_range = 0.5;
    GraphClass cls = GraphClass::BowFree;
    PenaltyConfig penalty;
    std::uint64_t seed = 0;
    LbfgsOptions inner;
    /// Workers for the restarts; 0 uses thread_count().
    std::size_t threads = 0;

    void validate(std::size_t d) const;
};

struct DualIteration {
    int iteration = 0;
    double rho = 0.0;
    double alpha = 0.0;
    double h = 0.0;
    /// NaN when the fitted covariance is not positive definite.
    double neg2loglik = 0.0;
    double abic = 0.0;
    int ricf_iterations = 0;
    double step_norm = 0.0;
};

struct RestartRun {
    SemParams params;
    std::vector<DualIteration> trace;
    double h = 0.0;
    /// +inf when the fitted covariance is not positive definite.
    double abic = 0.0;
    bool converged = false;
    bool diverged = false;
    std::string error;
    std::vector<std::string> warnings;
};

struct DiscoveryResult {
    SemParams params;
    Admg graph;
    /// Dual-ascent trace of the selected restart.
    std::vector<DualIteration> trace;
    /// h <= h_tol at exit and the thresholded graph is in the requested class.
    bool converged = false;
    double h = 0.0;
    /// BIC of `params`; NaN when the covariance is not positive definite.
    double score = 0.0;
    double abic = 0.0;
    std::size_t selected_restart = 0;
    std::vector<RestartRun> runs;
    std::vector<std::string> warnings;
};

/// Every restart diverged numerically.
class DiscoveryError : public NumericError {
public:
    DiscoveryError(const std::string& what, std::vector<RestartRun> runs)
        : NumericError(what), runs(std::move(runs)) {}
    std::vector<RestartRun> runs;
};

/// Restart 0 starts from delta = 0 and beta = diag of the column variances;
/// later restarts draw free off-diagonal entries uniformly at random.
SemParams initial_params(const Dataset& data, const Hyperparams& hp, std::size_t restart);

/// One augmented-Lagrangian dual ascent from `init`.
RestartRun dual_ascent(const Dataset& data, const Hyperparams& hp, const SemParams& init);

DiscoveryResult discover(const Dataset& data, const Hyperparams& hp);

/// i -> j iff |delta(i, j)| > omega; i <-> j iff |beta(i, j)| > omega (i != j).
Admg threshold_to_graph(const SemParams& p, double omega);

/// CSV with columns iteration, rho, alpha, h, neg2loglik, abic, ricf_iters, step_norm.
std::string trace_to_csv(const std::vector<DualIteration>& trace);

}  // namespace admg

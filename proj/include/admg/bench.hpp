#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "admg/discovery.hpp"
#include "admg/graph.hpp"

namespace admg {

/// Counts behind one tpr/fdr pair.
struct RateCounts {
    std::size_t true_positives = 0;
    std::size_t truth_total = 0;
    std::size_t predicted_total = 0;
    std::size_t false_discoveries = 0;

    /// Empty when the denominator is zero.
    std::optional<double> tpr() const;
    std::optional<double> fdr() const;
    RateCounts& operator+=(const RateCounts& other);
};

struct EndpointMetrics {
    RateCounts arrowhead;
    RateCounts tail;
};

struct MetricsReport {
    RateCounts skeleton;
    RateCounts arrowhead;
    RateCounts tail;
};

/// Adjacencies as unordered pairs joined by any edge. Vertices are matched by
/// name; the two graphs must have the same vertex names.
RateCounts skeleton_metrics(const Admg& pred, const Admg& truth);

/// Edge-endpoint marks of the MAG projections of both graphs. A cyclic
/// prediction is compared through its raw marks instead; where a pair carries
/// several edges, an endpoint is an arrowhead if any of them points into it.
EndpointMetrics endpoint_metrics(const Admg& pred, const Admg& truth);

MetricsReport evaluate_graphs(const Admg& pred, const Admg& truth);

nlohmann::json metrics_to_json(const MetricsReport& report);

enum class VermaOutcome { TrueClass, SuperModel, Wrong };

std::string_view to_string(VermaOutcome outcome);

/// The three four-vertex targets with Verma constraints:
///   0: A->C, C->D, D->B, A<->B, A<->D
///   1: A->B, B->C, C->D, B<->D
///   2: A<->B, B->C, C->D, B<->D
std::vector<Admg> verma_targets();

/// Targets 1 and 2 share one class; target 0 must be matched exactly. A super
/// model strictly contains the true adjacencies.
VermaOutcome classify_verma(const Admg& pred, std::size_t target);

struct VermaRun {
    std::size_t n = 0;
    std::size_t index = 0;
    std::size_t target = 0;
    std::uint64_t seed = 0;
    VermaOutcome outcome = VermaOutcome::Wrong;
    bool converged = false;
    /// Discovery threw; counted as wrong.
    bool failed = false;
    std::string error;
    Admg predicted;
    double seconds = 0.0;
};

struct VermaSummary {
    std::size_t n = 0;
    std::size_t runs = 0;
    double true_rate = 0.0;
    double super_rate = 0.0;
    double wrong_rate = 0.0;
    std::size_t convergence_failures = 0;
};

struct VermaReport {
    std::vector<VermaRun> runs;
    std::vector<VermaSummary> summaries;
};

/// For each n, `seeds` runs: draw a target uniformly, draw parameters, sample
/// n rows, run discover and classify the result.
VermaReport verma_recovery_experiment(const std::vector<std::size_t>& n_values, std::size_t seeds,
                                      const Hyperparams& hp, std::uint64_t base_seed);

/// One row per run, then one aggregate row per n.
std::string verma_report_csv(const VermaReport& report);

struct RandomGraphConfig {
    std::size_t d = 10;
    std::size_t graphs = 100;
    std::size_t n = 1000;
    double p_directed = 0.4;
    double p_bidirected = 0.3;
    std::uint64_t seed = 0;
};

struct RandomRun {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Admg truth;
    Admg predicted;
    MetricsReport metrics;
    bool converged = false;
    bool failed = false;
    std::string error;
    double seconds = 0.0;
};

struct MeanRates {
    std::optional<double> skeleton_tpr, skeleton_fdr, arrowhead_tpr, arrowhead_fdr, tail_tpr, tail_fdr;
};

struct RandomReport {
    std::vector<RandomRun> runs;
    /// Per-run rates averaged over runs where they are defined.
    MeanRates mean;
    std::size_t convergence_failures = 0;
};

/// Target graph for one random-graph run: a bow-free draw, projected to its MAG
/// for the ancestral class, or rejection-sampled for the arid class.
Admg random_target(const RandomGraphConfig& cfg, GraphClass cls, std::mt19937_64& rng);

RandomReport random_graph_experiment(const RandomGraphConfig& cfg, const Hyperparams& hp);

std::string random_report_csv(const RandomReport& report);

}  // namespace admg

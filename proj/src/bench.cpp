#include "admg/bench.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "admg/errors.hpp"
#include "admg/io_util.hpp"
#include "admg/linsem.hpp"
#include "admg/parallel.hpp"

namespace admg {

std::optional<double> RateCounts::tpr() const {
    if (truth_total == 0) return std::nullopt;
    return static_cast<double>(true_positives) / static_cast<double>(truth_total);
}

std::optional<double> RateCounts::fdr() const {
    if (predicted_total == 0) return std::nullopt;
    return static_cast<double>(false_discoveries) / static_cast<double>(predicted_total);
}

RateCounts& RateCounts::operator+=(const RateCounts& other) {
    true_positives += other.true_positives;
    truth_total += other.truth_total;
    predicted_total += other.predicted_total;
    false_discoveries += other.false_discoveries;
    return *this;
}

namespace {

// `pred` with its vertices reordered to match `truth`.
Admg align(const Admg& pred, const Admg& truth) {
    const std::size_t d = truth.size();
    if (pred.size() != d) throw ArgumentError("graphs have different numbers of vertices");
    std::vector<std::size_t> map(d);
    for (std::size_t i = 0; i < d; ++i) {
        try {
            map[i] = pred.index_of(truth.names()[i]);
        } catch (const ArgumentError&) {
            throw ArgumentError("vertex '" + truth.names()[i] + "' is missing from the predicted graph");
        }
    }
    Admg out(truth.names());
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (pred.directed(map[i], map[j])) out.set_directed(i, j, true);
            if (i < j && pred.bidirected(map[i], map[j])) out.set_bidirected(i, j, true);
        }
    }
    return out;
}

enum class Mark { None, Tail, Arrow };

// Mark at endpoint `at` of the pair {at, other}.
Mark mark_at(const Admg& g, std::size_t at, std::size_t other) {
    if (!g.adjacent(at, other)) return Mark::None;
    if (g.directed(other, at) || g.bidirected(at, other)) return Mark::Arrow;
    return Mark::Tail;
}

void count_marks(const Admg& pred, const Admg& truth, Mark kind, RateCounts& c) {
    const std::size_t d = truth.size();
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            if (a == b) continue;
            const Mark p = mark_at(pred, a, b);
            const Mark t = mark_at(truth, a, b);
            if (t == kind) ++c.truth_total;
            if (p == kind) {
                ++c.predicted_total;
                if (t == kind) {
                    ++c.true_positives;
                } else {
                    ++c.false_discoveries;
                }
            }
        }
    }
}

}  // namespace

RateCounts skeleton_metrics(const Admg& pred_in, const Admg& truth) {
    const Admg pred = align(pred_in, truth);
    RateCounts c;
    const std::size_t d = truth.size();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const bool p = pred.adjacent(i, j);
            const bool t = truth.adjacent(i, j);
            if (t) ++c.truth_total;
            if (p) {
                ++c.predicted_total;
                if (t) {
                    ++c.true_positives;
                } else {
                    ++c.false_discoveries;
                }
            }
        }
    }
    return c;
}

EndpointMetrics endpoint_metrics(const Admg& pred_in, const Admg& truth_in) {
    const Admg aligned = align(pred_in, truth_in);
    const Admg pred = is_acyclic(aligned) ? mag_projection(aligned) : aligned;
    const Admg truth = mag_projection(truth_in);
    EndpointMetrics m;
    count_marks(pred, truth, Mark::Arrow, m.arrowhead);
    count_marks(pred, truth, Mark::Tail, m.tail);
    return m;
}

MetricsReport evaluate_graphs(const Admg& pred, const Admg& truth) {
    MetricsReport r;
    r.skeleton = skeleton_metrics(pred, truth);
    const EndpointMetrics e = endpoint_metrics(pred, truth);
    r.arrowhead = e.arrowhead;
    r.tail = e.tail;
    return r;
}

namespace {

nlohmann::json rate_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

nlohmann::json counts_json(const RateCounts& c) {
    return {{"tpr", rate_json(c.tpr())},
            {"fdr", rate_json(c.fdr())},
            {"true_positives", c.true_positives},
            {"truth_total", c.truth_total},
            {"predicted_total", c.predicted_total},
            {"false_discoveries", c.false_discoveries}};
}

std::string csv_rate(const std::optional<double>& v) { return v ? format_fixed12(*v) : std::string(); }

std::mt19937_64 derived_rng(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
                      static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

Adjacency skeleton_matrix(const Admg& g) {
    const auto d = static_cast<Eigen::Index>(g.size());
    Adjacency a = Adjacency::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i != j && g.adjacent(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) a(i, j) = 1;
        }
    }
    return a;
}

}  // namespace

nlohmann::json metrics_to_json(const MetricsReport& report) {
    return {{"skeleton", counts_json(report.skeleton)},
            {"arrowhead", counts_json(report.arrowhead)},
            {"tail", counts_json(report.tail)}};
}

std::string_view to_string(VermaOutcome outcome) {
    switch (outcome) {
        case VermaOutcome::TrueClass: return "true";
        case VermaOutcome::SuperModel: return "super";
        case VermaOutcome::Wrong: return "wrong";
    }
    return "wrong";
}

std::vector<Admg> verma_targets() {
    const std::vector<std::string> names{"A", "B", "C", "D"};
    return {Admg::from_edges(names, {{"A", "C"}, {"C", "D"}, {"D", "B"}}, {{"A", "B"}, {"A", "D"}}),
            Admg::from_edges(names, {{"A", "B"}, {"B", "C"}, {"C", "D"}}, {{"B", "D"}}),
            Admg::from_edges(names, {{"B", "C"}, {"C", "D"}}, {{"A", "B"}, {"B", "D"}})};
}

VermaOutcome classify_verma(const Admg& pred_in, std::size_t target) {
    const auto targets = verma_targets();
    if (target >= targets.size()) throw ArgumentError("verma target index out of range");
    const Admg& truth = targets[target];
    const Admg pred = align(pred_in, truth);
    const bool exact = target == 0 ? pred == truth : (pred == targets[1] || pred == targets[2]);
    if (exact) return VermaOutcome::TrueClass;
    const Adjacency p = skeleton_matrix(pred);
    const Adjacency t = skeleton_matrix(truth);
    if ((p.array() >= t.array()).all() && p != t) return VermaOutcome::SuperModel;
    return VermaOutcome::Wrong;
}

VermaReport verma_recovery_experiment(const std::vector<std::size_t>& n_values, std::size_t seeds,
                                      const Hyperparams& hp, std::uint64_t base_seed) {
    VermaReport report;
    const auto targets = verma_targets();
    for (std::size_t n : n_values) {
        for (std::size_t k = 0; k < seeds; ++k) {
            VermaRun run;
            run.n = n;
            run.index = k;
            report.runs.push_back(std::move(run));
        }
    }

    Hyperparams inner = hp;
    inner.threads = 1;
    parallel_for(report.runs.size(), [&](std::size_t r) {
        VermaRun& run = report.runs[r];
        const auto start = std::chrono::steady_clock::now();
        auto rng = derived_rng(base_seed, run.n, run.index);
        run.target = std::uniform_int_distribution<std::size_t>(0, targets.size() - 1)(rng);
        run.seed = rng();
        const SemParams p = random_parameters(targets[run.target], rng);
        const Dataset data = sample_data(p, run.n, rng);
        Hyperparams local = inner;
        local.seed = run.seed;
        try {
            const DiscoveryResult res = discover(data, local);
            run.predicted = res.graph;
            run.converged = res.converged;
            run.outcome = classify_verma(res.graph, run.target);
        } catch (const Error& e) {
            run.failed = true;
            run.error = e.what();
            run.outcome = VermaOutcome::Wrong;
        }
        run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    for (std::size_t n : n_values) {
        VermaSummary s;
        s.n = n;
        std::size_t counts[3] = {0, 0, 0};
        for (const auto& run : report.runs) {
            if (run.n != n) continue;
            ++s.runs;
            ++counts[static_cast<int>(run.outcome)];
            if (!run.converged) ++s.convergence_failures;
        }
        if (s.runs > 0) {
            const double total = static_cast<double>(s.runs);
            s.true_rate = static_cast<double>(counts[0]) / total;
            s.super_rate = static_cast<double>(counts[1]) / total;
            s.wrong_rate = static_cast<double>(counts[2]) / total;
        }
        if (s.runs > 0) report.summaries.push_back(s);
    }
    return report;
}

std::string verma_report_csv(const VermaReport& report) {
    std::string out = "row,n,run,target,seed,outcome,converged,failed,seconds,true_rate,super_rate,wrong_rate\n";
    for (const auto& r : report.runs) {
        out += "run," + std::to_string(r.n) + ',' + std::to_string(r.index) + ',' + std::to_string(r.target) + ',' +
               std::to_string(r.seed) + ',' + std::string(to_string(r.outcome)) + ',' + (r.converged ? "1" : "0") +
               ',' + (r.failed ? "1" : "0") + ',' + format_fixed12(r.seconds) + ",,,\n";
    }
    for (const auto& s : report.summaries) {
        out += "aggregate," + std::to_string(s.n) + ',' + std::to_string(s.runs) + ",,,," +
               std::to_string(s.runs - s.convergence_failures) + ",,," + format_fixed12(s.true_rate) + ',' +
               format_fixed12(s.super_rate) + ',' + format_fixed12(s.wrong_rate) + '\n';
    }
    return out;
}

Admg random_target(const RandomGraphConfig& cfg, GraphClass cls, std::mt19937_64& rng) {
    switch (cls) {
        case GraphClass::BowFree: return random_admg(cfg.d, cfg.p_directed, cfg.p_bidirected, GraphClass::BowFree, rng);
        case GraphClass::Ancestral:
            return mag_projection(random_admg(cfg.d, cfg.p_directed, cfg.p_bidirected, GraphClass::BowFree, rng));
        case GraphClass::Arid: return random_admg(cfg.d, cfg.p_directed, cfg.p_bidirected, GraphClass::Arid, rng);
    }
    throw ArgumentError("unknown graph class");
}

RandomReport random_graph_experiment(const RandomGraphConfig& cfg, const Hyperparams& hp) {
    RandomReport report;
    report.runs.resize(cfg.graphs);
    Hyperparams inner = hp;
    inner.threads = 1;
    parallel_for(cfg.graphs, [&](std::size_t k) {
        RandomRun& run = report.runs[k];
        const auto start = std::chrono::steady_clock::now();
        run.index = k;
        auto rng = derived_rng(cfg.seed, cfg.d, k);
        run.truth = random_target(cfg, hp.cls, rng);
        run.seed = rng();
        const SemParams p = random_parameters(run.truth, rng);
        const Dataset data = sample_data(p, cfg.n, rng);
        Hyperparams local = inner;
        local.seed = run.seed;
        try {
            const DiscoveryResult res = discover(data, local);
            run.predicted = res.graph;
            run.converged = res.converged;
        } catch (const Error& e) {
            run.failed = true;
            run.error = e.what();
            run.predicted = Admg(run.truth.names());
        }
        run.metrics = evaluate_graphs(run.predicted, run.truth);
        run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    struct Acc {
        double sum = 0.0;
        std::size_t count = 0;
        void add(const std::optional<double>& v) {
            if (v) {
                sum += *v;
                ++count;
            }
        }
        std::optional<double> mean() const {
            if (count == 0) return std::nullopt;
            return sum / static_cast<double>(count);
        }
    };
    Acc acc[6];
    for (const auto& run : report.runs) {
        if (!run.converged) ++report.convergence_failures;
        acc[0].add(run.metrics.skeleton.tpr());
        acc[1].add(run.metrics.skeleton.fdr());
        acc[2].add(run.metrics.arrowhead.tpr());
        acc[3].add(run.metrics.arrowhead.fdr());
        acc[4].add(run.metrics.tail.tpr());
        acc[5].add(run.metrics.tail.fdr());
    }
    report.mean = {acc[0].mean(), acc[1].mean(), acc[2].mean(), acc[3].mean(), acc[4].mean(), acc[5].mean()};
    return report;
}

std::string random_report_csv(const RandomReport& report) {
    std::string out =
        "row,graph,seed,converged,failed,skeleton_tpr,skeleton_fdr,arrowhead_tpr,arrowhead_fdr,tail_tpr,tail_fdr,"
        "seconds\n";
    for (const auto& r : report.runs) {
        const auto& m = r.metrics;
        out += "run," + std::to_string(r.index) + ',' + std::to_string(r.seed) + ',' + (r.converged ? "1" : "0") + ',' +
               (r.failed ? "1" : "0") + ',' + csv_rate(m.skeleton.tpr()) + ',' + csv_rate(m.skeleton.fdr()) + ',' +
               csv_rate(m.arrowhead.tpr()) + ',' + csv_rate(m.arrowhead.fdr()) + ',' + csv_rate(m.tail.tpr()) + ',' +
               csv_rate(m.tail.fdr()) + ',' + format_fixed12(r.seconds) + '\n';
    }
    const auto& a = report.mean;
    out += "aggregate," + std::to_string(report.runs.size()) + ",," +
           std::to_string(report.runs.size() - report.convergence_failures) + ",," + csv_rate(a.skeleton_tpr) + ',' +
           csv_rate(a.skeleton_fdr) + ',' + csv_rate(a.arrowhead_tpr) + ',' + csv_rate(a.arrowhead_fdr) + ',' +
           csv_rate(a.tail_tpr) + ',' + csv_rate(a.tail_fdr) + ",\n";
    return out;
}

}  // namespace admg

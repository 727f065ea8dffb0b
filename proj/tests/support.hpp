#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "admg/graph.hpp"
#include "admg/linsem.hpp"
#include "admg/matrix.hpp"
#include "admg/ricf.hpp"
#include "admg/sem_params.hpp"

namespace testing {

using admg::Admg;
using admg::Matrix;

inline const std::vector<std::string> kABCD{"A", "B", "C", "D"};

inline Admg fig1a_cd() { return Admg::from_edges(kABCD, {{"A", "C"}, {"B", "D"}, {"C", "D"}}, {}); }
inline Admg fig1a_dc() { return Admg::from_edges(kABCD, {{"A", "C"}, {"B", "D"}, {"D", "C"}}, {}); }
inline Admg fig1b() { return Admg::from_edges(kABCD, {{"A", "C"}, {"B", "D"}}, {{"C", "D"}}); }
inline Admg fig1c() {
    return Admg::from_edges(kABCD, {{"A", "C"}, {"C", "D"}, {"D", "B"}}, {{"A", "B"}, {"A", "D"}});
}
inline Admg fig1d() {
    return Admg::from_edges(kABCD, {{"A", "C"}, {"C", "D"}, {"D", "B"}, {"A", "B"}, {"A", "D"}, {"C", "B"}}, {});
}
inline Admg fig1e() {
    return Admg::from_edges(kABCD, {{"A", "C"}, {"C", "D"}, {"D", "B"}},
                            {{"A", "B"}, {"A", "D"}, {"C", "B"}});
}

// Greenery worked examples: V1 -> V2 -> V3 -> V4 with V1 <-> V3, V1 <-> V4;
// the second adds V2 <-> V4.
inline Admg greenery_a() {
    return Admg::from_edges({"V1", "V2", "V3", "V4"}, {{"V1", "V2"}, {"V2", "V3"}, {"V3", "V4"}},
                            {{"V1", "V3"}, {"V1", "V4"}});
}
inline Admg greenery_b() {
    return Admg::from_edges({"V1", "V2", "V3", "V4"}, {{"V1", "V2"}, {"V2", "V3"}, {"V3", "V4"}},
                            {{"V1", "V3"}, {"V1", "V4"}, {"V2", "V4"}});
}

inline Matrix dmat(const Admg& g) { return g.directed_matrix().cast<double>(); }
inline Matrix bmat(const Admg& g) { return g.bidirected_matrix().cast<double>(); }

/// Graph on V1..Vd from bit masks: bit k of `dir` is the k-th ordered pair
/// (i, j), i != j, in row-major order; bit k of `bi` the k-th pair i < j.
inline Admg graph_from_bits(std::size_t d, std::uint64_t dir, std::uint64_t bi) {
    Admg g = Admg::with_default_names(d);
    std::size_t k = 0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (i == j) continue;
            if ((dir >> k) & 1U) g.set_directed(i, j, true);
            ++k;
        }
    }
    k = 0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            if ((bi >> k) & 1U) g.set_bidirected(i, j, true);
            ++k;
        }
    }
    return g;
}

/// Uniform random support: each directed pair and bidirected pair present with
/// the given probabilities, no acyclicity enforced.
inline Admg random_support(std::size_t d, double p_dir, double p_bi, std::mt19937_64& rng) {
    std::bernoulli_distribution dir(p_dir), bi(p_bi);
    Admg g = Admg::with_default_names(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (i != j && dir(rng)) g.set_directed(i, j, true);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            if (bi(rng)) g.set_bidirected(i, j, true);
        }
    }
    return g;
}

/// Random acyclic support: directed edges only forward in a random order.
inline Admg random_acyclic_support(std::size_t d, double p_dir, double p_bi, std::mt19937_64& rng) {
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution dir(p_dir), bi(p_bi);
    Admg g = Admg::with_default_names(d);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            if (dir(rng)) g.set_directed(order[a], order[b], true);
            if (bi(rng)) g.set_bidirected(order[a], order[b], true);
        }
    }
    return g;
}

// ---- brute-force oracles --------------------------------------------------

/// reach[i][j]: directed path of length >= 0 from i to j.
inline std::vector<std::vector<bool>> oracle_ancestors(const Admg& g) {
    const std::size_t d = g.size();
    std::vector<std::vector<bool>> reach(d, std::vector<bool>(d, false));
    for (std::size_t s = 0; s < d; ++s) {
        std::vector<std::size_t> stack{s};
        reach[s][s] = true;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w = 0; w < d; ++w) {
                if (g.directed(v, w) && !reach[s][w]) {
                    reach[s][w] = true;
                    stack.push_back(w);
                }
            }
        }
    }
    return reach;
}

inline bool oracle_acyclic(const Admg& g) {
    const auto r = oracle_ancestors(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (i != j && r[i][j] && r[j][i]) return false;
        }
    }
    return true;
}

inline bool oracle_ancestral(const Admg& g) {
    if (!oracle_acyclic(g)) return false;
    const auto r = oracle_ancestors(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (i != j && g.bidirected(i, j) && r[i][j]) return false;
        }
    }
    return true;
}

inline bool oracle_bow_free(const Admg& g) {
    if (!oracle_acyclic(g)) return false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (g.directed(i, j) && g.bidirected(i, j)) return false;
        }
    }
    return true;
}

/// True iff vertex set `mask` (containing root) forms a c-tree rooted at root:
/// bidirected-connected inside the set and every member has a directed path
/// to the root inside the set.
inline bool oracle_is_c_tree(const Admg& g, std::uint32_t mask, std::size_t root) {
    const std::size_t d = g.size();
    if (!((mask >> root) & 1U)) return false;
    auto in = [&](std::size_t v) { return ((mask >> v) & 1U) != 0; };
    // bidirected connectivity
    std::uint32_t seen = 1U << root;
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w = 0; w < d; ++w) {
            if (in(w) && !((seen >> w) & 1U) && g.bidirected(v, w)) {
                seen |= 1U << w;
                stack.push_back(w);
            }
        }
    }
    if (seen != mask) return false;
    // directed reachability to the root
    seen = 1U << root;
    stack = {root};
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w = 0; w < d; ++w) {
            if (in(w) && !((seen >> w) & 1U) && g.directed(w, v)) {
                seen |= 1U << w;
                stack.push_back(w);
            }
        }
    }
    return seen == mask;
}

/// Some c-tree with at least two vertices is rooted at `root`.
inline bool oracle_has_c_tree(const Admg& g, std::size_t root) {
    const std::uint32_t full = (1U << g.size()) - 1U;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        if (mask == (1U << root)) continue;
        if (oracle_is_c_tree(g, mask, root)) return true;
    }
    return false;
}

inline bool oracle_arid(const Admg& g) {
    if (!oracle_acyclic(g)) return false;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (oracle_has_c_tree(g, v)) return false;
    }
    return true;
}

/// Enumerates simple paths between i and j and tests the inducing-path
/// conditions directly.
inline bool oracle_inducing_path(const Admg& g, std::size_t i, std::size_t j) {
    const std::size_t d = g.size();
    const auto anc = oracle_ancestors(g);
    std::vector<std::size_t> path{i};
    std::vector<bool> used(d, false);
    used[i] = true;
    auto arrow_into = [&](std::size_t from, std::size_t to) { return g.directed(from, to) || g.bidirected(from, to); };
    std::function<bool(std::size_t)> extend = [&](std::size_t v) -> bool {
        for (std::size_t w = 0; w < d; ++w) {
            if (used[w] || !g.adjacent(v, w)) continue;
            // v must be a collider if it is an interior vertex.
            if (path.size() >= 2) {
                const std::size_t u = path[path.size() - 2];
                if (!(arrow_into(u, v) && arrow_into(w, v))) continue;
                if (!(anc[v][i] || anc[v][j])) continue;
            }
            if (w == j) return true;
            used[w] = true;
            path.push_back(w);
            if (extend(w)) return true;
            path.pop_back();
            used[w] = false;
        }
        return false;
    };
    return extend(i);
}

/// delta = 0 and beta = diag of the column variances.
inline admg::SemParams start_params(const admg::Dataset& data) {
    admg::SemParams p = admg::SemParams::identity(data.cols());
    p.names = data.names();
    p.beta = data.covariance().diagonal().asDiagonal();
    return p;
}

/// Unpenalized RICF restricted to the edges of `g`, run tightly.
inline admg::SemParams fit_on_support(const admg::Dataset& data, const Admg& g) {
    admg::RicfOptions opts;
    opts.support = g;
    opts.tol = 1e-9;
    opts.max_iterations = 500;
    opts.inner.grad_tol = 1e-10;
    return admg::regularized_ricf(data, start_params(data), opts).params;
}

}  // namespace testing

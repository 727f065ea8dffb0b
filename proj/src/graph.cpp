#include "admg/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <numeric>
#include <unordered_set>

#include "admg/errors.hpp"

namespace admg {

std::string_view to_string(GraphClass cls) {
    switch (cls) {
        case GraphClass::Ancestral: return "ancestral";
        case GraphClass::Arid: return "arid";
        case GraphClass::BowFree: return "bowfree";
    }
    return "unknown";
}

GraphClass parse_graph_class(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "ancestral") return GraphClass::Ancestral;
    if (lower == "arid") return GraphClass::Arid;
    if (lower == "bowfree" || lower == "bow-free" || lower == "bow_free") return GraphClass::BowFree;
    throw ArgumentError("unknown graph class '" + std::string(text) +
                        "' (expected ancestral, arid or bowfree)");
}

Admg::Admg(std::vector<std::string> names)
    : names_(std::move(names)),
      directed_(Adjacency::Zero(names_.size(), names_.size())),
      bidirected_(Adjacency::Zero(names_.size(), names_.size())),
      fixed_(names_.size(), false) {
    validate();
}

Admg::Admg(std::vector<std::string> names, Adjacency directed, Adjacency bidirected,
           std::vector<bool> fixed)
    : names_(std::move(names)),
      directed_(std::move(directed)),
      bidirected_(std::move(bidirected)),
      fixed_(std::move(fixed)) {
    if (fixed_.empty()) fixed_.assign(names_.size(), false);
    validate();
}

Admg Admg::from_edges(std::vector<std::string> names,
                      const std::vector<std::pair<std::string, std::string>>& directed,
                      const std::vector<std::pair<std::string, std::string>>& bidirected) {
    Admg g(std::move(names));
    for (const auto& [from, to] : directed) g.set_directed(g.index_of(from), g.index_of(to), true);
    for (const auto& [a, b] : bidirected) g.set_bidirected(g.index_of(a), g.index_of(b), true);
    return g;
}

Admg Admg::with_default_names(std::size_t d) {
    std::vector<std::string> names;
    names.reserve(d);
    for (std::size_t i = 0; i < d; ++i) names.push_back("V" + std::to_string(i + 1));
    return Admg(std::move(names));
}

std::size_t Admg::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    throw ArgumentError("unknown vertex '" + std::string(name) + "'");
}

bool Admg::has_fixed() const {
    return std::any_of(fixed_.begin(), fixed_.end(), [](bool f) { return f; });
}

void Admg::check_vertex(std::size_t v) const {
    if (v >= size()) {
        throw ArgumentError("vertex index " + std::to_string(v) + " out of range for " +
                            std::to_string(size()) + " vertices");
    }
}

void Admg::set_directed(std::size_t from, std::size_t to, bool present) {
    check_vertex(from);
    check_vertex(to);
    if (present && from == to) throw InvalidGraphError("self loop on " + names_[from]);
    if (present && fixed_[to]) throw InvalidGraphError("edge into fixed vertex " + names_[to]);
    directed_(from, to) = present ? 1 : 0;
}

void Admg::set_bidirected(std::size_t a, std::size_t b, bool present) {
    check_vertex(a);
    check_vertex(b);
    if (present && a == b) throw InvalidGraphError("bidirected self loop on " + names_[a]);
    if (present && (fixed_[a] || fixed_[b])) {
        throw InvalidGraphError("bidirected edge at fixed vertex");
    }
    bidirected_(a, b) = present ? 1 : 0;
    bidirected_(b, a) = present ? 1 : 0;
}

std::size_t Admg::num_directed() const {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < directed_.size(); ++i) count += directed_.data()[i] != 0;
    return count;
}

std::size_t Admg::num_bidirected() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = i + 1; j < size(); ++j) count += bidirected(i, j);
    return count;
}

std::vector<std::size_t> Admg::children(std::size_t v) const {
    check_vertex(v);
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < size(); ++w)
        if (directed(v, w)) out.push_back(w);
    return out;
}

std::vector<std::size_t> Admg::parents(std::size_t v) const {
    check_vertex(v);
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < size(); ++u)
        if (directed(u, v)) out.push_back(u);
    return out;
}

bool operator==(const Admg& a, const Admg& b) {
    return a.names_ == b.names_ && a.directed_ == b.directed_ && a.bidirected_ == b.bidirected_ &&
           a.fixed_ == b.fixed_;
}

void Admg::validate() const {
    const auto d = static_cast<Eigen::Index>(names_.size());
    if (directed_.rows() != d || directed_.cols() != d || bidirected_.rows() != d ||
        bidirected_.cols() != d || fixed_.size() != names_.size()) {
        throw InvalidGraphError("adjacency matrices must be " + std::to_string(d) + "x" +
                                std::to_string(d));
    }
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (!seen.insert(n).second) throw InvalidGraphError("duplicate vertex name '" + n + "'");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        if (directed_(i, i) != 0) throw InvalidGraphError("self loop on " + names_[i]);
        if (bidirected_(i, i) != 0) throw InvalidGraphError("nonzero B diagonal at " + names_[i]);
        for (Eigen::Index j = 0; j < d; ++j) {
            if (directed_(i, j) > 1 || bidirected_(i, j) > 1) {
                throw InvalidGraphError("adjacency entries must be 0 or 1");
            }
            if (bidirected_(i, j) != bidirected_(j, i)) {
                throw InvalidGraphError("bidirected matrix is not symmetric at (" + names_[i] +
                                        ", " + names_[j] + ")");
            }
            if (fixed_[j] && (directed_(i, j) != 0 || bidirected_(i, j) != 0)) {
                throw InvalidGraphError("arrowhead into fixed vertex " + names_[j]);
            }
        }
    }
}

bool GraphProperties::satisfies(GraphClass cls) const {
    switch (cls) {
        case GraphClass::Ancestral: return ancestral;
        case GraphClass::Arid: return arid;
        case GraphClass::BowFree: return bow_free;
    }
    return false;
}

bool is_acyclic(const Admg& g) {
    const std::size_t d = g.size();
    std::vector<std::size_t> indegree(d, 0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) indegree[j] += g.directed(i, j);
    std::vector<std::size_t> stack;
    for (std::size_t v = 0; v < d; ++v)
        if (indegree[v] == 0) stack.push_back(v);
    std::size_t visited = 0;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        ++visited;
        for (std::size_t w = 0; w < d; ++w) {
            if (g.directed(v, w) && --indegree[w] == 0) stack.push_back(w);
        }
    }
    return visited == d;
}

Adjacency ancestor_matrix(const Admg& g) {
    const std::size_t d = g.size();
    Adjacency anc = Adjacency::Zero(d, d);
    for (std::size_t s = 0; s < d; ++s) {
        std::vector<std::size_t> stack{s};
        anc(s, s) = 1;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w = 0; w < d; ++w) {
                if (g.directed(v, w) && !anc(s, w)) {
                    anc(s, w) = 1;
                    stack.push_back(w);
                }
            }
        }
    }
    return anc;
}

GraphProperties check_properties(const Admg& g) {
    if (g.has_fixed()) throw ArgumentError("check_properties expects an ADMG without fixed vertices");
    GraphProperties props;
    props.acyclic = is_acyclic(g);
    if (!props.acyclic) return props;

    const std::size_t d = g.size();
    const Adjacency anc = ancestor_matrix(g);
    bool ancestral = true;
    bool bow_free = true;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (i == j || !g.bidirected(i, j)) continue;
            if (anc(i, j)) ancestral = false;
            if (g.directed(i, j)) bow_free = false;
        }
    }
    bool arid = true;
    for (std::size_t v = 0; v < d && arid; ++v) arid = reachable(g, v).reachable;

    props.ancestral = ancestral;
    props.arid = arid;
    props.bow_free = bow_free;
    return props;
}

namespace {

// Vertices joined to `start` by a bidirected path through unfixed vertices.
std::vector<bool> bidirected_component(const Admg& g, std::size_t start) {
    std::vector<bool> in(g.size(), false);
    std::vector<std::size_t> stack{start};
    in[start] = true;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w = 0; w < g.size(); ++w) {
            if (!in[w] && !g.is_fixed(w) && g.bidirected(v, w)) {
                in[w] = true;
                stack.push_back(w);
            }
        }
    }
    return in;
}

bool fixable_unchecked(const Admg& g, std::size_t v) {
    const auto district = bidirected_component(g, v);
    for (std::size_t w = 0; w < g.size(); ++w) {
        if (g.directed(v, w) && district[w]) return false;
    }
    return true;
}

Admg fix_unchecked(const Admg& g, std::size_t v) {
    Adjacency directed = g.directed_matrix();
    Adjacency bidirected = g.bidirected_matrix();
    directed.col(v).setZero();
    bidirected.row(v).setZero();
    bidirected.col(v).setZero();
    std::vector<bool> fixed = g.fixed_mask();
    fixed[v] = true;
    return Admg(g.names(), std::move(directed), std::move(bidirected), std::move(fixed));
}

}  // namespace

bool primal_fixable(const Admg& g, std::size_t v) {
    if (v >= g.size()) throw ArgumentError("vertex index out of range");
    if (g.is_fixed(v)) throw ArgumentError("vertex " + g.names()[v] + " is already fixed");
    return fixable_unchecked(g, v);
}

Admg primal_fix(const Admg& g, std::size_t v) {
    if (!primal_fixable(g, v)) {
        throw NotFixableError("vertex " + g.names()[v] + " is not primal fixable");
    }
    return fix_unchecked(g, v);
}

Reachability reachable(const Admg& g, std::size_t v) {
    if (v >= g.size()) throw ArgumentError("vertex index out of range");
    Admg current = g;
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t u = 0; u < current.size(); ++u) {
            if (u == v || current.is_fixed(u)) continue;
            if (fixable_unchecked(current, u)) {
                current = fix_unchecked(current, u);
                progress = true;
            }
        }
    }
    std::vector<std::size_t> left;
    for (std::size_t u = 0; u < current.size(); ++u) {
        if (u != v && !current.is_fixed(u)) left.push_back(u);
    }
    Reachability result;
    result.reachable = left.empty();
    if (!result.reachable) {
        left.push_back(v);
        std::sort(left.begin(), left.end());
        result.c_tree_vertices = std::move(left);
    }
    return result;
}

bool inducing_path_exists(const Admg& g, std::size_t i, std::size_t j) {
    if (i >= g.size() || j >= g.size()) throw ArgumentError("vertex index out of range");
    if (i == j) throw ArgumentError("inducing path endpoints must differ");
    if (g.adjacent(i, j)) return true;

    const std::size_t d = g.size();
    const Adjacency anc = ancestor_matrix(g);
    // Non-endpoints must be colliders, so every interior edge is bidirected and
    // both end edges point into the path. Interior vertices are ancestors of i or j.
    std::vector<bool> allowed(d, false);
    for (std::size_t v = 0; v < d; ++v) allowed[v] = v != i && v != j && (anc(v, i) || anc(v, j));
    auto arrow_from = [&g](std::size_t endpoint, std::size_t v) {
        return g.directed(endpoint, v) || g.bidirected(endpoint, v);
    };

    std::vector<bool> seen(d, false);
    std::deque<std::size_t> queue;
    for (std::size_t v = 0; v < d; ++v) {
        if (allowed[v] && arrow_from(i, v)) {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        if (arrow_from(j, v)) return true;
        for (std::size_t w = 0; w < d; ++w) {
            if (allowed[w] && !seen[w] && g.bidirected(v, w)) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    return false;
}

Admg mag_projection(const Admg& g) {
    if (!is_acyclic(g)) throw InvalidGraphError("mag_projection requires an acyclic graph");
    const std::size_t d = g.size();
    const Adjacency anc = ancestor_matrix(g);
    Admg out(g.names());
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            if (!inducing_path_exists(g, i, j)) continue;
            if (anc(i, j)) {
                out.set_directed(i, j, true);
            } else if (anc(j, i)) {
                out.set_directed(j, i, true);
            } else {
                out.set_bidirected(i, j, true);
            }
        }
    }
    return out;
}

Admg random_admg(std::size_t d, double p_directed, double p_bidirected, GraphClass cls,
                 std::mt19937_64& rng, RandomGraphOptions options) {
    if (!(p_directed >= 0.0 && p_directed <= 1.0) || !(p_bidirected >= 0.0 && p_bidirected <= 1.0)) {
        throw ArgumentError("edge probabilities must lie in [0, 1]");
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::size_t> order(d);
    for (std::size_t draw = 0; draw < options.max_draws; ++draw) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        Admg g = Admg::with_default_names(d);
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = a + 1; b < d; ++b) {
                const bool dir = unit(rng) < p_directed;
                const bool bi = unit(rng) < p_bidirected;
                if (dir) g.set_directed(order[a], order[b], true);
                // a bidirected edge on top of a directed one would be a bow
                if (bi && !dir) g.set_bidirected(order[a], order[b], true);
            }
        }
        if (cls == GraphClass::BowFree || check_properties(g).satisfies(cls)) return g;
    }
    throw GenerationError("could not draw a random " + std::string(to_string(cls)) + " ADMG in " +
                          std::to_string(options.max_draws) +
                          " draws; lower the edge probabilities");
}

}  // namespace admg

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace admg {

using Adjacency = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

enum class GraphClass { Ancestral, Arid, BowFree };

std::string_view to_string(GraphClass cls);
GraphClass parse_graph_class(std::string_view text);

/// Acyclic directed mixed graph, optionally conditional (a CADMG) when some
/// vertices are fixed. `directed(i, j)` means i -> j; `bidirected` is
/// symmetric with an empty diagonal. Fixed vertices have no arrowheads into
/// them. Acyclicity is not enforced here; check_properties reports it.
class Admg {
public:
    Admg() = default;
    explicit Admg(std::vector<std::string> names);
    Admg(std::vector<std::string> names, Adjacency directed, Adjacency bidirected,
         std::vector<bool> fixed = {});

    /// Builds a graph from name pairs; bidirected pairs are unordered.
    static Admg from_edges(std::vector<std::string> names,
                           const std::vector<std::pair<std::string, std::string>>& directed,
                           const std::vector<std::pair<std::string, std::string>>& bidirected);

    /// Vertices named V1..Vd.
    static Admg with_default_names(std::size_t d);

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    std::size_t index_of(std::string_view name) const;

    bool directed(std::size_t from, std::size_t to) const { return directed_(from, to) != 0; }
    bool bidirected(std::size_t a, std::size_t b) const { return bidirected_(a, b) != 0; }
    bool adjacent(std::size_t a, std::size_t b) const {
        return directed(a, b) || directed(b, a) || bidirected(a, b);
    }
    bool is_fixed(std::size_t v) const { return fixed_[v]; }
    const std::vector<bool>& fixed_mask() const { return fixed_; }
    bool has_fixed() const;

    const Adjacency& directed_matrix() const { return directed_; }
    const Adjacency& bidirected_matrix() const { return bidirected_; }

    void set_directed(std::size_t from, std::size_t to, bool present);
    void set_bidirected(std::size_t a, std::size_t b, bool present);

    std::size_t num_directed() const;
    std::size_t num_bidirected() const;

    std::vector<std::size_t> children(std::size_t v) const;
    std::vector<std::size_t> parents(std::size_t v) const;

    friend bool operator==(const Admg& a, const Admg& b);

private:
    void validate() const;
    void check_vertex(std::size_t v) const;

    std::vector<std::string> names_;
    Adjacency directed_;
    Adjacency bidirected_;
    std::vector<bool> fixed_;
};

struct GraphProperties {
    bool acyclic = false;
    bool ancestral = false;
    bool arid = false;
    bool bow_free = false;

    bool satisfies(GraphClass cls) const;
};

GraphProperties check_properties(const Admg& g);

bool is_acyclic(const Admg& g);

/// Reflexive-transitive closure of the directed part: result(i, j) != 0 iff
/// i is an ancestor of j (every vertex is its own ancestor).
Adjacency ancestor_matrix(const Admg& g);

/// True iff no bidirected path over unfixed vertices joins v to one of its children.
bool primal_fixable(const Admg& g, std::size_t v);

/// Fixes v: marks it fixed and removes every edge with an arrowhead into v.
Admg primal_fix(const Admg& g, std::size_t v);

struct Reachability {
    bool reachable = false;
    /// Root plus the vertices that could not be fixed, when not reachable.
    std::optional<std::vector<std::size_t>> c_tree_vertices;
};

Reachability reachable(const Admg& g, std::size_t v);

bool inducing_path_exists(const Admg& g, std::size_t i, std::size_t j);

/// Maximal ancestral graph with the same inducing paths and ancestral relations.
Admg mag_projection(const Admg& g);

struct RandomGraphOptions {
    std::size_t max_draws = 10000;
};

Admg random_admg(std::size_t d, double p_directed, double p_bidirected, GraphClass cls,
                 std::mt19937_64& rng, RandomGraphOptions options = {});

}  // namespace admg

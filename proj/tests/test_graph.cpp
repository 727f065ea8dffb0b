#include <doctest.h>

#include <random>

#include "admg/errors.hpp"
#include "admg/graph.hpp"
#include "admg/graph_io.hpp"
#include "support.hpp"

using namespace admg;
using namespace testing;

TEST_CASE("example graphs are classified as described") {
    auto b = check_properties(fig1b());
    CHECK(b.acyclic);
    CHECK(b.ancestral);
    CHECK(b.arid);
    CHECK(b.bow_free);

    auto c = check_properties(fig1c());
    CHECK(c.acyclic);
    CHECK_FALSE(c.ancestral);
    CHECK(c.arid);
    CHECK(c.bow_free);

    auto e = check_properties(fig1e());
    CHECK(e.acyclic);
    CHECK_FALSE(e.ancestral);
    CHECK_FALSE(e.arid);
    CHECK(e.bow_free);

    auto d = check_properties(fig1d());
    CHECK(d.ancestral);
    CHECK(d.arid);

    CHECK(check_properties(greenery_a()).arid);
    CHECK_FALSE(check_properties(greenery_b()).arid);
}

TEST_CASE("bow and cycle are detected") {
    Admg bow = Admg::from_edges({"A", "B"}, {{"A", "B"}}, {{"A", "B"}});
    auto p = check_properties(bow);
    CHECK(p.acyclic);
    CHECK_FALSE(p.bow_free);
    CHECK_FALSE(p.ancestral);
    CHECK_FALSE(p.arid);

    Admg cyc = Admg::from_edges({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}, {"C", "A"}}, {});
    auto q = check_properties(cyc);
    CHECK_FALSE(q.acyclic);
    CHECK_FALSE(q.ancestral);
    CHECK_FALSE(q.arid);
    CHECK_FALSE(q.bow_free);
    CHECK_FALSE(is_acyclic(cyc));
}

TEST_CASE("class checks agree with brute force on every d=3 support") {
    for (std::uint64_t dir = 0; dir < 64; ++dir) {
        for (std::uint64_t bi = 0; bi < 8; ++bi) {
            const Admg g = graph_from_bits(3, dir, bi);
            const auto p = check_properties(g);
            CHECK(p.acyclic == oracle_acyclic(g));
            CHECK(p.ancestral == oracle_ancestral(g));
            CHECK(p.bow_free == oracle_bow_free(g));
            CHECK(p.arid == oracle_arid(g));
        }
    }
}

TEST_CASE("class checks agree with brute force on random supports") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 400; ++k) {
        const std::size_t d = 4 + static_cast<std::size_t>(k % 3);
        const Admg g = random_acyclic_support(d, 0.4, 0.4, rng);
        const auto p = check_properties(g);
        REQUIRE(p.acyclic);
        CHECK(p.ancestral == oracle_ancestral(g));
        CHECK(p.bow_free == oracle_bow_free(g));
        CHECK(p.arid == oracle_arid(g));
    }
}

TEST_CASE("ancestor matrix matches path search") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        const Admg g = random_support(5, 0.3, 0.0, rng);
        const auto anc = ancestor_matrix(g);
        const auto oracle = oracle_ancestors(g);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) CHECK((anc(i, j) != 0) == oracle[i][j]);
    }
}

TEST_CASE("primal fixing") {
    // V1 is fixable in the arid example: its only child V2 is not bidirected-connected to it.
    const Admg g = greenery_a();
    CHECK(primal_fixable(g, 0));
    const Admg f = primal_fix(g, 0);
    CHECK(f.is_fixed(0));
    CHECK_FALSE(f.bidirected(0, 2));
    CHECK_FALSE(f.bidirected(0, 3));
    CHECK(f.directed(0, 1));

    // V3 -> V4 with V3 <-> V1 <-> V4: V3 is not fixable.
    CHECK_FALSE(primal_fixable(g, 2));
    CHECK_THROWS_AS(primal_fix(g, 2), NotFixableError);
    // After fixing V1 the bidirected path is gone.
    CHECK(primal_fixable(f, 2));
    CHECK_THROWS_AS(primal_fixable(f, 0), ArgumentError);
}

TEST_CASE("reachability finds exactly the c-tree roots") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 300; ++k) {
        const std::size_t d = 3 + static_cast<std::size_t>(k % 3);
        const Admg g = random_acyclic_support(d, 0.5, 0.5, rng);
        for (std::size_t v = 0; v < d; ++v) {
            const Reachability r = reachable(g, v);
            CHECK(r.reachable == !oracle_has_c_tree(g, v));
            if (!r.reachable) {
                REQUIRE(r.c_tree_vertices.has_value());
                std::uint32_t mask = 0;
                for (std::size_t u : *r.c_tree_vertices) mask |= 1U << u;
                CHECK(oracle_is_c_tree(g, mask, v));
            } else {
                CHECK_FALSE(r.c_tree_vertices.has_value());
            }
        }
    }
}

TEST_CASE("c-tree of the bow-free super model") {
    const Admg g = fig1e();
    const Reachability r = reachable(g, g.index_of("B"));
    CHECK_FALSE(r.reachable);
    CHECK(*r.c_tree_vertices == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("inducing paths match path enumeration") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 300; ++k) {
        const std::size_t d = 4 + static_cast<std::size_t>(k % 2);
        const Admg g = random_acyclic_support(d, 0.35, 0.35, rng);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) CHECK(inducing_path_exists(g, i, j) == oracle_inducing_path(g, i, j));
    }
}

TEST_CASE("hand-checked inducing paths") {
    // C -> D <-> A <-> B: both colliders are ancestors of an endpoint.
    const Admg g = fig1c();
    CHECK(inducing_path_exists(g, g.index_of("C"), g.index_of("B")));
    // A <-> D <- C with D an ancestor of neither A nor C.
    const Admg h = Admg::from_edges(kABCD, {{"C", "D"}, {"D", "B"}}, {{"A", "D"}});
    CHECK_FALSE(inducing_path_exists(h, h.index_of("A"), h.index_of("C")));
    // A <-> B <-> C with B -> D -> C.
    const Admg k = Admg::from_edges(kABCD, {{"B", "D"}, {"D", "C"}}, {{"A", "B"}, {"B", "C"}});
    CHECK(inducing_path_exists(k, k.index_of("A"), k.index_of("C")));
}

TEST_CASE("MAG projection") {
    SUBCASE("the Verma graph projects to the complete DAG") {
        CHECK(mag_projection(fig1c()) == fig1d());
    }
    SUBCASE("random graphs") {
        std::mt19937_64 rng(23);
        for (int k = 0; k < 100; ++k) {
            const Admg g = random_acyclic_support(5, 0.35, 0.35, rng);
            const Admg m = mag_projection(g);
            CHECK(check_properties(m).ancestral);
            const auto anc_g = oracle_ancestors(g);
            const auto anc_m = oracle_ancestors(m);
            for (std::size_t i = 0; i < 5; ++i) {
                for (std::size_t j = 0; j < 5; ++j) {
                    if (i == j) continue;
                    CHECK(m.adjacent(i, j) == inducing_path_exists(g, i, j));
                    CHECK(anc_m[i][j] == anc_g[i][j]);
                }
            }
            CHECK(mag_projection(m) == m);
        }
    }
    SUBCASE("cyclic input") {
        Admg cyc = Admg::from_edges({"A", "B"}, {{"A", "B"}, {"B", "A"}}, {});
        CHECK_THROWS_AS(mag_projection(cyc), InvalidGraphError);
    }
}

TEST_CASE("random graph generation") {
    for (GraphClass cls : {GraphClass::Ancestral, GraphClass::Arid, GraphClass::BowFree}) {
        std::mt19937_64 rng(1);
        for (int k = 0; k < 20; ++k) {
            const Admg g = random_admg(6, 0.4, 0.3, cls, rng);
            CHECK(check_properties(g).satisfies(cls));
        }
    }
    std::mt19937_64 a(9), b(9);
    CHECK(random_admg(8, 0.4, 0.3, GraphClass::BowFree, a) == random_admg(8, 0.4, 0.3, GraphClass::BowFree, b));
    std::mt19937_64 c(9);
    CHECK_THROWS_AS(random_admg(8, 0.4, 0.3, GraphClass::Arid, c, RandomGraphOptions{0}), GenerationError);
    CHECK_THROWS_AS(random_admg(3, 1.5, 0.3, GraphClass::Arid, c), ArgumentError);
}

TEST_CASE("graph validation") {
    CHECK_THROWS_AS(Admg::from_edges({"A", "B"}, {{"A", "A"}}, {}), InvalidGraphError);
    CHECK_THROWS_AS(Admg({"A", "A"}), InvalidGraphError);
    Adjacency d = Adjacency::Zero(2, 2), b = Adjacency::Zero(2, 2);
    b(0, 1) = 1;
    CHECK_THROWS_AS(Admg({"A", "B"}, d, b), InvalidGraphError);
    // No arrowheads into a fixed vertex.
    d(0, 1) = 1;
    CHECK_THROWS_AS(Admg({"A", "B"}, d, Adjacency::Zero(2, 2), {false, true}), InvalidGraphError);
    CHECK_NOTHROW(Admg({"A", "B"}, d, Adjacency::Zero(2, 2), {true, false}));
    CHECK_THROWS_AS(fig1b().index_of("Z"), ArgumentError);
    CHECK_THROWS_AS(check_properties(primal_fix(fig1b(), 0)), ArgumentError);
}

TEST_CASE("graph formats round trip") {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 20; ++k) {
        const Admg g = random_support(5, 0.3, 0.3, rng);
        CHECK(graph_from_json(graph_to_json(g)) == g);
        CHECK(graph_from_edge_list(graph_to_edge_list(g)) == g);
    }
    const Admg parsed = graph_from_edge_list("# verma graph\nA\nB\nC\nD\nA -> C\nC -> D\nD -> B\nA <-> B\nD <-> A\n");
    CHECK(parsed == fig1c());
    CHECK_THROWS_AS(graph_from_edge_list("A\nB\nA => B\n"), FormatError);
    CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(R"({"vertices": ["A"], "directed": [["A", "B"]]})")),
                    FormatError);
    CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse("[1, 2]")), FormatError);
}

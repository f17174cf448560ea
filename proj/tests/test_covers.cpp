#include <set>

#include "doctest.h"
#include "kref/covers.hpp"
#include "kref/csp.hpp"
#include "kref/instances.hpp"
#include "kref/refute.hpp"
#include "kref/rng.hpp"

using namespace kref;

namespace {

Hypergraph gadget4() {
    // every vertex appears exactly twice
    return Hypergraph{6, 3, {{1, 2, 3}, {1, 2, 4}, {3, 5, 6}, {4, 5, 6}}};
}

}  // namespace

TEST_CASE("verify_even_cover: documented cases") {
    const Hypergraph h = gadget4();
    CHECK(verify_even_cover(h, {0, 1, 2, 3}).ok);
    CHECK_FALSE(verify_even_cover(h, {0}).ok);
    CHECK_FALSE(verify_even_cover(h, {0, 0}).ok);
    CHECK(verify_even_cover(h, {0, 0}).reason == "duplicate edge id");

    // two parallel copies of a clause form a length-2 cover
    Hypergraph par{5, 3, {{1, 2, 3}, {1, 2, 3}}};
    CHECK(verify_even_cover(par, {0, 1}).ok);
}

TEST_CASE("find_even_cover: exhaustive strategy") {
    const Hypergraph h = gadget4();
    const auto c = find_even_cover(h, 4, CoverStrategy::Exhaustive);
    REQUIRE(c.has_value());
    CHECK(c->edge_ids == std::vector<std::size_t>{0, 1, 2, 3});

    Hypergraph one{4, 3, {{1, 2, 3}}};
    CHECK_FALSE(find_even_cover(one, 4, CoverStrategy::Exhaustive).has_value());

    Hypergraph par{5, 3, {{2, 3, 4}, {1, 2, 3}, {1, 2, 3}}};
    const auto c2 = find_even_cover(par, 4, CoverStrategy::Exhaustive);
    REQUIRE(c2.has_value());
    CHECK(c2->length() == 2);
}

TEST_CASE("find_even_cover: kernel matches exhaustive minimum length (100 cases)") {
    Rng rng(3);
    int with_cover = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 5 + trial % 6;
        const int m = 4 + static_cast<int>(rng.below(17));  // m <= 20
        const auto inst = gen_random_xor(n, 3, m, 9000 + trial);
        const Hypergraph h = inst.hypergraph();
        const auto a = find_even_cover(h, m, CoverStrategy::Exhaustive);
        const auto b = find_even_cover(h, m, CoverStrategy::Gf2Kernel);
        CHECK(a.has_value() == b.has_value());
        if (a && b) {
            CHECK(a->length() == b->length());
            ++with_cover;
        }
    }
    CHECK(with_cover > 10);  // the comparison actually exercised covers
}

TEST_CASE("find_even_cover: kikuchi-cycle strategy on an even-uniform instance") {
    Hypergraph h{8, 4, {{1, 2, 3, 4}, {1, 2, 5, 6}, {3, 4, 5, 6}, {1, 3, 5, 7}}};
    const auto c = find_even_cover(h, 4, CoverStrategy::KikuchiCycle);
    REQUIRE(c.has_value());
    CHECK(verify_even_cover(h, c->edge_ids).ok);
    CHECK_THROWS(find_even_cover(Hypergraph{4, 3, {{1, 2, 3}}}, 3, CoverStrategy::KikuchiCycle));
}

TEST_CASE("extract_disjoint_covers: two vertex-disjoint gadgets") {
    Hypergraph h{12, 3, {}};
    for (const auto& e : gadget4().edges) h.edges.push_back(e);
    for (const auto& e : gadget4().edges) {
        VertexSet shifted;
        for (int v : e) shifted.push_back(v + 6);
        h.edges.push_back(shifted);
    }
    const auto covers = extract_disjoint_covers(h, 4, 10, CoverStrategy::Exhaustive);
    CHECK(covers.size() == 2);
    std::set<std::size_t> used;
    for (const auto& c : covers) {
        CHECK(verify_even_cover(h, c.edge_ids).ok);
        for (auto id : c.edge_ids) CHECK(used.insert(id).second);
    }

    Hypergraph one{4, 3, {{1, 2, 3}}};
    CHECK(extract_disjoint_covers(one, 4, 3, CoverStrategy::Exhaustive).empty());
}

TEST_CASE("extract_disjoint_covers: dense random 3-uniform instance") {
    const auto inst = gen_random_xor(30, 3, 600, 42);
    const auto covers = extract_disjoint_covers(inst.hypergraph(), 40, 3);
    CHECK(covers.size() >= 3);
    for (const auto& c : covers) {
        CHECK(c.length() <= 40);
        CHECK(verify_even_cover(inst.hypergraph(), c.edge_ids).ok);
    }
}

TEST_CASE("verify_fko_witness: documented bound") {
    // m = 10, two disjoint covers with products (-1, +1): bound 0.9
    XorInstance inst;
    inst.n = 12;
    inst.k = 3;
    for (const auto& e : gadget4().edges) inst.clauses.push_back(e);
    for (const auto& e : gadget4().edges) {
        VertexSet shifted;
        for (int v : e) shifted.push_back(v + 6);
        inst.clauses.push_back(shifted);
    }
    inst.clauses.push_back({1, 2, 7});
    inst.clauses.push_back({3, 8, 9});
    inst.coeffs.assign(10, Rat(1));
    inst.coeffs[0] = Rat(-1);  // first gadget has product -1

    FkoWitness w;
    w.h = 4;
    w.covers.push_back({{0, 1, 2, 3}});
    w.covers.push_back({{4, 5, 6, 7}});
    const auto check = verify_fko_witness(inst, w);
    REQUIRE(check.ok);
    CHECK(check.violated_covers == 1);
    CHECK(check.bound == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(check.bound_exact >= xor_fraction_from_advantage(brute_force_val(inst)));

    // all products +1: vacuous bound 1
    auto inst2 = inst;
    inst2.coeffs[0] = Rat(1);
    const auto check2 = verify_fko_witness(inst2, w);
    CHECK(check2.bound == 1.0);

    // overlapping covers are rejected with the violated clause named
    FkoWitness bad = w;
    bad.covers[1].edge_ids = {0, 1, 2, 3};
    const auto check3 = verify_fko_witness(inst, bad);
    CHECK_FALSE(check3.ok);
    CHECK(check3.reason.find("disjoint") != std::string::npos);

    // fractional coefficients are rejected
    auto inst3 = inst;
    inst3.coeffs[2] = Rat(1, 2);
    CHECK_FALSE(verify_fko_witness(inst3, w).ok);
}

TEST_CASE("verify_fko_witness: bound dominates brute force on tiny instances") {
    Rng rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const auto inst = gen_random_xor(8 + trial % 5, 3, 10 + static_cast<int>(rng.below(20)),
                                         500 + trial);
        const auto w = build_fko_witness(inst, 12, 6);
        const auto check = verify_fko_witness(inst, w);
        REQUIRE(check.ok);
        CHECK(check.bound_exact >= xor_fraction_from_advantage(brute_force_val(inst)));
    }
}

TEST_CASE("build_fko_witness: empty witness on instances without covers") {
    XorInstance inst;
    inst.n = 4;
    inst.k = 3;
    inst.clauses = {{1, 2, 3}};
    inst.coeffs = {Rat(1)};
    const auto w = build_fko_witness(inst, 4, 3);
    CHECK(w.covers.empty());
    CHECK(verify_fko_witness(inst, w).bound == 1.0);
}

TEST_CASE("fko witness JSON round trip") {
    const auto inst = gen_random_xor(12, 3, 60, 9);
    auto w = build_fko_witness(inst, 10, 4);
    w.linear_aux.push_back({1, "3/7"});
    w.poly_aux.push_back({3, 0.25});
    const auto w2 = FkoWitness::from_json(w.to_json());
    CHECK(w2.to_json() == w.to_json());
}

TEST_CASE("csp fko witness: sound bound on 3-SAT style instances") {
    Rng rng(88);
    for (int trial = 0; trial < 12; ++trial) {
        const auto inst = gen_random_csp(9 + trial % 4, 30 + 5 * (trial % 4), or_predicate(3),
                                         880000 + trial);
        CspWitnessParams params;
        params.max_len = 20;
        params.want = 8;
        const auto w = build_csp_fko_witness(inst, params);
        const auto check = verify_csp_fko_witness(inst, w, params);
        REQUIRE(check.ok);
        CHECK(Rat(check.bound) >= brute_force_val_fraction(inst));
    }
}

TEST_CASE("csp fko witness: dense parity instance certifies below 1") {
    // parity has no middle Fourier terms, so a single violated cover already
    // pulls the combined bound below 1
    const auto inst = gen_random_csp(20, 600, parity_predicate(3), 4242);
    CspWitnessParams params;
    params.max_len = 30;
    params.want = 24;
    const auto w = build_csp_fko_witness(inst, params);
    CHECK_FALSE(w.covers.empty());
    const auto check = verify_csp_fko_witness(inst, w, params);
    REQUIRE(check.ok);
    CHECK(check.bound < 1.0);
    CHECK(check.violated_covers >= 1);

    // OR_3 at desk scale: the witness stays sound even though the middle
    // Fourier terms keep the combined bound at the trivial 1
    const auto dense_or = gen_random_csp(16, 400, or_predicate(3), 77);
    const auto w2 = build_csp_fko_witness(dense_or, params);
    const auto check2 = verify_csp_fko_witness(dense_or, w2, params);
    CHECK(check2.ok);
    CHECK(Rat(check2.bound) >= brute_force_val_fraction(dense_or));
}

TEST_CASE("graph_girth: documented cases") {
    SimpleGraph c4{4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}}};
    const auto g1 = graph_girth(c4);
    CHECK(g1.length == 4);

    SimpleGraph k4{4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};
    CHECK(graph_girth(k4).length == 3);

    // Petersen graph: girth 5
    SimpleGraph pet{10, {}};
    for (int i = 0; i < 5; ++i) {
        pet.edges.push_back({i + 1, (i + 1) % 5 + 1});          // outer cycle
        pet.edges.push_back({i + 6, (i + 2) % 5 + 6});          // inner pentagram
        pet.edges.push_back({i + 1, i + 6});                    // spokes
    }
    const auto gp = graph_girth(pet);
    CHECK(gp.length == 5);
    // the witnessing cycle is a real cycle
    std::set<int> seen(gp.cycle.begin(), gp.cycle.end());
    CHECK(seen.size() == gp.cycle.size());

    SimpleGraph tree{5, {{1, 2}, {2, 3}, {2, 4}, {4, 5}}};
    CHECK_FALSE(graph_girth(tree).is_finite());
}

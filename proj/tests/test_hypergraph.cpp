#include <map>

#include "doctest.h"
#include "kref/decompose.hpp"
#include "kref/hypergraph.hpp"
#include "kref/instances.hpp"
#include "kref/rng.hpp"

using namespace kref;

namespace {

std::size_t degree_oracle(const Hypergraph& h, const VertexSet& q) {
    std::size_t d = 0;
    for (const auto& e : h.edges) {
        bool all = true;
        for (int v : q) {
            bool found = false;
            for (int w : e) found = found || w == v;
            all = all && found;
        }
        if (all) ++d;
    }
    return d;
}

}  // namespace

TEST_CASE("degree: hand cases") {
    Hypergraph h{4, 3, {{1, 2, 3}, {1, 2, 4}}};
    CHECK(degree(h, {1, 2}) == 2);
    CHECK(degree(h, {}) == h.m());
    CHECK(degree(h, {3, 4}) == 0);
    CHECK(degree(h, {1, 2, 3, 4}) == 0);  // larger than k
}

TEST_CASE("degree: equals brute-force subset scan on random hypergraphs") {
    Rng rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const auto inst = gen_random_xor(10, 3, 25, trial);
        const Hypergraph h = inst.hypergraph();
        for (int q = 0; q < 10; ++q) {
            const auto query = rng.subset(10, 1 + rng.below(3));
            CHECK(degree(h, query) == degree_oracle(h, query));
        }
    }
}

TEST_CASE("degree_u: restricted to one partition") {
    BipartiteHypergraph bh;
    bh.n = 5;
    bh.t = 3;
    bh.parts = {{{1, 2}, {1, 3}}, {{4, 5}}};
    CHECK(degree_u(bh, 0, {1}) == 2);
    CHECK(degree_u(bh, 0, {}) == 2);
    CHECK(degree_u(bh, 1, {}) == 1);
    CHECK(degree_u(bh, 1, {4, 5}) == 1);
    CHECK_THROWS(degree_u(bh, 2, {}));
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const auto q = rng.subset(5, 1 + rng.below(2));
        Hypergraph slice{5, 2, bh.parts[0]};
        CHECK(degree_u(bh, 0, q) == degree_oracle(slice, q));
    }
}

TEST_CASE("vertex degree sum identity") {
    const auto inst = gen_random_xor(12, 4, 40, 9);
    const Hypergraph h = inst.hypergraph();
    std::size_t total = 0;
    for (int v = 1; v <= h.n; ++v) total += degree(h, {v});
    CHECK(total == static_cast<std::size_t>(h.k) * h.m());
}

TEST_CASE("degree antitone under supersets") {
    const auto inst = gen_random_xor(10, 4, 30, 11);
    const Hypergraph h = inst.hypergraph();
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        auto q = rng.subset(10, 1 + rng.below(3));
        auto q2 = q;
        for (int v = 1; v <= 10; ++v)
            if (!std::binary_search(q2.begin(), q2.end(), v)) {
                q2.push_back(v);
                std::sort(q2.begin(), q2.end());
                break;
            }
        CHECK(degree(h, q) >= degree(h, q2));
    }
}

TEST_CASE("is_regular: empty bipartite hypergraph") {
    BipartiteHypergraph bh;
    bh.n = 4;
    bh.t = 3;
    const auto rep = is_regular(bh, Rat(1), 2);
    CHECK(rep.regular);
    CHECK(rep.violations.empty());
}

TEST_CASE("is_regular: documented violation") {
    // t=3, n=4, l=2, eps=1: deg_u({1}) = 2 > max(2^(-1/2), 1) = 1
    BipartiteHypergraph bh;
    bh.n = 4;
    bh.t = 3;
    bh.parts = {{{1, 2}, {1, 3}}};
    const auto rep = is_regular(bh, Rat(1), 2);
    CHECK_FALSE(rep.regular);
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.q == VertexSet{1} && v.deg == 2) found = true;
    CHECK(found);
}

TEST_CASE("is_regular: decompose output is always regular") {
    for (int seed = 0; seed < 10; ++seed) {
        const auto inst = gen_random_xor(10, 3, 40, seed);
        const auto bc = decompose(inst.hypergraph(), Rat(1, 2), 3);
        for (const auto& level : bc.levels) {
            if (level.bh.p() == 0) continue;
            CHECK(is_regular(level.bh, Rat(1, 2), 3).regular);
        }
    }
}

#include <map>
#include <set>

#include "doctest.h"
#include "kref/kikuchi.hpp"
#include "kref/refute.hpp"
#include "kref/rng.hpp"

using namespace kref;

namespace {

/// Naive oracle: directed nonzero cells of A by testing the defining
/// conditions against explicit subsets (O(N |H|^2) per instance).
std::map<std::pair<std::uint64_t, std::uint64_t>, double> naive_bipartite_cells(
    const BipartitePolynomial& psi, long ell) {
    SubsetIndex idx = SubsetIndex::cloned(psi.n, static_cast<int>(ell));
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> acc;
    const int k = psi.k;
    for (std::uint64_t rs = 0; rs < idx.count(); ++rs) {
        const auto s_elems = idx.unrank(rs);
        std::set<int> s_set(s_elems.begin(), s_elems.end());
        for (std::size_t u = 0; u < psi.p(); ++u) {
            const auto& hu = psi.parts.parts[u];
            for (std::size_t i = 0; i < hu.size(); ++i) {
                for (std::size_t j = 0; j < hu.size(); ++j) {
                    if (i == j) continue;
                    std::vector<int> tail;
                    for (int v : hu[i]) tail.push_back(idx.clone_id(v, 1));
                    for (int v : hu[j]) tail.push_back(idx.clone_id(v, 2));
                    int a = 0, b = 0;
                    for (int v : hu[i])
                        if (s_set.count(idx.clone_id(v, 1))) ++a;
                    for (int v : hu[j])
                        if (s_set.count(idx.clone_id(v, 2))) ++b;
                    bool match;
                    if (k % 2 == 1)
                        match = (a == (k - 1) / 2 && b == (k - 1) / 2);
                    else
                        match = (a == k / 2 && b == (k - 2) / 2) || (a == (k - 2) / 2 && b == k / 2);
                    if (!match) continue;
                    std::set<int> t_set = s_set;
                    for (int id : tail) {
                        if (t_set.count(id))
                            t_set.erase(id);
                        else
                            t_set.insert(id);
                    }
                    if (t_set.size() != static_cast<std::size_t>(ell)) continue;
                    std::vector<int> t_elems(t_set.begin(), t_set.end());
                    acc[{rs, idx.rank(t_elems)}] +=
                        to_double(psi.coeffs[u][i]) * to_double(psi.coeffs[u][j]);
                }
            }
        }
    }
    return acc;
}

BipartitePolynomial hand_psi_k3() {
    // k=3, p=1, H_1 = {{1,2},{3,4}}, n=4, b=(1,1)
    BipartitePolynomial psi;
    psi.n = 4;
    psi.k = 3;
    psi.parts.n = 4;
    psi.parts.t = 3;
    psi.parts.parts = {{{1, 2}, {3, 4}}};
    psi.coeffs = {{Rat(1), Rat(1)}};
    return psi;
}

BipartitePolynomial random_psi(Rng& rng, int n, int k) {
    BipartitePolynomial psi;
    psi.n = n;
    psi.k = k;
    psi.parts.n = n;
    psi.parts.t = k;
    const int p = 1 + static_cast<int>(rng.below(3));
    for (int u = 0; u < p; ++u) {
        std::vector<VertexSet> hu;
        std::vector<Rat> bu;
        const int sz = 1 + static_cast<int>(rng.below(3));
        for (int j = 0; j < sz; ++j) {
            hu.push_back(rng.subset(n, k - 1));
            bu.emplace_back(rng.sign());
        }
        psi.parts.parts.push_back(hu);
        psi.coeffs.push_back(bu);
    }
    return psi;
}

}  // namespace

TEST_CASE("compute_D: documented values") {
    CHECK(compute_D(3, 10, 2) == 4);
    CHECK(compute_D(3, 10, 4) == 480);
    CHECK(compute_D(4, 10, 4) == 252);
    CHECK_THROWS(compute_D(3, 10, 1));   // ell < k-1
    CHECK_THROWS(compute_D(3, 10, 11));  // ell > n
}

TEST_CASE("subset index: rank/unrank inverse") {
    SubsetIndex idx(9, 4);
    CHECK(idx.count() == 126);
    for (std::uint64_t r = 0; r < idx.count(); ++r) CHECK(idx.rank(idx.unrank(r)) == r);
}

TEST_CASE("even kikuchi: single clause, documented cells") {
    XorInstance inst;
    inst.n = 5;
    inst.k = 4;
    inst.clauses = {{1, 2, 3, 4}};
    inst.coeffs = {Rat(1)};
    KikuchiBuildOptions opts;
    opts.exact_values = true;
    const auto km = build_even_kikuchi(inst, 2, opts);
    CHECK(km.nnz_directed() == 6);  // C(4,2) C(1,0) directed entries
    const auto ra = km.index.rank({0, 1});  // {1,2}
    const auto rb = km.index.rank({2, 3});  // {3,4}
    bool found = false;
    for (const auto& c : km.cells)
        if (c.row == std::min(ra, rb) && c.col == std::max(ra, rb)) found = c.value == 1.0;
    CHECK(found);
}

TEST_CASE("even kikuchi: zero matrix for m = 0, quad form at all-ones") {
    XorInstance inst;
    inst.n = 6;
    inst.k = 4;
    const auto km0 = build_even_kikuchi(inst, 3);
    CHECK(km0.cells.empty());

    const auto rand_inst = gen_random_xor(7, 4, 9, 5);
    KikuchiBuildOptions opts;
    opts.exact_values = true;
    const auto km = build_even_kikuchi(rand_inst, 3, opts);
    std::vector<int> ones(rand_inst.n, 1);
    const auto [lhs, rhs] = quad_form_identity_even(km, rand_inst, ones);
    CHECK(lhs == rhs);
    Rat phi(0);
    for (const auto& b : rand_inst.coeffs) phi += b;
    CHECK(rhs == Rat(binomial(4, 2) * binomial(3, 1)) * phi);
}

TEST_CASE("bipartite kikuchi: documented 8-cell example") {
    const auto psi = hand_psi_k3();
    const auto km = build_bipartite_kikuchi(psi, 2);
    CHECK(km.D == 4);
    CHECK(km.nnz_directed() == 8);  // D = 4 per ordered pair, 2 ordered pairs
    for (const auto& c : km.cells) CHECK(c.value == 1.0);
}

TEST_CASE("bipartite kikuchi: |H_u| = 1 gives a zero slice") {
    BipartitePolynomial psi;
    psi.n = 5;
    psi.k = 3;
    psi.parts.n = 5;
    psi.parts.t = 3;
    psi.parts.parts = {{{1, 2}}, {{3, 4}, {2, 5}}};
    psi.coeffs = {{Rat(1)}, {Rat(-1), Rat(1)}};
    const auto km = build_bipartite_kikuchi(psi, 2);
    for (const auto& c : km.cells) CHECK(c.u == 1);
}

TEST_CASE("bipartite kikuchi: matches the naive oracle on random inputs") {
    Rng rng(12);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 4 + trial % 3;
        const int k = 2 + trial % 3;
        const long ell = std::max<long>(k - 1, 1 + trial % 3);
        if (SubsetIndex::cloned(n, static_cast<int>(ell)).count() > 4000) continue;
        const auto psi = random_psi(rng, n, k);
        const auto km = build_bipartite_kikuchi(psi, ell);
        const auto oracle = naive_bipartite_cells(psi, ell);
        std::map<std::pair<std::uint64_t, std::uint64_t>, double> built;
        for (const auto& c : km.cells) {
            built[{c.row, c.col}] += c.value;
            built[{c.col, c.row}] += c.value;
        }
        std::map<std::pair<std::uint64_t, std::uint64_t>, double> oracle_nz, built_nz;
        for (const auto& [rc, v] : oracle)
            if (v != 0.0) oracle_nz[rc] = v;
        for (const auto& [rc, v] : built)
            if (v != 0.0) built_nz[rc] = v;
        CHECK(built_nz == oracle_nz);
    }
}

TEST_CASE("quad form identity: documented example, degenerate case, 50 random pairs") {
    const auto psi = hand_psi_k3();
    KikuchiBuildOptions opts;
    opts.exact_values = true;
    const auto km = build_bipartite_kikuchi(psi, 2, opts);
    const std::vector<int> ones(4, 1);
    const auto [lhs, rhs] = quad_form_identity(km, psi, ones);
    CHECK(lhs == Rat(8));
    CHECK(rhs == Rat(8));
    CHECK(psi.f_value(ones) == Rat(1, 2));

    BipartitePolynomial tiny;
    tiny.n = 4;
    tiny.k = 3;
    tiny.parts.n = 4;
    tiny.parts.t = 3;
    tiny.parts.parts = {{{1, 2}}};
    tiny.coeffs = {{Rat(1)}};
    const auto km0 = build_bipartite_kikuchi(tiny, 2, opts);
    const auto [l0, r0] = quad_form_identity(km0, tiny, ones);
    CHECK(l0 == 0);
    CHECK(r0 == 0);

    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4 + trial % 3;
        const int k = 2 + trial % 2;
        const long ell = k - 1 + trial % 2;
        const auto psi2 = random_psi(rng, n, k);
        const auto km2 = build_bipartite_kikuchi(psi2, ell, opts);
        std::vector<int> x(n);
        for (auto& xi : x) xi = rng.sign();
        const auto [l, r] = quad_form_identity(km2, psi2, x);
        CHECK(l == r);
    }
}

TEST_CASE("butterfly counts match row l1 and the degree-mass identity") {
    const auto psi = hand_psi_k3();
    const auto km = build_bipartite_kikuchi(psi, 2);
    std::map<std::pair<std::uint64_t, std::uint32_t>, double> row_l1;
    for (const auto& c : km.cells) {
        row_l1[{c.row, c.u}] += std::abs(c.value);
        row_l1[{c.col, c.u}] += std::abs(c.value);
    }
    std::uint64_t gamma_total = 0;
    for (const auto& e : km.butterfly) {
        gamma_total += e.count;
        auto it = row_l1.find({e.row, e.u});
        const double l1 = it == row_l1.end() ? 0.0 : it->second;
        CHECK(l1 <= static_cast<double>(e.count));
        CHECK(l1 == static_cast<double>(e.count));  // no collisions in this instance
    }
    CHECK(gamma_total == 2 * km.D.convert_to<std::uint64_t>());  // D per ordered pair, 2 pairs
}

TEST_CASE("bipartite kikuchi: parallel clauses collide, gamma stays an upper bound") {
    // three parallel copies with signs (+1, +1, -1): the six ordered pairs
    // share one cell footprint, entries cancel down to -2, gamma counts 6
    BipartitePolynomial psi;
    psi.n = 4;
    psi.k = 3;
    psi.parts.n = 4;
    psi.parts.t = 3;
    psi.parts.parts = {{{1, 2}, {1, 2}, {1, 2}}};
    psi.coeffs = {{Rat(1), Rat(1), Rat(-1)}};
    KikuchiBuildOptions opts;
    opts.exact_values = true;
    const auto km = build_bipartite_kikuchi(psi, 2, opts);
    std::map<std::pair<std::uint64_t, std::uint32_t>, double> row_l1;
    for (const auto& c : km.cells) {
        CHECK(c.value == -2.0);
        row_l1[{c.row, c.u}] += std::abs(c.value);
        row_l1[{c.col, c.u}] += std::abs(c.value);
    }
    bool strict = false;
    for (const auto& e : km.butterfly) {
        const double l1 = row_l1.count({e.row, e.u}) ? row_l1[{e.row, e.u}] : 0.0;
        CHECK(l1 <= static_cast<double>(e.count));
        if (l1 < e.count) strict = true;
    }
    CHECK(strict);
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> x(4);
        for (auto& xi : x) xi = rng.sign();
        const auto [lhs, rhs] = quad_form_identity(km, psi, x);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("kikuchi graph: edge counts, halves pairing, closed-walk parity") {
    const auto inst = gen_random_xor(8, 4, 6, 3);
    const Hypergraph h = inst.hypergraph();
    const auto g = kikuchi_graph(h, 2);
    CHECK(Int(2 * g.edges.size()) == Int(h.m()) * binomial(4, 2) * binomial(4, 0));

    Hypergraph single{4, 4, {{1, 2, 3, 4}}};
    const auto g1 = kikuchi_graph(single, 2);
    CHECK(g1.edges.size() == 3);
    for (const auto& e : g1.edges) {
        auto sa = g1.index.unrank(e.a);
        auto sb = g1.index.unrank(e.b);
        std::set<int> all(sa.begin(), sa.end());
        for (int v : sb) all.insert(v);
        CHECK(all.size() == 4);  // complementary halves of the clause
    }

    // every closed walk's clause labels XOR to the empty multiset support:
    // walk any edge forward and back
    if (!g.edges.empty()) {
        std::map<std::size_t, int> mult;
        mult[g.edges[0].clause] += 2;
        for (const auto& [cid, cnt] : mult) CHECK(cnt % 2 == 0);
    }
}

TEST_CASE("wam matrix: one clause per partition gives the zero matrix") {
    XorInstance inst;
    inst.n = 8;
    inst.k = 3;
    inst.clauses = {{1, 2, 3}, {2, 4, 5}, {3, 6, 7}};
    inst.coeffs = {Rat(1), Rat(1), Rat(-1)};
    std::vector<int> owner{1, 2, 3};
    const auto wm = build_wam_matrix(inst, owner, 2);
    CHECK(wm.cells.empty());
}

TEST_CASE("wam matrix: intersecting-pair precondition") {
    XorInstance inst;
    inst.n = 6;
    inst.k = 3;
    inst.clauses = {{1, 2, 3}, {1, 2, 4}};
    inst.coeffs = {Rat(1), Rat(1)};
    std::vector<int> owner{1, 1};
    CHECK_THROWS(build_wam_matrix(inst, owner, 2, true));
    CHECK_NOTHROW(build_wam_matrix(inst, owner, 2, false));
}

TEST_CASE("wam matrix: symmetric support") {
    XorInstance inst;
    inst.n = 7;
    inst.k = 3;
    inst.clauses = {{1, 2, 3}, {1, 4, 5}, {1, 6, 7}};
    inst.coeffs = {Rat(1), Rat(1), Rat(1)};
    std::vector<int> owner{1, 1, 1};
    const auto wm = build_wam_matrix(inst, owner, 3);
    CHECK_FALSE(wm.cells.empty());
    for (const auto& c : wm.cells) CHECK(c.row < c.col);
}

TEST_CASE("coordinate export lists directed entries") {
    const auto psi = hand_psi_k3();
    const auto km = build_bipartite_kikuchi(psi, 2);
    const auto text = km.export_coordinate_text();
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == km.nnz_directed());
}

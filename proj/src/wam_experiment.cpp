#include "kref/wam_experiment.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "kref/rng.hpp"
#include "kref/specnorm.hpp"

namespace kref {

namespace {

VertexSet tail_of(const VertexSet& clause, int owner) {
    VertexSet t;
    for (int v : clause)
        if (v != owner) t.push_back(v);
    return t;
}

}  // namespace

WamExperiment run_wam_experiment(int n, int m, long ell, std::uint64_t seed, int power_iters) {
    if (n < 8) throw std::invalid_argument("run_wam_experiment: n >= 8 required");
    if (ell < 2 || ell > 12) throw std::invalid_argument("run_wam_experiment: ell in [2,12]");
    WamExperiment ex;
    ex.ell_prime = static_cast<int>(std::min<long>((m + 2 * n - 1) / (2 * n), ell));
    if (ex.ell_prime < 2) throw std::invalid_argument("run_wam_experiment: m too small (ell' < 2)");
    if (2 * ex.ell_prime + 1 > n) throw std::invalid_argument("run_wam_experiment: n too small for ell'");

    ex.instance.n = n;
    ex.instance.k = 3;
    // distinguished clauses {1, 2i, 2i+1}, all coefficients +1, owned by 1
    std::vector<VertexSet> classes;
    for (int i = 0; i < ex.ell_prime; ++i) {
        const VertexSet cls{2 * i + 2, 2 * i + 3};
        classes.push_back(cls);
        ex.instance.clauses.push_back({1, cls[0], cls[1]});
        ex.instance.coeffs.emplace_back(1);
        ex.owner.push_back(1);
        ex.special_clauses.push_back(i);
    }
    std::set<VertexSet> class_unions;  // forbidden tail-pair unions
    for (int i = 0; i < ex.ell_prime; ++i)
        for (int j = i + 1; j < ex.ell_prime; ++j) {
            VertexSet u;
            std::merge(classes[i].begin(), classes[i].end(), classes[j].begin(), classes[j].end(),
                       std::back_inserter(u));
            class_unions.insert(u);
        }

    Rng rng(seed);
    std::map<int, std::vector<VertexSet>> tails_by_owner;  // tails present in H_u
    for (int i = 0; i < ex.ell_prime; ++i) tails_by_owner[1].push_back(classes[i]);

    auto interferes = [&](int owner, const VertexSet& tail) {
        for (const auto& other : tails_by_owner[owner]) {
            VertexSet inter;
            std::set_intersection(tail.begin(), tail.end(), other.begin(), other.end(),
                                  std::back_inserter(inter));
            if (!inter.empty()) continue;  // non-disjoint pairs contribute nothing
            VertexSet u;
            std::merge(tail.begin(), tail.end(), other.begin(), other.end(), std::back_inserter(u));
            if (class_unions.count(u)) return true;
        }
        return false;
    };

    while (static_cast<int>(ex.instance.m()) < m) {
        const VertexSet clause = rng.subset(n, 3);
        std::vector<int> owners(clause.begin(), clause.end());
        for (std::size_t i = owners.size(); i > 1; --i) std::swap(owners[i - 1], owners[rng.below(i)]);
        int chosen = 0;
        for (int cand : owners) {
            if (!interferes(cand, tail_of(clause, cand))) {
                chosen = cand;
                break;
            }
        }
        if (chosen == 0) continue;  // resample
        tails_by_owner[chosen].push_back(tail_of(clause, chosen));
        ex.instance.clauses.push_back(clause);
        ex.instance.coeffs.emplace_back(rng.sign());
        ex.owner.push_back(chosen);
    }

    if (ipow(Int(n), ell) > Int(4'000'000))
        throw std::invalid_argument("run_wam_experiment: n^ell too large to iterate");
    ex.matrix = build_wam_matrix(ex.instance, ex.owner, ell, /*require_disjoint_pairs=*/false);

    // distinguished tuples: (r_1, ..., r_{ell'}, 1, ..., 1), r_i in classes[i]
    std::vector<std::uint64_t> rset;
    const std::uint64_t rcount = 1ull << ex.ell_prime;
    std::vector<int> tup(ell, 1);
    for (std::uint64_t w = 0; w < rcount; ++w) {
        for (int i = 0; i < ex.ell_prime; ++i) tup[i] = classes[i][(w >> i) & 1];
        for (long q = ex.ell_prime; q < ell; ++q) tup[q] = 1;
        rset.push_back(wam_tuple_code(tup, n));
    }
    ex.submatrix_dim = rcount;
    std::set<std::uint64_t> rlookup(rset.begin(), rset.end());
    std::map<std::uint64_t, std::size_t> row_ones;
    for (auto code : rset) row_ones[code] = 0;
    bool all_ones = true;
    for (const auto& c : ex.matrix.cells) {
        if (rlookup.count(c.row) && rlookup.count(c.col)) {
            if (c.value != 0.0) {
                if (c.value != 1.0) all_ones = false;
                ++row_ones[c.row];
                ++row_ones[c.col];
            }
        }
    }
    ex.expected_row_ones = ex.ell_prime * (ex.ell_prime - 1) / 2;
    ex.submatrix_rows_ok = all_ones;
    for (auto code : rset) {
        ex.submatrix_row_counts.push_back(row_ones[code]);
        if (row_ones[code] != static_cast<std::size_t>(ex.expected_row_ones))
            ex.submatrix_rows_ok = false;
    }

    // power iteration on the full matrix, warm started at the indicator of R
    SparseSym sym;
    sym.dim = ex.matrix.dim;
    for (const auto& c : ex.matrix.cells)
        sym.add(static_cast<std::uint32_t>(c.row), static_cast<std::uint32_t>(c.col), c.value);
    std::vector<double> warm(sym.dim, 0.0);
    for (auto code : rset) warm[code] = 1.0;
    ex.estimate = power_iteration_estimate(sym, power_iters, seed ^ 0xabcdefull, &warm);
    return ex;
}

}  // namespace kref

#pragma once

#include <string>
#include <vector>

#include "kref/hypergraph.hpp"
#include "kref/rational.hpp"

namespace kref {

/// One t-uniform level of a bipartite contraction. parts[u] holds the
/// contracted hyperedges C (|C| = t-1) with label set Q_u (|Q_u| = k+1-t);
/// provenance[u][j] is the index of the original edge Q_u cup parts[u][j].
struct ContractionLevel {
    int t = 0;
    BipartiteHypergraph bh;
    std::vector<std::vector<std::size_t>> provenance;

    std::size_t m() const { return bh.m(); }
};

struct BipartiteContraction {
    int n = 0;
    int k = 0;
    Rat eps;
    long ell = 0;
    Hypergraph discarded;                        // H^(1)
    std::vector<std::size_t> discarded_ids;
    std::vector<ContractionLevel> levels;        // levels[t-2] for t = 2..k
    bool eps_above_recommended = false;          // eps > 1/sqrt(2): 1/eps^2 < 2

    std::size_t level_m(int t) const { return levels[t - 2].m(); }
    std::string to_json() const;
    static BipartiteContraction from_json(const std::string& text);
};

/// Greedy regularity decomposition. Scans violating sets Q by decreasing
/// |Q| (lexicographic within a size), which makes every processed violator
/// maximal; extracts exactly floor((1/eps^2) max((n/l)^(k/2-|Q|),1)) edges
/// per step, lexicographically smallest by (sorted clause, insertion index).
BipartiteContraction decompose(const Hypergraph& h, const Rat& eps, long ell);

struct ContractionCheck {
    std::string clause;  // which guarantee was checked
    bool pass = true;
    std::string detail;
};

struct ContractionReport {
    std::vector<ContractionCheck> checks;
    bool all_pass() const;
    std::string to_string() const;
};

/// Re-checks every guarantee of the decomposition against the original
/// hypergraph: the discarded-mass bound, per-level regularity, equal
/// partition sizes, and that every edge is contracted exactly once.
ContractionReport verify_contraction(const Hypergraph& h, const BipartiteContraction& bc,
                                     const Rat& eps, long ell);

}  // namespace kref

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kref/rational.hpp"

namespace kref {

using VertexSet = std::vector<int>;  // sorted, distinct, values in [1..n]

/// k-uniform multi-hypergraph on [n]. Edges are sorted k-subsets; parallel
/// edges are kept.
struct Hypergraph {
    int n = 0;
    int k = 0;
    std::vector<VertexSet> edges;

    std::size_t m() const { return edges.size(); }
    void validate() const;
};

/// Bipartite t-uniform hypergraph: hyperedges (u, C) with |C| = t-1.
/// labels[u], when present, is the contraction set Q_u disjoint from every
/// C in parts[u].
struct BipartiteHypergraph {
    int n = 0;
    int t = 0;  // hyperedge (u,C) has |C| = t-1
    std::vector<std::vector<VertexSet>> parts;   // H_u, u = 0..p-1
    std::vector<VertexSet> labels;               // optional; empty or size p

    std::size_t p() const { return parts.size(); }
    std::size_t m() const;
    void validate() const;
};

/// deg(Q) = #{C in H : Q subseteq C}, with multiplicity. deg(empty) = m.
std::size_t degree(const Hypergraph& h, const VertexSet& q);

/// deg_u(Q) within partition u.
std::size_t degree_u(const BipartiteHypergraph& bh, std::size_t u, const VertexSet& q);

struct RegularityViolation {
    std::size_t u;
    VertexSet q;
    std::size_t deg;
    double threshold;  // (1/eps^2) max((n/l)^(t/2-1-|Q|), 1), for reporting
};

struct RegularityReport {
    bool regular = true;
    std::vector<RegularityViolation> violations;
};

/// (eps,l)-regularity check: deg_u(Q) <= (1/eps^2) max((n/l)^(t/2-1-|Q|), 1)
/// for every u and every Q with |Q| <= t-1, Q = empty included. Comparisons
/// are exact. Only Q realized as a subset of some edge can violate (others
/// have degree 0 and the threshold is positive), so the scan over realized
/// subsets is exhaustive.
RegularityReport is_regular(const BipartiteHypergraph& bh, const Rat& eps, long ell);

std::string to_string(const VertexSet& s);

}  // namespace kref

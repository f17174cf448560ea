#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kref/hypergraph.hpp"
#include "kref/instances.hpp"
#include "kref/rational.hpp"

namespace kref {

/// Even cover: distinct edge ids whose symmetric difference is empty.
struct EvenCover {
    std::vector<std::size_t> edge_ids;  // sorted, distinct
    std::size_t length() const { return edge_ids.size(); }
};

struct CoverCheck {
    bool ok = false;
    std::string reason;
};

CoverCheck verify_even_cover(const Hypergraph& h, const std::vector<std::size_t>& ids);

enum class CoverStrategy { Exhaustive, Gf2Kernel, KikuchiCycle };

struct CoverSearchOptions {
    std::size_t exhaustive_max_m = 24;
    int kernel_enum_dim = 22;     // exact kernel-space enumeration up to this dimension
    int kernel_isd_rounds = 64;   // randomized re-elimination rounds beyond that
    long kikuchi_ell = 0;         // 0: use k/2
    std::uint64_t seed = 1;
};

/// Search for an even cover of length <= max_len. Exhaustive search (and
/// kernel search with full kernel-space enumeration) returns a minimum-length
/// cover and its absence proves nonexistence; the randomized kernel rounds
/// and the Kikuchi-cycle strategy are heuristic.
std::optional<EvenCover> find_even_cover(const Hypergraph& h, std::size_t max_len,
                                         CoverStrategy strategy,
                                         const CoverSearchOptions& opts = {});

/// Greedy peeling: find a cover, remove its edges, repeat. Covers are
/// pairwise edge-disjoint, each of length <= max_len.
std::vector<EvenCover> extract_disjoint_covers(const Hypergraph& h, std::size_t max_len,
                                               std::size_t want,
                                               CoverStrategy strategy = CoverStrategy::Gf2Kernel,
                                               const CoverSearchOptions& opts = {});

/// Collection of pairwise disjoint even covers, plus optional per-Fourier-term
/// auxiliary certificates for CSP-style witnesses.
struct FkoWitness {
    std::size_t h = 0;  // declared length bound
    std::vector<EvenCover> covers;
    struct LinearAux {
        std::uint32_t mask;
        std::string bound;  // exact rational "num/den"
    };
    struct PolyAux {
        std::uint32_t mask;
        double bound;
    };
    std::vector<LinearAux> linear_aux;
    std::vector<PolyAux> poly_aux;

    std::size_t r() const { return covers.size(); }
    std::size_t size() const;
    std::string to_json() const;
    static FkoWitness from_json(const std::string& text);
};

struct WitnessCheck {
    bool ok = false;
    std::string reason;
    Rat bound_exact = Rat(1);  // certified upper bound on the satisfiable fraction
    double bound = 1.0;        // bound_exact rounded upward
    std::size_t violated_covers = 0;
};

/// Deterministic FKO bound: every cover whose coefficient product is -1
/// forces one violated constraint; disjointness adds them up. The bound
/// 1 - v/m on the satisfiable fraction is sound for the given instance.
WitnessCheck verify_fko_witness(const XorInstance& inst, const FkoWitness& w);

FkoWitness build_fko_witness(const XorInstance& inst, std::size_t max_len, std::size_t want,
                             CoverStrategy strategy = CoverStrategy::Gf2Kernel,
                             const CoverSearchOptions& opts = {});

struct CspWitnessParams {
    std::size_t max_len = 40;
    std::size_t want = 16;
    long ell = 2;
    Rat eps = Rat(1, 2);
    double tau = 1e-2;
    CoverSearchOptions search;
};

/// CSP-style witness: the predicate splits into Fourier pieces; degree-1
/// pieces carry exact l1 bounds, middle degrees carry certified polynomial
/// bounds, and the top piece carries disjoint even covers on the scope
/// hypergraph.
FkoWitness build_csp_fko_witness(const CspInstance& inst, const CspWitnessParams& params = {});

/// Recomputes every auxiliary bound (exact l1 for linear pieces, the
/// deterministic certified pipeline for middle degrees), verifies the covers,
/// and combines P_hat(empty) + sum |P_hat(S)| bound_S + |P_hat([k])| (1 - 2v/m)
/// into a sound upper bound on the satisfiable fraction.
WitnessCheck verify_csp_fko_witness(const CspInstance& inst, const FkoWitness& w,
                                    const CspWitnessParams& params = {});

struct SimpleGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // 1-based endpoints, no loops
};

struct GirthResult {
    std::size_t length = 0;   // 0 encodes infinity (forest)
    std::vector<int> cycle;   // witnessing cycle when finite
    bool is_finite() const { return length > 0; }
};

/// Exact girth by BFS from every vertex, with a witnessing cycle.
GirthResult graph_girth(const SimpleGraph& g);

}  // namespace kref

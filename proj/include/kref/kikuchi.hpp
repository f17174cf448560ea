#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kref/hypergraph.hpp"
#include "kref/instances.hpp"
#include "kref/rational.hpp"
#include "kref/subset_index.hpp"

namespace kref {

/// Replication constant: the number of non-zero cells each ordered pair
/// (C, C') from a partition contributes to the cloned Kikuchi matrix.
/// Requires k-1 <= ell <= n (the construction degenerates below ell = k-1;
/// ell >= 2(k-1) is the guarantee regime).
Int compute_D(int k, long n, long ell);

/// p-bipartite homogeneous degree-k polynomial
///   psi(y,x) = (1/m) sum_u y_u sum_{C in H_u} b_{u,C} x_C,
/// clauses C of size k-1.
struct BipartitePolynomial {
    int n = 0;
    int k = 0;
    BipartiteHypergraph parts;               // t = k
    std::vector<std::vector<Rat>> coeffs;    // aligned with parts.parts

    std::size_t p() const { return parts.p(); }
    std::size_t m() const { return parts.m(); }
    void validate() const;

    /// Value at x with the sign-optimal y: (1/m) sum_u |sum_C b_{u,C} x_C|.
    Rat value_for_x(const std::vector<int>& x) const;
    /// psi(y, x) itself.
    Rat eval(const std::vector<int>& y, const std::vector<int>& x) const;
    /// The Cauchy-Schwarz square f(x) = (p/m^2) sum_u sum_{C != C'} b b' x_C x_C'.
    Rat f_value(const std::vector<int>& x) const;
    /// Drops empty partitions (tightens the p/m slack; value unchanged).
    BipartitePolynomial without_empty_partitions() const;
};

enum class PartitionRule { CMin, RoundRobin };

/// XOR instance -> bipartite polynomial: each clause is owned by one of its
/// elements u and contributes y_u x_{C \ u}. Default ownership: minimum
/// indexed element.
BipartitePolynomial bipartite_from_xor(const XorInstance& inst, PartitionRule rule = PartitionRule::CMin);

/// One stored cell of a Kikuchi matrix slice A_u. Cells are stored once per
/// unordered pair row < col; the matrix is symmetric so each stored cell
/// represents the two directed entries (row,col) and (col,row).
struct KikuchiCell {
    std::uint32_t u;
    std::uint64_t row, col;
    double value;
};

/// Per-row, per-partition butterfly counts gamma_u(S), accumulated at
/// generation time (before collision summation).
struct ButterflyEntry {
    std::uint64_t row;
    std::uint32_t u;
    std::uint32_t count;
};

struct KikuchiBuildOptions {
    bool exact_values = false;        // keep exact rational cell values
    std::uint64_t max_cells = 30'000'000;  // directed generation events cap
};

struct KikuchiMatrix {
    SubsetIndex index;
    int arity = 0;        // polynomial degree k (bipartite) or clause arity (even-direct)
    bool bipartite = false;
    Int D;                // directed cells per ordered pair (bipartite) / per clause (even)
    std::uint64_t p = 0;  // partitions (bipartite) or m (even-direct)
    std::vector<KikuchiCell> cells;          // merged within (u,row,col), row < col
    std::vector<Rat> exact_values;           // parallel to cells when exact mode
    std::vector<ButterflyEntry> butterfly;   // sorted by (row, u)
    std::uint64_t generation_events = 0;     // total directed events

    std::uint64_t nnz_directed() const { return 2 * cells.size(); }
    /// Sum over stored cells of 2|value| = entrywise l1 of A.
    double entrywise_l1() const;
    /// A cells merged across partitions, (row, col, value), row < col.
    std::vector<KikuchiCell> total_cells() const;
    /// gamma(S) = sum_u gamma_u(S) and max_u gamma_u(S) per realized row.
    struct RowGamma {
        std::uint64_t row;
        std::uint64_t total;
        std::uint64_t max_u;
    };
    std::vector<RowGamma> row_gammas() const;

    /// Coordinate text export: one "row col value" line per directed entry
    /// of the summed matrix.
    std::string export_coordinate_text() const;
};

/// Even-arity direct Kikuchi matrix: A = sum_C A_C on ell-subsets of [n],
/// A_C(S,T) = b_C when S xor T = C. Slices indexed by clause.
KikuchiMatrix build_even_kikuchi(const XorInstance& inst, long ell,
                                 const KikuchiBuildOptions& opts = {});

/// Cloned bipartite Kikuchi matrix of Def 5.1 on ell-subsets of [n] x [2].
KikuchiMatrix build_bipartite_kikuchi(const BipartitePolynomial& psi, long ell,
                                      const KikuchiBuildOptions& opts = {});

/// Both sides of the quadratic-form identity
///   (x^{*ell})^T A x^{*ell} = (m^2 D / p) f(x),
/// computed exactly; requires a matrix built with exact_values.
std::pair<Rat, Rat> quad_form_identity(const KikuchiMatrix& km, const BipartitePolynomial& psi,
                                       const std::vector<int>& x);

/// Even-arity analog: lhs = (x^{*ell})^T A x^{*ell},
/// rhs = C(k,k/2) C(n-k,ell-k/2) * sum_C b_C x_C.
std::pair<Rat, Rat> quad_form_identity_even(const KikuchiMatrix& km, const XorInstance& inst,
                                            const std::vector<int>& x);

/// Kikuchi graph (k even): vertices are ell-subsets of [n], one edge
/// {S, S xor C} per clause C and admissible S, labeled by the clause id.
struct KikuchiGraph {
    SubsetIndex index;
    struct Edge {
        std::uint64_t a, b;
        std::uint32_t clause;
    };
    std::vector<Edge> edges;  // each unordered edge once
};

KikuchiGraph kikuchi_graph(const Hypergraph& h, long ell, std::uint64_t max_edges = 30'000'000);

/// Matrix over ordered ell-tuples [n]^ell with the swap-at-two-positions rule
/// for 3-uniform instances partitioned by an owner map.
struct WamMatrix {
    int n = 0;
    int ell = 0;
    std::uint64_t dim = 0;  // n^ell
    std::vector<KikuchiCell> cells;  // u = owner-1; row < col tuple codes
};

/// owner[c] in clauses[c] names the partition of clause c. When
/// require_disjoint_pairs is set, any two distinct clauses sharing more than
/// one variable cause a rejection.
WamMatrix build_wam_matrix(const XorInstance& inst, const std::vector<int>& owner, long ell,
                           bool require_disjoint_pairs = true, std::uint64_t max_cells = 30'000'000);

std::uint64_t wam_tuple_code(const std::vector<int>& tuple, int n);
std::vector<int> wam_tuple_decode(std::uint64_t code, int n, int ell);

}  // namespace kref

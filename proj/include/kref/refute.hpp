#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kref/decompose.hpp"
#include "kref/instances.hpp"
#include "kref/kikuchi.hpp"
#include "kref/rational.hpp"
#include "kref/specnorm.hpp"

namespace kref {

/// The Cauchy-Schwarz square of psi, kept implicit as the per-partition pair
/// list. slack = p/m is the additive loss: val(psi)^2 <= val(f) + slack.
struct SquaredPolynomial {
    BipartitePolynomial psi;  // empty partitions dropped
    Rat slack;

    Rat eval(const std::vector<int>& x) const { return psi.f_value(x); }
};

SquaredPolynomial cauchy_schwarz(const BipartitePolynomial& psi);

/// gamma_u(S) by direct pair iteration; S given as (vertex, label) clones.
std::uint64_t butterfly_degree(const std::vector<VertexSet>& h_u,
                               const std::vector<std::pair<int, int>>& s, int k);

struct PruneResult {
    Int delta;
    std::vector<std::uint64_t> bad_rows;     // sorted
    double pruned_mass = 0.0;                // exact entrywise l1 of A - A_GG
    double coarse_bound = 0.0;               // 2|B| * 4m^2/p, logged for comparison
    std::vector<std::size_t> good_cells;     // indices into km.cells
};

PruneResult prune_rows(const KikuchiMatrix& km, const Int& delta, std::uint64_t m, std::uint64_t p);

/// Dyadic bucketing of rows by total butterfly degree: F_0 = {gamma <= d},
/// F_i = {2^(i-1) d < gamma <= 2^i d}. Input rows are (row, gamma) pairs;
/// rows not listed have gamma = 0 and belong to F_0 implicitly.
struct Buckets {
    Rat d;
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> members;  // per i, (row, gamma)
    int bucket_of_gamma(const Int& gamma) const;
};

Buckets bucket_rows(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& gammas, const Rat& d);

struct BucketPairBound {
    int i = 0, j = 0;
    std::string fi, fj;       // |F_i|, |F_j| (full bucket sizes)
    std::uint64_t nnz = 0;    // stored cells in the block
    double sigma = 0.0;
    double estimate = 0.0;
    std::string method;
    int factor = 1;           // 1 diagonal, 2 off-diagonal
};

struct RefuteOptions {
    std::size_t dense_cap = 4096;
    std::uint64_t max_cells = 30'000'000;
    enum class DeltaMode { Adaptive, ClosedForm };
    DeltaMode delta_mode = DeltaMode::Adaptive;
    double closed_form_c = 1.0;  // absolute constant in the closed-form Delta
};

/// Everything a verifier needs to recompute one level's alg-val.
struct LevelCertificate {
    int t = 0;
    std::uint64_t p = 0, m = 0;
    int label_size = 0;
    std::string d_big;    // D
    std::string n_index;  // N = C(2n, ell)
    std::string delta;
    std::uint64_t bad_rows = 0;
    double pruned_mass = 0.0;
    double coarse_pruned_bound = 0.0;
    std::string d_num = "0", d_den = "1";  // bucket scale d = 4 m^2 D/(p N)
    std::vector<std::string> bucket_sizes;  // |F_0|, |F_1|, ...
    std::vector<BucketPairBound> pair_bounds;
    double boolnorm_bound = 0.0;
    double alg_val_pre_clip = 0.0;
    double alg_val = 1.0;
    bool below_guarantee_regime = false;  // ell < 2(t-1)
    bool trivial = false;
    std::string trivial_reason;
    bool bucket_law_ok = true;
    bool coeffs_pm1 = true;
};

/// Recompute boolnorm bound and alg-val from the recorded pieces (the same
/// fixed-order arithmetic the pipeline uses).
double assemble_level_alpha(const LevelCertificate& lc);

/// Certified infty->1 bound on A: pruned mass plus
/// sum_{i,j} sqrt(|F_i| |F_j|) * certified_specnorm(G^(i,j), tau).
/// Returns a certificate fragment holding the pruned mass, bucket sizes,
/// per-pair sigmas and the assembled bound; sound for every input.
LevelCertificate boolnorm_certificate(const KikuchiMatrix& km, const Buckets& buckets,
                                      const PruneResult& pruned, double tau,
                                      const RefuteOptions& opts = {});

struct RegRefuteResult {
    double alg_val = 1.0;
    LevelCertificate cert;
};

/// Certification for one bipartite polynomial: Cauchy-Schwarz squaring,
/// Kikuchi construction, row pruning, row bucketing, certified spectral
/// bounds, and alpha = min(1, sqrt((p/(m^2 D)) * boolnorm + p/m)). The value
/// is an upper bound on max(val(psi), val(-psi)) for every input.
RegRefuteResult refute_regular(const BipartitePolynomial& psi, long ell, const Rat& eps, double tau,
                               const RefuteOptions& opts = {});

struct RefutationCertificate {
    std::uint64_t digest = 0;
    int n = 0, k = 0;
    long ell = 0;
    std::string eps_num = "1", eps_den = "1";
    double tau = 0.0;
    std::uint64_t m = 0;
    std::uint64_t m_discarded = 0;
    std::vector<LevelCertificate> levels;
    double alg_val = 0.0;

    std::string to_json() const;
    static RefutationCertificate from_json(const std::string& text);
};

double assemble_final_alg_val(const RefutationCertificate& cert);

struct RefutationResult {
    double alg_val = 0.0;
    RefutationCertificate cert;
};

/// Top-level pipeline: decompose, lift coefficients, refute each level,
/// combine alg-val = (1/m) sum_t m^(t) alg-val_t with alg-val_1 = 1.
RefutationResult refute_poly(const XorInstance& inst, long ell, const Rat& eps, double tau,
                             const RefuteOptions& opts = {});

struct ReplayResult {
    bool ok = false;
    double recomputed = 0.0;
    std::string detail;
};

/// Recomputes the final alg-val from certificate fields alone.
ReplayResult replay_certificate(const RefutationCertificate& cert);

/// Exact maxima by exhaustive enumeration (Gray-code walk). Guarded at
/// n <= 26; the bipartite variant optimizes y per partition in closed form.
Rat brute_force_val(const XorInstance& inst);
Rat brute_force_val(const BipartitePolynomial& psi);
/// Max fraction of satisfied constraints.
Rat brute_force_val_fraction(const CspInstance& inst);

/// Fraction form of the XOR optimum: (1 + max phi)/2.
inline Rat xor_fraction_from_advantage(const Rat& adv) { return (Rat(1) + adv) / 2; }

}  // namespace kref
